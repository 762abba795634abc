use flowdiff::{Error, Graph, Result};

/// `d = t - s` with sink capacity `t_v = deg(v)` and `mass` spread over the
/// seeds, by degree unless `uniform`.
pub fn build_demand(g: &Graph, seeds: &[usize], mass: f64, uniform: bool) -> Result<Vec<f64>> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Config(format!("source mass must be positive, got {mass}")));
    }
    if seeds.is_empty() {
        return Err(Error::Config("seed list is empty".into()));
    }
    let mut seen = vec![false; g.n()];
    for &s in seeds {
        if s >= g.n() {
            return Err(Error::Domain(format!("seed {s} outside 0..{}", g.n())));
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::Domain(format!("seed {s} listed twice")));
        }
    }
    let total = g.total_volume();
    if mass > total {
        return Err(Error::Domain(format!("source mass {mass} exceeds the total sink capacity {total}")));
    }
    let mut d = g.weighted_degrees();
    let vol = g.volume(seeds);
    if !uniform && !(vol > 0.0) {
        return Err(Error::Domain("seeds have zero volume".into()));
    }
    for &s in seeds {
        d[s] -= if uniform { mass / seeds.len() as f64 } else { mass * g.weighted_degree(s) / vol };
    }
    Ok(d)
}
