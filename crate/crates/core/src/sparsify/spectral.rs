//! Spectral sparsification of small dense cores by effective-resistance
//! sampling, certified with the dense pencil.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::oracle::pencil_bounds;

/// Cores larger than this are returned unchanged rather than sampled,
/// since they could not be certified.
pub const SPARSIFY_MAX_VERTICES: usize = 1200;

/// A graph `H` with `L_G <= L_H <= quality * L_G`.
#[derive(Debug, Clone)]
pub struct Sparsified {
    pub graph: Graph<f64>,
    pub quality: f64,
}

/// Default edge-count threshold `4 n log2 n`.
pub fn default_threshold(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    (4.0 * n as f64 * (n as f64).log2()).ceil() as usize
}

/// Default sample count `ceil(8 n ln n)`.
pub fn default_samples(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    (8.0 * n as f64 * (n as f64).ln()).ceil() as usize
}

fn effective_resistances(g: &Graph<f64>) -> Result<Vec<f64>> {
    let n = g.n();
    let k = n - 1;
    let mut l = DMatrix::<f64>::zeros(k, k);
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if a < k {
                l[(a, a)] += e.c;
                if b < k {
                    l[(a, b)] -= e.c;
                }
            }
        }
    }
    let inv =
        l.cholesky().ok_or_else(|| Error::Numerical("grounded Laplacian is not positive definite".into()))?.inverse();
    let at = |a: usize, b: usize| if a < k && b < k { inv[(a, b)] } else { 0.0 };
    Ok(g.edges().iter().map(|e| (at(e.u, e.u) + at(e.v, e.v) - 2.0 * at(e.u, e.v)).max(0.0)).collect())
}

fn sample(g: &Graph<f64>, probs: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> Result<Graph<f64>> {
    let dist = WeightedIndex::new(probs).map_err(|e| Error::Numerical(format!("sampling weights: {e}")))?;
    let total: f64 = probs.iter().sum();
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for _ in 0..samples {
        let id = dist.sample(rng);
        let p = probs[id] / total;
        *acc.entry(id).or_insert(0.0) += g.edge(id).c / (samples as f64 * p);
    }
    let edges = acc.into_iter().map(|(id, c)| Edge { c, ..*g.edge(id) }).collect();
    Graph::new(g.n(), edges)
}

/// Sparsifies the connected graph `g` with quality 2 when it has more than
/// `default_threshold(n)` edges; otherwise returns it with quality 1.
pub fn spectral_sparsify_core(g: &Graph<f64>, seed: u64) -> Result<Sparsified> {
    spectral_sparsify_with(g, default_threshold(g.n()), default_samples(g.n()), seed)
}

/// As [`spectral_sparsify_core`] with explicit edge threshold and sample
/// count. The sample is rescaled so that `L_G <= L_H` holds exactly and is
/// accepted when the dense pencil certifies a ratio of at most 2; one
/// resample is attempted before giving up.
pub fn spectral_sparsify_with(g: &Graph<f64>, threshold: usize, samples: usize, seed: u64) -> Result<Sparsified> {
    let n = g.n();
    if g.m() <= threshold || !(3..=SPARSIFY_MAX_VERTICES).contains(&n) {
        return Ok(Sparsified { graph: g.clone(), quality: 1.0 });
    }
    if !g.is_connected() {
        return Err(Error::Domain("spectral sparsification needs a connected graph".into()));
    }
    let resistances = effective_resistances(g)?;
    let probs: Vec<f64> = g.edges().iter().zip(&resistances).map(|(e, r)| (e.c * r).max(1e-300)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 {
        let h = sample(g, &probs, samples, &mut rng)?;
        if !h.is_connected() {
            continue;
        }
        let p = pencil_bounds(&h, g)?;
        if p.lambda_min > 0.0 && p.ratio() <= 2.0 {
            return Ok(Sparsified { graph: h.scaled(1.0 / p.lambda_min), quality: p.ratio() });
        }
    }
    Err(Error::Numerical("sampled sparsifier failed its certificate twice".into()))
}
