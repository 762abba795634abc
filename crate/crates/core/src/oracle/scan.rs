use crate::error::{Error, Result};
use crate::vwf::Vwf;

/// Exact minimiser of a single VWF over its domain, as `(x, f(x))`. The
/// leftmost minimiser is returned.
pub fn vwf_min_scan(f: &Vwf<f64>) -> Result<(f64, f64)> {
    let pieces = f.pieces();
    let last = pieces.last().expect("VWF has at least one piece");
    if last.r == 0.0 && last.a < 0.0 {
        return Err(Error::Unbounded("final piece has negative slope".into()));
    }
    if !pieces[0].start.is_finite() && pieces[0].r == 0.0 && pieces[0].a > 0.0 {
        return Err(Error::Unbounded("first piece decreases towards -inf".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for (i, p) in pieces.iter().enumerate() {
        let lo = p.start;
        let hi = pieces.get(i + 1).map_or(f64::INFINITY, |q| q.start);
        let cand = if p.r > 0.0 {
            (-p.a / p.r).clamp(lo, hi)
        } else if p.a >= 0.0 {
            lo
        } else {
            hi
        };
        if !cand.is_finite() {
            continue;
        }
        let v = p.value(cand);
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((cand, v));
        }
    }
    best.ok_or_else(|| Error::Unbounded("no finite minimiser".into()))
}
