//! Iterative refinement on residual instances.

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Oracle returning an approximately optimal potential of an instance.
pub type Oracle<'a> = dyn FnMut(&Instance<f64>) -> Result<Vec<f64>> + 'a;

#[derive(Debug, Clone)]
pub struct Refinement {
    pub x: Vec<f64>,
    pub energy: f64,
    /// Energy before the first step and after every step.
    pub energies: Vec<f64>,
    pub steps: usize,
}

/// Number of refinement steps `ceil(alpha ln(1/eps))`.
pub fn refinement_steps(eps: f64, alpha: f64) -> usize {
    ((alpha * (1.0 / eps).ln()).ceil() as usize).max(1)
}

/// Refines from `x = 0` with an `alpha`-approximate oracle until the
/// energy is within a factor `1 + eps` of optimal. Stops early once the last
/// improvement certifies that bound.
pub fn iter_refine(inst: &Instance<f64>, eps: f64, alpha: f64, oracle: &mut Oracle<'_>) -> Result<Refinement> {
    iter_refine_with(inst, eps, alpha, true, oracle)
}

pub fn iter_refine_with(
    inst: &Instance<f64>,
    eps: f64,
    alpha: f64,
    early_stop: bool,
    oracle: &mut Oracle<'_>,
) -> Result<Refinement> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::Config(format!("oracle quality must be at least 1, got {alpha}")));
    }
    let n = inst.n();
    let lower = inst.lower();
    let mut x = vec![0.0; n];
    let mut energy = inst.energy_unchecked(&x);
    let mut energies = vec![energy];
    let total = refinement_steps(eps, alpha);
    let mut steps = 0;
    for _ in 0..total {
        steps += 1;
        let residual = inst.residual(&x)?;
        let delta = oracle(&residual)?;
        let delta = residual.project_feasible(&delta)?;
        let gain = residual.energy_unchecked(&delta);
        if gain < 0.0 {
            let cand: Vec<f64> = x.iter().zip(&delta).zip(lower).map(|((a, d), &b)| (a + d).max(b)).collect();
            let e = inst.energy_unchecked(&cand);
            if e <= energy {
                x = cand;
                energy = e;
            }
        }
        energies.push(energy);
        if early_stop && (alpha - 1.0) * (-gain).max(0.0) <= eps * energy.abs() {
            break;
        }
    }
    Ok(Refinement { x, energy, energies, steps })
}
