//! Accelerated proximal gradient descent preconditioned by a spectral
//! approximation `H` of the instance graph.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;

use super::iter::Oracle;

#[derive(Debug, Clone, Copy)]
pub struct ProxOptions {
    /// `q` with `L_G <= L_H <= q L_G`.
    pub kappa: f64,
    pub steps_factor: f64,
    /// Relative accuracy of the inner oracle.
    pub delta: f64,
    pub early_stop: bool,
}

#[derive(Debug, Clone)]
pub struct ProxOutcome {
    pub y: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    /// Best certified lower bound on the optimum seen (`-inf` if none).
    pub lower_bound: f64,
}

/// The instance on `h` whose energy at `y` is `Phi_x(y) - Phi_x(0)`, with
/// `Phi_x` the quadratic model of the energy around `x` in the `L_H` norm.
pub fn prox_instance(inst: &Instance<f64>, h: &Arc<Graph<f64>>, x: &[f64]) -> Result<Instance<f64>> {
    let g = inst.graph();
    let lg = g.laplacian_apply(x)?;
    let lh = h.laplacian_apply(x)?;
    let vwfs = inst
        .vwfs()
        .iter()
        .zip(lg.iter().zip(&lh))
        .map(|(f, (a, b))| f.reorigin(0.0, a - b))
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance::new_unchecked(h.clone(), vwfs, inst.lower().to_vec()))
}

/// Runs `ceil(steps_factor sqrt(kappa))` accelerated steps from 0, each
/// solving a proximal instance on `h` with `inner`, and returns the best
/// iterate. With `early_stop`, returns as soon as a lower bound derived from
/// strong convexity certifies `E(y) - E* <= (E(0) - E*) / 2`.
pub fn prox_agd(
    inst: &Instance<f64>,
    h: &Arc<Graph<f64>>,
    opts: ProxOptions,
    inner: &mut Oracle<'_>,
) -> Result<ProxOutcome> {
    let n = inst.n();
    if h.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.n() });
    }
    if !(opts.kappa >= 1.0) || !opts.kappa.is_finite() {
        return Err(Error::Config(format!("preconditioner quality must be a finite value >= 1, got {}", opts.kappa)));
    }
    let steps = ((opts.steps_factor * opts.kappa.sqrt()).ceil() as usize).max(1);
    let f0: f64 = inst.vwfs().iter().map(|f| f.eval_unchecked(0.0)).sum();
    let e0 = inst.energy_unchecked(&vec![0.0; n]);
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut best = (y.clone(), e0);
    let mut lower_bound = f64::NEG_INFINITY;
    let mut iterations = 0;
    for k in 0..steps {
        iterations += 1;
        let a = (k as f64 + 2.0) / 2.0;
        let tau = 1.0 / a;
        let x: Vec<f64> = y.iter().zip(&z).map(|(yi, zi)| (1.0 - tau) * yi + tau * zi).collect();
        let px = prox_instance(inst, h, &x)?;
        let q = inner(&px)?;
        let q = px.project_feasible(&q)?;
        for i in 0..n {
            z[i] += a * (q[i] - x[i]);
        }
        y = q;
        let ey = inst.energy_unchecked(&y);
        if ey < best.1 {
            best = (y.clone(), ey);
        }
        if opts.early_stop {
            let eq = px.energy_unchecked(&y);
            let phi0 = 0.5 * h.quadratic_form_unchecked(&x) - 0.5 * inst.graph().quadratic_form_unchecked(&x) + f0;
            let slack = opts.delta * eq.abs();
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let dist = h.quadratic_form_unchecked(&diff).max(0.0).sqrt();
            let lb = phi0 + eq - slack - 0.5 * (opts.kappa - 1.0) * (dist + (2.0 * slack).sqrt()).powi(2);
            if lb <= best.1 {
                lower_bound = lower_bound.max(lb);
            }
            if best.1 <= 0.5 * (e0 + lower_bound) {
                break;
            }
        }
    }
    Ok(ProxOutcome { y: best.0, energy: best.1, iterations, lower_bound })
}
