//! Projected Newton method for small instances.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::instance::Instance;

pub const QP_MAX_VERTICES: usize = 500;

const KKT_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 500;
const ARMIJO: f64 = 1e-4;
const STALL_LIMIT: usize = 5;

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
}

/// Minimises the energy to KKT residual `1e-12` (relative), starting from 0.
pub fn qp_solve_exact(inst: &Instance<f64>) -> Result<QpSolution> {
    qp_solve_exact_from(inst, &vec![0.0; inst.n()])
}

pub fn qp_solve_exact_from(inst: &Instance<f64>, x0: &[f64]) -> Result<QpSolution> {
    let n = inst.n();
    if n > QP_MAX_VERTICES {
        return Err(Error::Config(format!("exact solver is limited to {QP_MAX_VERTICES} vertices, got {n}")));
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    let g = inst.graph();
    let b = inst.lower();
    let f = inst.vwfs();
    let mut x: Vec<f64> = x0.iter().zip(b).map(|(&xi, &bi)| xi.max(bi)).collect();
    let mut energy = inst.energy_unchecked(&x);
    let mut grad = vec![0.0; n];
    let wdeg = g.weighted_degrees();
    let max_wdeg = wdeg.iter().cloned().fold(0.0, f64::max);
    let mut stalled = 0;

    for iter in 0..MAX_ITERS {
        g.laplacian_apply_into(&x, &mut grad);
        let mut slope_scale: f64 = 0.0;
        for u in 0..n {
            let s = f[u].slope_unchecked(x[u]);
            slope_scale = slope_scale.max(s.abs());
            grad[u] += s;
        }
        let x_scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(x_scale < 1e150) || !energy.is_finite() {
            return Err(Error::Unbounded("iterates diverge; the energy is unbounded below".into()));
        }
        let scale = 1.0 + slope_scale + 2.0 * max_wdeg * x_scale;
        let residual = kkt_residual(&x, b, &grad);
        if residual <= KKT_TOL * scale {
            return Ok(QpSolution { x, energy, iterations: iter, kkt_residual: residual });
        }

        let eps_active = residual.min(1e-8);
        let mut free: Vec<usize> =
            (0..n).filter(|&u| !(x[u] <= b[u] + eps_active * (1.0 + b[u].abs()) && grad[u] > 0.0)).collect();
        let mut dir = newton_direction(inst, &x, &grad, &free)?;
        // Nearly active coordinates take a scaled gradient step, which the
        // projection clamps onto the bound.
        for u in 0..n {
            if x[u] > b[u] && !free.contains(&u) {
                dir[u] = -grad[u] / (wdeg[u] + f[u].curvature_unchecked(x[u])).max(f64::MIN_POSITIVE);
            }
        }
        let mut accepted = projected_search(inst, &x, energy, &grad, &dir, 1.0);
        if !matches!(accepted, Some((_, e)) if e < energy) {
            // Projection can destroy descent; fall back to a feasible step
            // along the reduced direction, fixing coordinates that block it.
            while !free.is_empty() {
                let dir = newton_direction(inst, &x, &grad, &free)?;
                let blocked: Vec<usize> = free.iter().copied().filter(|&u| dir[u] < 0.0 && x[u] <= b[u]).collect();
                if !blocked.is_empty() {
                    free.retain(|u| !blocked.contains(u));
                    continue;
                }
                let reach =
                    free.iter().filter(|&&u| dir[u] < 0.0).map(|&u| (x[u] - b[u]) / -dir[u]).fold(1.0f64, f64::min);
                if let Some(found) = projected_search(inst, &x, energy, &grad, &dir, reach) {
                    if found.1 < energy {
                        accepted = Some(found);
                    }
                }
                break;
            }
        }
        match accepted {
            Some((cand, e)) => {
                let moved = cand.iter().zip(&x).any(|(a, c)| a != c);
                stalled = if e < energy { 0 } else { stalled + 1 };
                x = cand;
                energy = e;
                // The energy no longer decreases in floating point: the
                // residual is limited by rounding in the slopes.
                if !moved || stalled >= STALL_LIMIT {
                    return Ok(QpSolution { x, energy, iterations: iter + 1, kkt_residual: residual });
                }
            }
            None => {
                // No representable descent left along the Newton path.
                return Ok(QpSolution { x, energy, iterations: iter + 1, kkt_residual: residual });
            }
        }
    }
    Err(Error::Numerical(format!("exact solver did not converge in {MAX_ITERS} iterations")))
}

/// Backtracking from `step` along `dir`, projected onto the bounds.
fn projected_search(
    inst: &Instance<f64>,
    x: &[f64],
    energy: f64,
    grad: &[f64],
    dir: &[f64],
    mut step: f64,
) -> Option<(Vec<f64>, f64)> {
    let b = inst.lower();
    for _ in 0..80 {
        let cand: Vec<f64> = (0..x.len()).map(|u| (x[u] + step * dir[u]).max(b[u])).collect();
        let e = inst.energy_unchecked(&cand);
        let lin: f64 = (0..x.len()).map(|u| grad[u] * (cand[u] - x[u])).sum();
        if e <= energy + ARMIJO * lin && e <= energy {
            return Some((cand, e));
        }
        step *= 0.5;
    }
    None
}

fn kkt_residual(x: &[f64], b: &[f64], grad: &[f64]) -> f64 {
    x.iter()
        .zip(b)
        .zip(grad)
        .map(|((&xi, &bi), &gi)| if xi <= bi { (-gi).max(0.0) } else { gi.abs() })
        .fold(0.0, f64::max)
}

fn newton_direction(inst: &Instance<f64>, x: &[f64], grad: &[f64], free: &[usize]) -> Result<Vec<f64>> {
    let n = inst.n();
    let k = free.len();
    let mut dir = vec![0.0; n];
    if k == 0 {
        return Ok(dir);
    }
    let mut local = vec![usize::MAX; n];
    for (i, &u) in free.iter().enumerate() {
        local[u] = i;
    }
    let mut h = DMatrix::<f64>::zeros(k, k);
    for e in inst.graph().edges() {
        let (i, j) = (local[e.u], local[e.v]);
        if i != usize::MAX {
            h[(i, i)] += e.c;
        }
        if j != usize::MAX {
            h[(j, j)] += e.c;
        }
        if i != usize::MAX && j != usize::MAX {
            h[(i, j)] -= e.c;
            h[(j, i)] -= e.c;
        }
    }
    for (i, &u) in free.iter().enumerate() {
        h[(i, i)] += inst.vwfs()[u].curvature_unchecked(x[u]);
    }
    let rhs = DVector::from_iterator(k, free.iter().map(|&u| -grad[u]));
    let diag_max = (0..k).map(|i| h[(i, i)]).fold(0.0f64, f64::max);
    let mut shift = 0.0;
    for _ in 0..40 {
        let mut hs = h.clone();
        for i in 0..k {
            hs[(i, i)] += shift;
        }
        if let Some(ch) = hs.cholesky() {
            let d = ch.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                for (i, &u) in free.iter().enumerate() {
                    dir[u] = d[i];
                }
                return Ok(dir);
            }
        }
        shift = if shift == 0.0 { 1e-13 * (1.0 + diag_max) } else { shift * 10.0 };
    }
    Err(Error::Numerical("Newton system could not be factorised".into()))
}
