use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const PENCIL_MAX_VERTICES: usize = 2000;

/// Extreme generalised eigenvalues of `(L_H, L_G)` on the complement of the
/// all-ones vector: `lambda_min L_G <= L_H <= lambda_max L_G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl PencilBounds {
    pub fn ratio(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }
}

fn grounded(g: &Graph<f64>) -> DMatrix<f64> {
    let k = g.n() - 1;
    let mut l = DMatrix::<f64>::zeros(k, k);
    for e in g.edges() {
        if e.u < k {
            l[(e.u, e.u)] += e.c;
        }
        if e.v < k {
            l[(e.v, e.v)] += e.c;
        }
        if e.u < k && e.v < k {
            l[(e.u, e.v)] -= e.c;
            l[(e.v, e.u)] -= e.c;
        }
    }
    l
}

/// Dense computation; `g` must be connected. Grounding the last vertex
/// restricts both forms to a complement of the shared kernel.
pub fn pencil_bounds(h: &Graph<f64>, g: &Graph<f64>) -> Result<PencilBounds> {
    let n = g.n();
    if h.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.n() });
    }
    if n > PENCIL_MAX_VERTICES {
        return Err(Error::Config(format!("dense pencil is limited to {PENCIL_MAX_VERTICES} vertices, got {n}")));
    }
    if n <= 1 {
        return Ok(PencilBounds { lambda_min: 1.0, lambda_max: 1.0 });
    }
    if !g.is_connected() {
        return Err(Error::Domain("reference graph of the pencil is disconnected".into()));
    }
    let chol =
        grounded(g).cholesky().ok_or_else(|| Error::Numerical("grounded Laplacian is not positive definite".into()))?;
    let lower = chol.l();
    let a = grounded(h);
    let y = lower.solve_lower_triangular(&a).ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let mut c = lower
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let k = c.nrows();
    for i in 0..k {
        for j in (i + 1)..k {
            let s = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = s;
            c[(j, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(c).eigenvalues;
    let lambda_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(PencilBounds { lambda_min, lambda_max })
}
