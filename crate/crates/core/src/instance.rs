//! Generalized flow diffusion instances and their energy.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::vwf::{compress, Vwf};

/// Points below a lower bound by at most this much are clamped onto it.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// `min_{x >= b} x^T L x / 2 + sum_u f_u(x_u)`.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    graph: Arc<Graph<T>>,
    vwfs: Vec<Vwf<T>>,
    lower: Vec<T>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(graph: Arc<Graph<T>>, vwfs: Vec<Vwf<T>>, lower: Vec<T>) -> Result<Self> {
        let n = graph.n();
        if vwfs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: vwfs.len() });
        }
        if lower.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: lower.len() });
        }
        for (u, (f, &b)) in vwfs.iter().zip(&lower).enumerate() {
            if !(b <= T::zero()) {
                return Err(Error::InvalidVwf(format!("vertex {u}: lower bound {b} is positive")));
            }
            if f.domain_start() > b {
                return Err(Error::InvalidVwf(format!(
                    "vertex {u}: domain starts at {} above the lower bound {b}",
                    f.domain_start()
                )));
            }
            f.validate_standard().map_err(|e| Error::InvalidVwf(format!("vertex {u}: {e}")))?;
        }
        Ok(Instance { graph, vwfs, lower })
    }

    pub(crate) fn new_unchecked(graph: Arc<Graph<T>>, vwfs: Vec<Vwf<T>>, lower: Vec<T>) -> Self {
        debug_assert_eq!(vwfs.len(), graph.n());
        Instance { graph, vwfs, lower }
    }

    /// `f_u(x) = d_u x` with `b = 0`.
    pub fn l2(graph: Arc<Graph<T>>, demand: &[T]) -> Result<Self> {
        let n = graph.n();
        if demand.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: demand.len() });
        }
        if let Some(u) = demand.iter().position(|d| !d.is_finite()) {
            return Err(Error::Domain(format!("demand at vertex {u} is not finite")));
        }
        let (label, count) = graph.components();
        let mut sums = vec![T::zero(); count];
        for (u, &d) in demand.iter().enumerate() {
            sums[label[u]] = sums[label[u]] + d;
        }
        let scale: T = demand.iter().map(|d| d.abs()).sum();
        let tol = T::lit(1e-12) * T::one().max(scale);
        if let Some(k) = sums.iter().position(|&s| s < -tol) {
            return Err(Error::Unbounded(format!(
                "demand sums to {} on the component of vertex {}; no sink capacity to absorb it",
                sums[k],
                label.iter().position(|&l| l == k).unwrap()
            )));
        }
        let vwfs = demand.iter().map(|&d| Vwf::linear(T::zero(), d)).collect();
        Ok(Instance { graph, vwfs, lower: vec![T::zero(); n] })
    }

    pub fn graph(&self) -> &Graph<T> {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph<T>> {
        &self.graph
    }

    pub fn vwfs(&self) -> &[Vwf<T>] {
        &self.vwfs
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `|f_1| + ... + |f_n| + m`.
    pub fn size(&self) -> usize {
        self.vwfs.iter().map(|f| f.len()).sum::<usize>() + self.graph.m()
    }

    /// Checks `x >= b` up to `FEASIBILITY_TOL` and returns the clamped point.
    pub fn project_feasible(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let tol = T::lit(FEASIBILITY_TOL);
        let mut worst: Option<(usize, T)> = None;
        for (u, (&xu, &b)) in x.iter().zip(&self.lower).enumerate() {
            if !xu.is_finite() {
                return Err(Error::Domain(format!("potential at vertex {u} is not finite")));
            }
            let gap = b - xu;
            if gap > tol * T::one().max(b.abs()) && worst.is_none_or(|(_, w)| gap > w) {
                worst = Some((u, gap));
            }
        }
        if let Some((vertex, gap)) = worst {
            return Err(Error::Infeasible { vertex, violation: gap.as_f64() });
        }
        Ok(x.iter().zip(&self.lower).map(|(&xu, &b)| xu.max(b)).collect())
    }

    pub fn energy(&self, x: &[T]) -> Result<T> {
        let x = self.project_feasible(x)?;
        Ok(self.energy_unchecked(&x))
    }

    /// Energy of a point already known to be feasible.
    pub fn energy_unchecked(&self, x: &[T]) -> T {
        let quad = T::half() * self.graph.quadratic_form_unchecked(x);
        let sep: T = self.vwfs.iter().zip(x).map(|(f, &xu)| f.eval_unchecked(xu)).sum();
        quad + sep
    }

    /// `L x + f'(x)`.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let x = self.project_feasible(x)?;
        let mut g = vec![T::zero(); self.n()];
        self.graph.laplacian_apply_into(&x, &mut g);
        for (u, f) in self.vwfs.iter().enumerate() {
            g[u] = g[u] + f.slope_unchecked(x[u]);
        }
        Ok(g)
    }

    /// Instance whose energy at `y` is `E(x + y) - E(x)`.
    pub fn residual(&self, x: &[T]) -> Result<Instance<T>> {
        let x = self.project_feasible(x)?;
        let lx = self.graph.laplacian_apply(&x)?;
        let vwfs =
            self.vwfs.iter().zip(&x).zip(&lx).map(|((f, &xu), &g)| f.reorigin(xu, g)).collect::<Result<Vec<_>>>()?;
        let lower = self.lower.iter().zip(&x).map(|(&b, &xu)| (b - xu).min(T::zero())).collect();
        Ok(Instance { graph: self.graph.clone(), vwfs, lower })
    }

    /// Same instance with every VWF compressed.
    pub fn compressed(&self) -> Result<Instance<T>> {
        let vwfs = self.vwfs.iter().map(compress).collect::<Result<Vec<_>>>()?;
        Ok(Instance { graph: self.graph.clone(), vwfs, lower: self.lower.clone() })
    }

    /// Restriction to the given vertices (with the induced subgraph).
    pub fn restrict(&self, vertices: &[usize]) -> Instance<T> {
        let graph = Arc::new(self.graph.induced(vertices));
        let vwfs = vertices.iter().map(|&u| self.vwfs[u].clone()).collect();
        let lower = vertices.iter().map(|&u| self.lower[u]).collect();
        Instance { graph, vwfs, lower }
    }

    pub fn cast<U: Scalar>(&self) -> Instance<U> {
        Instance {
            graph: Arc::new(self.graph.cast()),
            vwfs: self.vwfs.iter().map(|f| f.cast()).collect(),
            lower: self.lower.iter().map(|b| U::lit(b.as_f64())).collect(),
        }
    }
}

/// Whether `energy <= optimum / kappa`, i.e. `x` is a `kappa`-approximate
/// solution (energies are non-positive).
pub fn is_kappa_approx<T: Scalar>(energy: T, optimum: T, kappa: T) -> bool {
    energy <= optimum / kappa
}
