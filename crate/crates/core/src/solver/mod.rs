//! The solver stack: iterative refinement around a recursive
//! preconditioned oracle.

mod iter;
mod jtree_solve;
mod prox;
mod recursive;

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;
use crate::sparsify::CERTIFY_MAX_VERTICES;

pub use iter::{iter_refine, iter_refine_with, refinement_steps, Oracle, Refinement};
pub use jtree_solve::{jtree_solve, JTreeSolution, CORE_ALPHA};
pub use prox::{prox_agd, prox_instance, ProxOptions, ProxOutcome};

use recursive::Solver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaPolicy {
    /// `clamp(log2(n)^4, 16, m)`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub kappa: KappaPolicy,
    pub j_override: Option<usize>,
    pub j_constant: f64,
    pub base_case_edges: usize,
    pub inner_delta: f64,
    pub agd_steps_factor: f64,
    pub rng_seed: u64,
    pub max_recursion_depth: usize,
    /// Stop refinement and acceleration loops once their guarantee is
    /// certified rather than after the full step count.
    pub early_stop: bool,
    /// Largest graph whose preconditioner quality is computed exactly.
    pub certify_max_vertices: usize,
    /// Wall-clock budget for one top-level solve.
    pub time_limit: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kappa: KappaPolicy::Auto,
            j_override: None,
            j_constant: 1.0,
            base_case_edges: 64,
            inner_delta: 1e-10,
            agd_steps_factor: 10.0,
            rng_seed: 0,
            max_recursion_depth: 8,
            early_stop: true,
            certify_max_vertices: CERTIFY_MAX_VERTICES,
            time_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let KappaPolicy::Fixed(k) = self.kappa {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::Config(format!("kappa must be a finite value >= 1, got {k}")));
            }
        }
        if !(self.inner_delta > 0.0 && self.inner_delta < 1.0) {
            return Err(Error::Config(format!("inner_delta must lie in (0, 1), got {}", self.inner_delta)));
        }
        if !(self.agd_steps_factor > 0.0) || !(self.j_constant > 0.0) {
            return Err(Error::Config("step and j constants must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelStats {
    pub oracle_calls: usize,
    pub base_solves: usize,
    pub sparsifier_builds: usize,
    pub cache_hits: usize,
    pub max_quality: f64,
    pub agd_iterations: usize,
    pub jtree_solves: usize,
    pub eliminated_vertices: usize,
    pub core_refinements: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Indexed by recursion depth.
    pub levels: Vec<LevelStats>,
    /// Energy before refinement and after every top-level step.
    pub energies: Vec<f64>,
    pub refinement_steps: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub energy: f64,
    pub stats: SolveStats,
}

#[derive(Debug, Clone)]
pub struct Diffusion {
    pub x: Vec<f64>,
    pub flow: Vec<f64>,
    pub energy: f64,
    pub stats: SolveStats,
}

/// A 2-approximate optimal potential from a single call of the recursive
/// oracle.
pub fn recursive_approx_diffusion(inst: &Instance<f64>, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let started = Instant::now();
    let mut solver = Solver::new(cfg);
    let x = solver.solve(inst, 0)?;
    let x = inst.project_feasible(&x)?;
    let energy = inst.energy_unchecked(&x);
    let mut stats = solver.stats;
    stats.energies = vec![energy];
    stats.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(Solution { x, energy, stats })
}

/// A `(1 + eps)`-approximate optimal potential of a general instance.
pub fn solve(inst: &Instance<f64>, eps: f64, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let started = Instant::now();
    let mut solver = Solver::new(cfg);
    let refined = iter_refine_with(inst, eps, 2.0, cfg.early_stop, &mut |r: &Instance<f64>| solver.solve(r, 0))?;
    let mut stats = solver.stats;
    stats.energies = refined.energies;
    stats.refinement_steps = refined.steps;
    stats.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(Solution { x: refined.x, energy: refined.energy, stats })
}

/// Flow diffusion with demand `d = t - s`: potentials within `1 + eps` of
/// optimal and the flow they induce.
pub fn l2_diffusion(g: &Arc<Graph<f64>>, d: &[f64], eps: f64, cfg: &SolverConfig) -> Result<Diffusion> {
    let inst = Instance::l2(g.clone(), d)?;
    let sol = solve(&inst, eps, cfg)?;
    let flow = g.potential_flow(&sol.x)?;
    Ok(Diffusion { x: sol.x, flow, energy: sol.energy, stats: sol.stats })
}
