//! The recursive preconditioned solver.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;
use crate::oracle::{qp_solve_exact, QP_MAX_VERTICES};
use crate::sparsify::jtree_sparsify_with;

use super::jtree_solve::jtree_solve;
use super::prox::{prox_agd, ProxOptions};
use super::{KappaPolicy, LevelStats, SolveStats, SolverConfig};

struct Preconditioner {
    graph: Arc<Graph<f64>>,
    h: Arc<Graph<f64>>,
    quality: f64,
}

/// Solver state shared across one top-level solve: configuration,
/// statistics and a cache of preconditioners keyed by graph contents.
pub(crate) struct Solver<'c> {
    cfg: &'c SolverConfig,
    cache: HashMap<u64, Vec<Preconditioner>>,
    deadline: Option<Instant>,
    pub(crate) stats: SolveStats,
}

fn graph_key(g: &Graph<f64>) -> u64 {
    let mut h = DefaultHasher::new();
    g.n().hash(&mut h);
    for e in g.edges() {
        (e.u, e.v, e.c.to_bits()).hash(&mut h);
    }
    h.finish()
}

fn same_graph(a: &Graph<f64>, b: &Graph<f64>) -> bool {
    a.n() == b.n() && a.edges() == b.edges()
}

impl<'c> Solver<'c> {
    pub(crate) fn new(cfg: &'c SolverConfig) -> Self {
        let deadline = cfg.time_limit.map(|t| Instant::now() + t);
        Solver { cfg, cache: HashMap::new(), deadline, stats: SolveStats::default() }
    }

    fn level(&mut self, depth: usize) -> &mut LevelStats {
        if self.stats.levels.len() <= depth {
            self.stats.levels.resize(depth + 1, LevelStats::default());
        }
        &mut self.stats.levels[depth]
    }

    /// `(kappa, j)` used to build the preconditioner of `g`.
    pub(crate) fn parameters(&self, g: &Graph<f64>) -> (f64, usize) {
        let n = g.n().max(2) as f64;
        let m = g.m().max(1) as f64;
        let log_n = n.log2();
        let kappa = match self.cfg.kappa {
            KappaPolicy::Auto => log_n.powi(4).max(16.0).min(m),
            KappaPolicy::Fixed(k) => k,
        };
        let j = match self.cfg.j_override {
            Some(j) => j,
            None => (self.cfg.j_constant * m * log_n * log_n.log2().max(1.0) / kappa).ceil() as usize,
        };
        (kappa, j.max(10))
    }

    fn preconditioner(&mut self, g: &Arc<Graph<f64>>, depth: usize) -> Result<(Arc<Graph<f64>>, f64)> {
        let key = graph_key(g);
        if let Some(list) = self.cache.get(&key) {
            if let Some(p) = list.iter().find(|p| Arc::ptr_eq(&p.graph, g) || same_graph(&p.graph, g)) {
                let out = (p.h.clone(), p.quality);
                self.level(depth).cache_hits += 1;
                return Ok(out);
            }
        }
        let (_, j) = self.parameters(g);
        let seed = self.cfg.rng_seed ^ key;
        let tree = jtree_sparsify_with(g, j, seed, self.cfg.certify_max_vertices)?;
        let h = Arc::new(tree.graph());
        let quality = tree.quality();
        let level = self.level(depth);
        level.sparsifier_builds += 1;
        level.max_quality = level.max_quality.max(quality);
        self.cache.entry(key).or_default().push(Preconditioner { graph: g.clone(), h: h.clone(), quality });
        Ok((h, quality))
    }

    /// A 2-approximate optimal potential of `inst`.
    pub(crate) fn solve(&mut self, inst: &Instance<f64>, depth: usize) -> Result<Vec<f64>> {
        if depth > self.cfg.max_recursion_depth {
            return Err(Error::Numerical(format!(
                "recursion depth {depth} exceeds the limit {}; kappa and j do not shrink the problem",
                self.cfg.max_recursion_depth
            )));
        }
        let started = Instant::now();
        if let (Some(deadline), Some(limit)) = (self.deadline, self.cfg.time_limit) {
            if started >= deadline {
                return Err(Error::TimeLimit { limit_ms: limit.as_millis() });
            }
        }
        self.level(depth).oracle_calls += 1;
        let g = inst.graph();
        let (label, count) = g.components();
        let result = if count > 1 {
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); count];
            for (u, &l) in label.iter().enumerate() {
                groups[l].push(u);
            }
            let mut x = vec![0.0; inst.n()];
            for verts in groups {
                let sub = inst.restrict(&verts);
                let xs = self.solve(&sub, depth)?;
                for (&u, v) in verts.iter().zip(xs) {
                    x[u] = v;
                }
            }
            Ok(x)
        } else if g.m() <= self.cfg.base_case_edges && inst.n() <= QP_MAX_VERTICES {
            self.level(depth).base_solves += 1;
            Ok(qp_solve_exact(inst)?.x)
        } else {
            self.solve_preconditioned(inst, depth)
        };
        self.level(depth).wall_ms += started.elapsed().as_secs_f64() * 1e3;
        result
    }

    fn solve_preconditioned(&mut self, inst: &Instance<f64>, depth: usize) -> Result<Vec<f64>> {
        let (h, quality) = self.preconditioner(inst.graph_arc(), depth)?;
        let opts = ProxOptions {
            kappa: quality,
            steps_factor: self.cfg.agd_steps_factor,
            delta: self.cfg.inner_delta,
            early_stop: self.cfg.early_stop,
        };
        let delta = self.cfg.inner_delta;
        let out = prox_agd(inst, &h, opts, &mut |px: &Instance<f64>| {
            let sol = jtree_solve(px, delta, &mut |core: &Instance<f64>| self.solve(core, depth + 1))?;
            let level = self.level(depth);
            level.jtree_solves += 1;
            level.eliminated_vertices += sol.eliminated;
            level.core_refinements += sol.refinement_steps;
            Ok(sol.x)
        })?;
        self.level(depth).agd_iterations += out.iterations;
        Ok(out.y)
    }
}
