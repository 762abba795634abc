//! Canonical j-trees and the j-tree sparsifier.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::oracle::{pencil_bounds, PENCIL_MAX_VERTICES};

use super::forest::find_forest;
use super::rooted::RootedForest;
use super::spectral::spectral_sparsify_core;

/// Default vertex cap for the exact spectral certificate in
/// [`jtree_sparsify`].
pub const CERTIFY_MAX_VERTICES: usize = 1024;

/// A rooted forest (the envelope) plus a graph on its roots (the core).
#[derive(Debug, Clone)]
pub struct JTree {
    envelope: RootedForest,
    envelope_scale: f64,
    core: Vec<Edge<f64>>,
    kappa: f64,
    quality: f64,
    certified: bool,
}

impl JTree {
    pub fn n(&self) -> usize {
        self.envelope.n()
    }

    pub fn envelope(&self) -> &RootedForest {
        &self.envelope
    }

    /// Factor applied to the source conductances of envelope edges.
    pub fn envelope_scale(&self) -> f64 {
        self.envelope_scale
    }

    /// Core edges, with endpoints in the original vertex numbering.
    pub fn core_edges(&self) -> &[Edge<f64>] {
        &self.core
    }

    pub fn core_vertices(&self) -> &[usize] {
        self.envelope.roots()
    }

    /// Maximum local stretch of the envelope (at least 1).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Certified `q` with `L_G <= L_H <= q L_G`.
    pub fn quality(&self) -> f64 {
        self.quality
    }

    /// Whether `quality` comes from a dense eigenvalue computation rather
    /// than from the stretch bound.
    pub fn is_exactly_certified(&self) -> bool {
        self.certified
    }

    /// Envelope and core as one graph on the original vertex set.
    pub fn graph(&self) -> Graph<f64> {
        let mut edges: Vec<Edge<f64>> = self.envelope.as_graph(self.envelope_scale).edges().to_vec();
        edges.extend(self.core.iter().cloned());
        Graph::new(self.n(), edges).expect("j-tree edges are valid")
    }

    fn rescale(&mut self, factor: f64) {
        self.envelope_scale *= factor;
        for e in &mut self.core {
            e.c *= factor;
        }
    }
}

/// Moves every edge of `g` between different trees of `f` to the pair of
/// roots, merges parallel core edges, scales the envelope by `kappa` and the
/// whole graph by 10.
pub fn canonical_jtree(g: &Graph<f64>, f: &RootedForest, kappa: f64) -> Result<JTree> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: f.n() });
    }
    if !(kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be at least 1, got {kappa}")));
    }
    let mut core: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let (ru, rv) = (f.root_of(e.u), f.root_of(e.v));
        if ru != rv {
            *core.entry((ru.min(rv), ru.max(rv))).or_insert(0.0) += 10.0 * e.c;
        }
    }
    Ok(JTree {
        envelope: f.clone(),
        envelope_scale: 10.0 * kappa,
        core: core.into_iter().map(|((u, v), c)| Edge { u, v, c }).collect(),
        kappa,
        quality: 100.0 * kappa,
        certified: false,
    })
}

fn forest_jtree(g: &Graph<f64>) -> Result<JTree> {
    let (label, count) = g.components();
    let mut roots = vec![usize::MAX; count];
    for (u, &l) in label.iter().enumerate() {
        if roots[l] == usize::MAX {
            roots[l] = u;
        }
    }
    let ids: Vec<usize> = (0..g.m()).collect();
    let envelope = RootedForest::from_edges(g, &ids, &roots)?;
    Ok(JTree { envelope, envelope_scale: 1.0, core: Vec::new(), kappa: 1.0, quality: 1.0, certified: true })
}

/// J-tree preconditioner of the connected graph `g` with at most `j` core
/// vertices and a sparsified core. When `n <= CERTIFY_MAX_VERTICES` the
/// quality is replaced by the exact pencil ratio.
pub fn jtree_sparsify(g: &Graph<f64>, j: usize, seed: u64) -> Result<JTree> {
    jtree_sparsify_with(g, j, seed, CERTIFY_MAX_VERTICES)
}

pub fn jtree_sparsify_with(g: &Graph<f64>, j: usize, seed: u64, certify_max_vertices: usize) -> Result<JTree> {
    if g.is_forest() {
        return forest_jtree(g);
    }
    let forest = find_forest(g, j, seed)?;
    let kappa = forest.max_local_stretch.max(1.0);
    let mut h = canonical_jtree(g, &forest.forest, kappa)?;

    let roots = h.envelope.roots().to_vec();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &r) in roots.iter().enumerate() {
        local[r] = i;
    }
    let core_local =
        Graph::new(roots.len(), h.core.iter().map(|e| Edge { u: local[e.u], v: local[e.v], c: e.c }).collect())?;
    let sparse = spectral_sparsify_core(&core_local, seed.wrapping_add(1))?;
    h.core = sparse.graph.edges().iter().map(|e| Edge { u: roots[e.u], v: roots[e.v], c: e.c }).collect();
    h.quality *= sparse.quality;

    if g.n() <= certify_max_vertices.min(PENCIL_MAX_VERTICES) {
        let p = pencil_bounds(&h.graph(), g)?;
        if p.lambda_min > 0.0 && p.lambda_max.is_finite() {
            h.rescale(1.0 / p.lambda_min);
            h.quality = p.ratio() * (1.0 + 1e-9);
            h.certified = true;
        }
    }
    Ok(h)
}
