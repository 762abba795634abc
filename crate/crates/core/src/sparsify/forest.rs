//! Rooted spanning forests with small maximum local stretch.

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::decompose::decompose_tree;
use super::lsst::low_stretch_tree;
use super::rooted::RootedForest;

#[derive(Debug, Clone)]
pub struct SpanningForest {
    pub forest: RootedForest,
    /// Maximum over components of the total local stretch.
    pub max_local_stretch: f64,
    /// Total stretch of the spanning tree the forest was cut from.
    pub tree_stretch: f64,
}

/// Total local stretch of every component of `f`: the resistance of the
/// forest path of each edge inside the component, times the edge's
/// conductance, summed over all edges.
pub fn local_stretches(g: &Graph<f64>, f: &RootedForest) -> Vec<f64> {
    let mut out = vec![0.0; f.roots().len()];
    for e in g.edges() {
        let (cu, cv) = (f.component(e.u), f.component(e.v));
        if cu == cv {
            out[cu] += e.c * f.path_resistance(e.u, e.v).unwrap_or(0.0);
        } else {
            out[cu] += e.c * f.root_distance(e.u);
            out[cv] += e.c * f.root_distance(e.v);
        }
    }
    out
}

/// Cuts a low-stretch spanning tree of the connected graph `g` into at most
/// `j` trees rooted at the boundary vertices of a balanced decomposition.
pub fn find_forest(g: &Graph<f64>, j: usize, seed: u64) -> Result<SpanningForest> {
    if j < 10 {
        return Err(Error::Config(format!("find_forest needs j >= 10, got {j}")));
    }
    if !g.is_connected() {
        return Err(Error::Domain("find_forest needs a connected graph".into()));
    }
    let lsst = low_stretch_tree(g, seed)?;
    let tree = &lsst.forest;
    let dec = decompose_tree(g, tree, &lsst.stretch, j + 1);
    let roots = if dec.boundary.is_empty() { tree.roots().to_vec() } else { dec.boundary.clone() };
    let mut is_root = vec![false; g.n()];
    for &r in &roots {
        is_root[r] = true;
    }

    let congestion = tree.congestion(g);
    let mut removed = vec![false; g.m()];
    for piece in &dec.pieces {
        let ends: Vec<usize> = piece.iter().cloned().filter(|&u| is_root[u]).collect();
        if ends.len() < 2 {
            continue;
        }
        debug_assert_eq!(ends.len(), 2);
        let (a, b) = (ends[0], ends[1]);
        let top = tree.lca(a, b).expect("tree is spanning");
        let mut best: Option<(f64, usize)> = None;
        for u in tree.climb(a, top).into_iter().chain(tree.climb(b, top)) {
            let id = tree.parent_edge(u).expect("non-root vertex");
            let key = (congestion[u], id);
            if best.is_none_or(|(c, i)| key.0 < c || (key.0 == c && key.1 < i)) {
                best = Some(key);
            }
        }
        if let Some((_, id)) = best {
            removed[id] = true;
        }
    }
    let kept: Vec<usize> = tree.edge_ids().into_iter().filter(|&id| !removed[id]).collect();
    let forest = RootedForest::from_edges(g, &kept, &roots)?;
    let max_local_stretch = local_stretches(g, &forest).into_iter().fold(0.0, f64::max);
    Ok(SpanningForest { forest, max_local_stretch, tree_stretch: lsst.total_stretch })
}
