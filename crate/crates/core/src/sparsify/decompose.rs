//! Splitting a spanning tree into edge-weight-balanced pieces.

use std::collections::HashSet;

use crate::graph::Graph;

use super::rooted::RootedForest;

/// Cover of the vertex set by subtrees of `T` that pairwise share at most one
/// vertex, each sharing at most two vertices with the rest.
///
/// `assign[e]` names the piece(s) containing the endpoints of edge `e`
/// (`assign[e].1` is `None` when both endpoints are charged to one piece).
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    pub pieces: Vec<Vec<usize>>,
    pub assign: Vec<(usize, Option<usize>)>,
    pub boundary: Vec<usize>,
}

impl TreeDecomposition {
    /// `sum_{e : W_i in assign(e)} w(e)` for every piece.
    pub fn piece_weights(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.pieces.len()];
        for (e, &(p, q)) in self.assign.iter().enumerate() {
            out[p] += w[e];
            if let Some(q) = q {
                out[q] += w[e];
            }
        }
        out
    }
}

fn preorder(tree: &RootedForest) -> Vec<usize> {
    let n = tree.n();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &u in tree.order() {
        if let Some(p) = tree.parent(u) {
            children[p].push(u);
        }
    }
    let mut index = vec![0usize; n];
    let mut next = 0;
    let mut stack: Vec<usize> = tree.roots().iter().rev().cloned().collect();
    while let Some(u) = stack.pop() {
        index[u] = next;
        next += 1;
        stack.extend(children[u].iter().rev());
    }
    index
}

/// Decomposes the spanning tree `tree` of the connected graph `g` into at
/// most `j` pieces so that every piece with more than one vertex carries
/// weight at most `20 w(E) / j`.
pub fn decompose_tree(g: &Graph<f64>, tree: &RootedForest, w: &[f64], j: usize) -> TreeDecomposition {
    let n = g.n();
    let total: f64 = w.iter().sum();
    let whole =
        || TreeDecomposition { pieces: vec![(0..n).collect()], assign: vec![(0, None); g.m()], boundary: Vec::new() };
    if j <= 8 || total <= 0.0 || n <= 1 {
        return whole();
    }
    let tau = 8.0 * total / j as f64;
    let mut mass = vec![0.0; n];
    for (e, &we) in g.edges().iter().zip(w) {
        mass[e.u] += 0.5 * we;
        mass[e.v] += 0.5 * we;
    }

    let mut pending = mass.clone();
    let mut terminal = vec![false; n];
    for &u in tree.order().iter().rev() {
        if pending[u] >= tau {
            terminal[u] = true;
            pending[u] = 0.0;
        }
        if let Some(p) = tree.parent(u) {
            pending[p] += pending[u];
        }
    }

    let pre = preorder(tree);
    let mut marked: Vec<usize> = (0..n).filter(|&u| terminal[u]).collect();
    marked.sort_by_key(|&u| pre[u]);
    let mut closure: HashSet<usize> = marked.iter().cloned().collect();
    for pair in marked.windows(2) {
        if let Some(l) = tree.lca(pair[0], pair[1]) {
            closure.insert(l);
        }
    }
    for &u in &closure {
        terminal[u] = true;
    }
    if closure.is_empty() {
        return whole();
    }

    // Components of T minus the terminals.
    let mut comp = vec![usize::MAX; n];
    let mut comp_upper: Vec<Option<usize>> = Vec::new();
    let mut comp_members: Vec<Vec<usize>> = Vec::new();
    for &u in tree.order() {
        if terminal[u] {
            continue;
        }
        match tree.parent(u) {
            Some(p) if !terminal[p] => {
                comp[u] = comp[p];
                comp_members[comp[u]].push(u);
            }
            upper => {
                comp[u] = comp_members.len();
                comp_members.push(vec![u]);
                comp_upper.push(upper);
            }
        }
    }
    let ncomp = comp_members.len();
    let mut comp_lower: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut piece_of = vec![usize::MAX; n];
    for &u in tree.order() {
        if !terminal[u] {
            continue;
        }
        if let Some(p) = tree.parent(u) {
            if terminal[p] {
                pieces.push(vec![p, u]);
            } else {
                comp_lower[comp[p]].push(u);
            }
        }
    }
    debug_assert!(comp_lower.iter().all(|l| l.len() <= 1));

    // Components hanging below a terminal without reaching another one are
    // grouped per terminal with a mass cap of tau.
    let mut open_group: Vec<Option<(usize, f64)>> = vec![None; n];
    for c in 0..ncomp {
        let comp_mass: f64 = comp_members[c].iter().map(|&u| mass[u]).sum();
        if !comp_lower[c].is_empty() || comp_upper[c].is_none() {
            let mut verts = comp_members[c].clone();
            verts.extend(comp_upper[c]);
            verts.extend(comp_lower[c].iter().cloned());
            for &u in &comp_members[c] {
                piece_of[u] = pieces.len();
            }
            pieces.push(verts);
            continue;
        }
        let k = comp_upper[c].unwrap();
        let target = match open_group[k] {
            Some((idx, m)) if m + comp_mass <= tau => {
                open_group[k] = Some((idx, m + comp_mass));
                idx
            }
            _ => {
                open_group[k] = Some((pieces.len(), comp_mass));
                pieces.push(vec![k]);
                pieces.len() - 1
            }
        };
        pieces[target].extend(comp_members[c].iter().cloned());
        for &u in &comp_members[c] {
            piece_of[u] = target;
        }
    }
    let mut boundary: Vec<usize> = (0..n).filter(|&u| terminal[u]).collect();
    boundary.sort_unstable();
    for &k in &boundary {
        piece_of[k] = pieces.len();
        pieces.push(vec![k]);
    }
    let assign = g
        .edges()
        .iter()
        .map(|e| {
            let (p, q) = (piece_of[e.u], piece_of[e.v]);
            if p == q {
                (p, None)
            } else {
                (p, Some(q))
            }
        })
        .collect();
    for p in pieces.iter_mut() {
        p.sort_unstable();
    }
    TreeDecomposition { pieces, assign, boundary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> (Graph<f64>, RootedForest) {
        let pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::from_pairs(n, &pairs).unwrap();
        let ids: Vec<usize> = (0..n - 1).collect();
        let t = RootedForest::from_edges(&g, &ids, &[0]).unwrap();
        (g, t)
    }

    fn check(g: &Graph<f64>, d: &TreeDecomposition, w: &[f64], j: usize) {
        let total: f64 = w.iter().sum();
        assert!(d.pieces.len() <= j.max(1));
        for (p, weight) in d.pieces.iter().zip(d.piece_weights(w)) {
            if p.len() > 1 {
                assert!(weight <= 20.0 * total / j as f64 + 1e-9);
            }
        }
        for (e, &(p, q)) in g.edges().iter().zip(&d.assign) {
            let has = |i: usize, u: usize| d.pieces[i].binary_search(&u).is_ok();
            assert!(has(p, e.u) || has(p, e.v));
            if let Some(q) = q {
                assert!(has(q, e.u) || has(q, e.v));
            }
        }
    }

    #[test]
    fn small_j_is_one_piece() {
        let (g, t) = path(8);
        let w = vec![1.0; 7];
        for j in [1, 4] {
            let d = decompose_tree(&g, &t, &w, j);
            assert_eq!(d.pieces.len(), 1);
            check(&g, &d, &w, j);
        }
    }

    #[test]
    fn long_path_respects_bounds() {
        let (g, t) = path(500);
        let w = vec![1.0; 499];
        for j in [10, 40, 100] {
            let d = decompose_tree(&g, &t, &w, j);
            assert!(d.pieces.len() > 1);
            check(&g, &d, &w, j);
        }
    }
}
