//! Low-stretch spanning trees.
//!
//! Several candidate trees are built and the one with the smallest total
//! stretch, measured exactly, is returned: a maximum-conductance spanning
//! tree, a shortest-path tree from a central vertex, and trees from a
//! hierarchy of exponentially shifted clusterings.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::Graph;

use super::rooted::RootedForest;

#[derive(Debug, Clone)]
pub struct LowStretchTree {
    pub forest: RootedForest,
    pub stretch: Vec<f64>,
    pub total_stretch: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Lowest-id vertex of each component, in increasing order.
fn component_roots(g: &Graph<f64>) -> Vec<usize> {
    let (label, count) = g.components();
    let mut roots = vec![usize::MAX; count];
    for (u, &l) in label.iter().enumerate() {
        if roots[l] == usize::MAX {
            roots[l] = u;
        }
    }
    roots
}

fn max_conductance_tree(g: &Graph<f64>) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..g.m()).collect();
    ids.sort_by(|&a, &b| g.edge(b).c.partial_cmp(&g.edge(a).c).unwrap().then(a.cmp(&b)));
    let mut dsu = Dsu::new(g.n());
    ids.into_iter().filter(|&id| dsu.union(g.edge(id).u, g.edge(id).v)).collect()
}

/// Multi-source Dijkstra on resistances; returns `(owner, predecessor edge)`.
fn dijkstra(n: usize, adj: &[Vec<(usize, f64, usize)>], starts: &[(usize, f64)]) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut dist = vec![f64::INFINITY; n];
    let mut owner = vec![usize::MAX; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &(s, d) in starts {
        if d < dist[s] {
            dist[s] = d;
            owner[s] = s;
            heap.push(Key(d, s));
        }
    }
    let mut done = vec![false; n];
    while let Some(Key(d, u)) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for &(w, len, id) in &adj[u] {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                owner[w] = owner[u];
                pred[w] = Some(id);
                heap.push(Key(nd, w));
            }
        }
    }
    (owner, pred)
}

fn shortest_path_tree(g: &Graph<f64>) -> Vec<usize> {
    let n = g.n();
    let adj: Vec<Vec<(usize, f64, usize)>> =
        (0..n).map(|u| g.neighbors(u).iter().map(|&(w, id)| (w, 1.0 / g.edge(id).c, id)).collect()).collect();
    let degrees = g.weighted_degrees();
    let (label, count) = g.components();
    let mut centers = vec![usize::MAX; count];
    for u in 0..n {
        let l = label[u];
        if centers[l] == usize::MAX || degrees[u] > degrees[centers[l]] {
            centers[l] = u;
        }
    }
    let starts: Vec<(usize, f64)> = centers.iter().map(|&c| (c, 0.0)).collect();
    let (_, pred) = dijkstra(n, &adj, &starts);
    pred.into_iter().flatten().collect()
}

/// Repeated clustering with exponentially distributed start offsets, each
/// level contracting the clusters of the previous one.
fn shifted_cluster_tree(g: &Graph<f64>, beta: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.n();
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut k = n;
    let mut edges: Vec<(usize, usize, f64, usize)> =
        g.edges().iter().enumerate().map(|(id, e)| (e.u, e.v, 1.0 / e.c, id)).collect();
    while !edges.is_empty() {
        let mut lens: Vec<f64> = edges.iter().map(|e| e.2).collect();
        let mid = lens.len() / 2;
        lens.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
        let scale = lens[mid];
        let mut adj: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); k];
        for (i, &(a, b, len, _)) in edges.iter().enumerate() {
            adj[a].push((b, len, i));
            adj[b].push((a, len, i));
        }
        let shifts: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln() * scale / beta).collect();
        let top = shifts.iter().cloned().fold(0.0, f64::max);
        let starts: Vec<(usize, f64)> = (0..k).map(|v| (v, top - shifts[v])).collect();
        let (owner, pred) = dijkstra(k, &adj, &starts);
        for p in pred.iter().flatten() {
            tree.push(edges[*p].3);
        }
        let mut relabel = HashMap::new();
        let mut next = vec![0usize; k];
        for v in 0..k {
            let len = relabel.len();
            next[v] = *relabel.entry(owner[v]).or_insert(len);
        }
        let new_k = relabel.len();
        if new_k == k {
            // No contraction happened; fall back to joining along the
            // shortest remaining edges.
            let mut dsu = Dsu::new(k);
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.sort_by(|&a, &b| edges[a].2.partial_cmp(&edges[b].2).unwrap().then(a.cmp(&b)));
            for i in order {
                if dsu.union(edges[i].0, edges[i].1) {
                    tree.push(edges[i].3);
                }
            }
            break;
        }
        let mut best: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
        for &(a, b, len, id) in &edges {
            let (ca, cb) = (next[a], next[b]);
            if ca == cb {
                continue;
            }
            let key = (ca.min(cb), ca.max(cb));
            let entry = best.entry(key).or_insert((len, id));
            if len < entry.0 || (len == entry.0 && id < entry.1) {
                *entry = (len, id);
            }
        }
        let mut merged: Vec<(usize, usize, f64, usize)> =
            best.into_iter().map(|((a, b), (len, id))| (a, b, len, id)).collect();
        merged.sort_by_key(|e| e.3);
        edges = merged;
        k = new_k;
    }
    tree
}

fn evaluate(g: &Graph<f64>, ids: &[usize], roots: &[usize]) -> Option<LowStretchTree> {
    let forest = RootedForest::from_edges(g, ids, roots).ok()?;
    let stretch = forest.stretches(g);
    let total_stretch = stretch.iter().sum();
    Some(LowStretchTree { forest, stretch, total_stretch })
}

/// Spanning forest (one tree per component, rooted at the lowest id) with
/// small total stretch `sum_e c_e r_T(e)`.
pub fn low_stretch_tree(g: &Graph<f64>, seed: u64) -> Result<LowStretchTree> {
    let roots = component_roots(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = vec![max_conductance_tree(g), shortest_path_tree(g)];
    for beta in [0.15, 0.4, 1.0] {
        candidates.push(shifted_cluster_tree(g, beta, &mut rng));
    }
    let mut best: Option<LowStretchTree> = None;
    for ids in candidates {
        if let Some(t) = evaluate(g, &ids, &roots) {
            if best.as_ref().is_none_or(|b| t.total_stretch < b.total_stretch) {
                best = Some(t);
            }
        }
    }
    Ok(best.expect("the maximum-conductance tree always spans"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_of_a_tree_has_unit_stretch() {
        let g = Graph::from_pairs(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let t = low_stretch_tree(&g, 1).unwrap();
        assert_eq!(t.total_stretch, 4.0);
    }

    #[test]
    fn spans_every_component() {
        let g = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let t = low_stretch_tree(&g, 7).unwrap();
        assert_eq!(t.forest.roots(), &[0, 3]);
        assert_eq!(t.forest.edge_ids().len(), 4);
    }
}
