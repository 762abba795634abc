//! Rooted spanning forests with path-resistance queries.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

#[derive(Debug, Clone)]
pub struct RootedForest {
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    parent_c: Vec<f64>,
    roots: Vec<usize>,
    component: Vec<usize>,
    order: Vec<usize>,
    depth: Vec<u32>,
    dist: Vec<f64>,
    up: Vec<Vec<u32>>,
}

impl RootedForest {
    /// Orients the subgraph formed by `edge_ids` away from `roots`. Every
    /// vertex must be reachable from exactly one root and the edges must be
    /// acyclic.
    pub fn from_edges(g: &Graph<f64>, edge_ids: &[usize], roots: &[usize]) -> Result<Self> {
        let n = g.n();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &id in edge_ids {
            let e = g.edge(id);
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut parent_c = vec![0.0; n];
        let mut component = vec![usize::MAX; n];
        let mut depth = vec![0u32; n];
        let mut dist = vec![0.0; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for (k, &r) in roots.iter().enumerate() {
            if component[r] != usize::MAX {
                return Err(Error::InvalidGraph(format!("root {r} is reachable from another root")));
            }
            component[r] = k;
            queue.push_back(r);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &(w, id) in &adj[u] {
                    if parent_edge[u] == Some(id) {
                        continue;
                    }
                    if component[w] != usize::MAX {
                        return Err(Error::InvalidGraph(format!("forest edges contain a cycle through {w}")));
                    }
                    component[w] = k;
                    parent[w] = Some(u);
                    parent_edge[w] = Some(id);
                    parent_c[w] = g.edge(id).c;
                    depth[w] = depth[u] + 1;
                    dist[w] = dist[u] + 1.0 / g.edge(id).c;
                    queue.push_back(w);
                }
            }
        }
        if let Some(u) = component.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidGraph(format!("vertex {u} is not reached by any root")));
        }
        let mut forest = RootedForest {
            parent,
            parent_edge,
            parent_c,
            roots: roots.to_vec(),
            component,
            order,
            depth,
            dist,
            up: Vec::new(),
        };
        forest.build_lifting();
        Ok(forest)
    }

    fn build_lifting(&mut self) {
        let n = self.parent.len();
        let levels = (usize::BITS - n.max(2).leading_zeros()) as usize;
        let base: Vec<u32> = (0..n).map(|u| self.parent[u].unwrap_or(u) as u32).collect();
        let mut up = vec![base];
        for k in 1..levels {
            let prev = &up[k - 1];
            let next = (0..n).map(|u| prev[prev[u] as usize]).collect();
            up.push(next);
        }
        self.up = up;
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn parent_edge(&self, u: usize) -> Option<usize> {
        self.parent_edge[u]
    }

    pub fn parent_conductance(&self, u: usize) -> f64 {
        self.parent_c[u]
    }

    /// Index into `roots()` of the tree containing `u`.
    pub fn component(&self, u: usize) -> usize {
        self.component[u]
    }

    pub fn root_of(&self, u: usize) -> usize {
        self.roots[self.component[u]]
    }

    /// Vertices in breadth-first order; parents precede children.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Resistance of the path from `u` to its root.
    pub fn root_distance(&self, u: usize) -> f64 {
        self.dist[u]
    }

    pub fn lca(&self, a: usize, b: usize) -> Option<usize> {
        if self.component[a] != self.component[b] {
            return None;
        }
        let (mut a, mut b) = if self.depth[a] >= self.depth[b] { (a, b) } else { (b, a) };
        let diff = self.depth[a] - self.depth[b];
        for (k, row) in self.up.iter().enumerate() {
            if diff >> k & 1 == 1 {
                a = row[a] as usize;
            }
        }
        if a == b {
            return Some(a);
        }
        for row in self.up.iter().rev() {
            if row[a] != row[b] {
                a = row[a] as usize;
                b = row[b] as usize;
            }
        }
        Some(self.up[0][a] as usize)
    }

    /// Resistance of the tree path between `a` and `b`.
    pub fn path_resistance(&self, a: usize, b: usize) -> Option<f64> {
        self.lca(a, b).map(|l| (self.dist[a] - self.dist[l]) + (self.dist[b] - self.dist[l]))
    }

    /// `c_e r_T(u, v)` for every edge of `g`; infinite across components.
    pub fn stretches(&self, g: &Graph<f64>) -> Vec<f64> {
        g.edges().iter().map(|e| self.path_resistance(e.u, e.v).map_or(f64::INFINITY, |r| e.c * r)).collect()
    }

    /// Ids (in the source graph) of the forest edges.
    pub fn edge_ids(&self) -> Vec<usize> {
        self.parent_edge.iter().filter_map(|&e| e).collect()
    }

    /// The forest as a graph on the same vertex set, scaled by `factor`.
    pub fn as_graph(&self, factor: f64) -> Graph<f64> {
        let edges = (0..self.n())
            .filter_map(|u| self.parent[u].map(|p| Edge { u, v: p, c: self.parent_c[u] * factor }))
            .collect();
        Graph::new(self.n(), edges).expect("forest edges are valid")
    }

    /// Vertices on the path from `a` up to (excluding) its ancestor `top`.
    pub fn climb(&self, a: usize, top: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut u = a;
        while u != top {
            out.push(u);
            u = self.parent[u].expect("top is an ancestor");
        }
        out
    }

    /// Total conductance of graph edges whose tree path uses the parent edge
    /// of each vertex.
    pub fn congestion(&self, g: &Graph<f64>) -> Vec<f64> {
        let mut acc = vec![0.0; self.n()];
        for e in g.edges() {
            if let Some(l) = self.lca(e.u, e.v) {
                acc[e.u] += e.c;
                acc[e.v] += e.c;
                acc[l] -= 2.0 * e.c;
            }
        }
        for &u in self.order.iter().rev() {
            if let Some(p) = self.parent[u] {
                acc[p] += acc[u];
            }
        }
        acc
    }

    /// One line per vertex: `v parent root component`, with `-` for roots.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n() {
            let parent = self.parent[u].map_or("-".to_string(), |p| p.to_string());
            out.push_str(&format!("{u} {parent} {} {}\n", self.root_of(u), self.component[u]));
        }
        out
    }
}
