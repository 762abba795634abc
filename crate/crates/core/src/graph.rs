//! Undirected weighted multigraphs and the linear maps built from them.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub c: T,
}

/// Weighted multigraph with strictly positive conductances and no self-loops.
///
/// Every edge carries the fixed orientation `u -> v` used by the incidence
/// matrix `B`, so `(Bx)_e = x_u - x_v`.
#[derive(Debug, Clone)]
pub struct Graph<T> {
    n: usize,
    edges: Vec<Edge<T>>,
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCut<T> {
    pub vertices: Vec<usize>,
    pub conductance: T,
}

impl<T: Scalar> Graph<T> {
    pub fn new(n: usize, edges: Vec<Edge<T>>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({}, {}) references a vertex outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop at vertex {}", e.u)));
            }
            if !(e.c > T::zero()) || !e.c.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {i} has non-positive conductance {}", e.c)));
            }
        }
        Ok(Self::build(n, edges))
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(u, v)| Edge { u, v, c: T::one() }).collect())
    }

    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(n, triples.iter().map(|&(u, v, c)| Edge { u, v, c: T::lit(c) }).collect())
    }

    fn build(n: usize, edges: Vec<Edge<T>>) -> Self {
        let mut deg = vec![0usize; n + 1];
        for e in &edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0usize, 0usize); offsets[n]];
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, id);
            fill[e.v] += 1;
        }
        Graph { n, edges, offsets, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<T> {
        &self.edges[id]
    }

    /// `(neighbour, edge id)` pairs incident to `u`.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn weighted_degree(&self, u: usize) -> T {
        self.neighbors(u).iter().map(|&(_, id)| self.edges[id].c).sum()
    }

    pub fn weighted_degrees(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n];
        for e in &self.edges {
            d[e.u] = d[e.u] + e.c;
            d[e.v] = d[e.v] + e.c;
        }
        d
    }

    pub fn volume(&self, set: &[usize]) -> T {
        set.iter().map(|&u| self.weighted_degree(u)).sum()
    }

    pub fn total_volume(&self) -> T {
        self.edges.iter().map(|e| e.c + e.c).sum()
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            return Err(Error::DimensionMismatch { expected, found: len });
        }
        Ok(())
    }

    /// `L x` computed edge by edge.
    pub fn laplacian_apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len(), self.n)?;
        let mut out = vec![T::zero(); self.n];
        self.laplacian_apply_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn laplacian_apply_into(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for e in &self.edges {
            let f = e.c * (x[e.u] - x[e.v]);
            out[e.u] = out[e.u] + f;
            out[e.v] = out[e.v] - f;
        }
    }

    /// `x^T L x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        self.check_len(x.len(), self.n)?;
        Ok(self.quadratic_form_unchecked(x))
    }

    pub(crate) fn quadratic_form_unchecked(&self, x: &[T]) -> T {
        self.edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.c * d * d
            })
            .sum()
    }

    /// Flow induced by potentials: `f = -C B x`.
    pub fn potential_flow(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len(), self.n)?;
        Ok(self.edges.iter().map(|e| -(e.c * (x[e.u] - x[e.v]))).collect())
    }

    /// Net flow `B^T f` at each vertex.
    pub fn residue(&self, f: &[T]) -> Result<Vec<T>> {
        self.check_len(f.len(), self.m())?;
        let mut out = vec![T::zero(); self.n];
        for (e, &fe) in self.edges.iter().zip(f) {
            out[e.u] = out[e.u] + fe;
            out[e.v] = out[e.v] - fe;
        }
        Ok(out)
    }

    /// Total conductance crossing the boundary of `mask`.
    pub fn cut_weight(&self, mask: &[bool]) -> T {
        self.edges.iter().filter(|e| mask[e.u] != mask[e.v]).map(|e| e.c).sum()
    }

    fn set_mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &u in set {
            if u >= self.n {
                return Err(Error::Domain(format!("vertex {u} outside 0..{}", self.n)));
            }
            mask[u] = true;
        }
        let size = mask.iter().filter(|&&b| b).count();
        if size == 0 {
            return Err(Error::Domain("conductance of the empty set".into()));
        }
        if size == self.n {
            return Err(Error::Domain("conductance of the full vertex set".into()));
        }
        Ok(mask)
    }

    /// `w(E(S, V \ S)) / vol(S)`.
    pub fn conductance(&self, set: &[usize]) -> Result<T> {
        let mask = self.set_mask(set)?;
        let vol: T = (0..self.n).filter(|&u| mask[u]).map(|u| self.weighted_degree(u)).sum();
        if vol <= T::zero() {
            return Err(Error::Domain("set has zero volume".into()));
        }
        Ok(self.cut_weight(&mask) / vol)
    }

    /// `w(E(S, V \ S)) / min(vol(S), vol(V \ S))`.
    pub fn conductance_global(&self, set: &[usize]) -> Result<T> {
        let mask = self.set_mask(set)?;
        let vol: T = (0..self.n).filter(|&u| mask[u]).map(|u| self.weighted_degree(u)).sum();
        let rest = self.total_volume() - vol;
        let denom = vol.min(rest);
        if denom <= T::zero() {
            return Err(Error::Domain("set or complement has zero volume".into()));
        }
        Ok(self.cut_weight(&mask) / denom)
    }

    /// Best prefix of the support of `x`, ordered by decreasing value with
    /// ties broken by vertex id. Prefixes equal to `V` or with zero volume
    /// are skipped.
    pub fn sweep_cut(&self, x: &[T]) -> Result<SweepCut<T>> {
        self.sweep_cut_with(x, false)
    }

    pub fn sweep_cut_with(&self, x: &[T], global: bool) -> Result<SweepCut<T>> {
        self.check_len(x.len(), self.n)?;
        let mut order: Vec<usize> = (0..self.n).filter(|&u| x[u] > T::zero()).collect();
        if order.is_empty() {
            return Err(Error::Domain("potential vector has empty support".into()));
        }
        order.sort_by(|&a, &b| match x[b].partial_cmp(&x[a]) {
            Some(Ordering::Equal) | None => a.cmp(&b),
            Some(o) => o,
        });
        let total = self.total_volume();
        let mut inside = vec![false; self.n];
        let mut cut = T::zero();
        let mut vol = T::zero();
        let mut best: Option<(usize, T)> = None;
        for (k, &u) in order.iter().enumerate() {
            inside[u] = true;
            for &(w, id) in self.neighbors(u) {
                let c = self.edges[id].c;
                if inside[w] {
                    cut = cut - c;
                } else {
                    cut = cut + c;
                }
                vol = vol + c;
            }
            if k + 1 == self.n {
                break;
            }
            let denom = if global { vol.min(total - vol) } else { vol };
            if denom <= T::zero() {
                continue;
            }
            let phi = cut.max(T::zero()) / denom;
            if best.is_none_or(|(_, b)| phi < b) {
                best = Some((k + 1, phi));
            }
        }
        let (len, conductance) = best.ok_or_else(|| Error::Domain("no admissible sweep prefix".into()))?;
        let mut vertices = order[..len].to_vec();
        vertices.sort_unstable();
        Ok(SweepCut { vertices, conductance })
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(w, _) in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().1 == 1
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph<T> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in vertices.iter().enumerate() {
            local[u] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| Edge { u: local[e.u], v: local[e.v], c: e.c })
            .collect();
        Graph::build(vertices.len(), edges)
    }

    /// Parallel edges merged by summing conductances; edges are returned in
    /// lexicographic order of `(min, max)` endpoints.
    pub fn merged(&self) -> Graph<T> {
        let mut keyed: Vec<(usize, usize, T)> = self.edges.iter().map(|e| (e.u.min(e.v), e.u.max(e.v), e.c)).collect();
        keyed.sort_by_key(|a| (a.0, a.1));
        let mut edges: Vec<Edge<T>> = Vec::with_capacity(keyed.len());
        for (u, v, c) in keyed {
            match edges.last_mut() {
                Some(last) if last.u == u && last.v == v => last.c = last.c + c,
                _ => edges.push(Edge { u, v, c }),
            }
        }
        Graph::build(self.n, edges)
    }

    pub fn scaled(&self, factor: T) -> Graph<T> {
        let edges = self.edges.iter().map(|e| Edge { c: e.c * factor, ..*e }).collect();
        Graph::build(self.n, edges)
    }

    pub fn is_forest(&self) -> bool {
        self.m() + self.components().1 == self.n
    }

    /// Dense Laplacian, row major.
    pub fn dense_laplacian(&self) -> Vec<Vec<T>> {
        let mut l = vec![vec![T::zero(); self.n]; self.n];
        for e in &self.edges {
            l[e.u][e.u] = l[e.u][e.u] + e.c;
            l[e.v][e.v] = l[e.v][e.v] + e.c;
            l[e.u][e.v] = l[e.u][e.v] - e.c;
            l[e.v][e.u] = l[e.v][e.u] - e.c;
        }
        l
    }

    pub fn cast<U: Scalar>(&self) -> Graph<U> {
        let edges = self.edges.iter().map(|e| Edge { u: e.u, v: e.v, c: U::lit(e.c.as_f64()) }).collect();
        Graph::build(self.n, edges)
    }
}
