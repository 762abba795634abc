//! Greedy elimination of degree-one vertices.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::instance::Instance;
use crate::scalar::Scalar;
use crate::vwf::{VwfSnapshot, VwfTree};

#[derive(Debug, Clone)]
pub struct EliminationRecord<T> {
    pub vertex: usize,
    pub parent: usize,
    pub conductance: T,
    pub lower: T,
    lifted: VwfSnapshot<T>,
}

/// Everything needed to extend a solution of the reduced instance back to
/// the original vertex set.
#[derive(Debug, Clone)]
pub struct RecoveryMap<T> {
    n: usize,
    survivors: Vec<usize>,
    records: Vec<EliminationRecord<T>>,
}

#[derive(Debug, Clone)]
pub struct Elimination<T> {
    pub reduced: Instance<T>,
    pub map: RecoveryMap<T>,
}

/// Repeatedly removes a vertex of degree one, folding its lifted VWF into
/// its neighbour. Parallel edges are merged first. Leaves are processed in
/// first-in first-out order: original leaves by id, then vertices in the
/// order they become leaves.
pub fn eliminate<T: Scalar>(inst: &Instance<T>) -> Result<Elimination<T>> {
    let g = inst.graph();
    let n = g.n();
    let merged = g.merged();
    let mut nbrs: Vec<HashMap<usize, T>> = vec![HashMap::new(); n];
    for e in merged.edges() {
        nbrs[e.u].insert(e.v, e.c);
        nbrs[e.v].insert(e.u, e.c);
    }
    let mut trees: Vec<Option<VwfTree<T>>> = inst
        .vwfs()
        .iter()
        .zip(inst.lower())
        .enumerate()
        .map(|(u, (f, &b))| {
            let f = if f.domain_start() < b { f.truncate(b)? } else { f.clone() };
            Ok(Some(VwfTree::from_vwf_seeded(&f, u as u64)))
        })
        .collect::<Result<_>>()?;

    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| nbrs[u].len() == 1).collect();
    let mut records = Vec::new();
    while let Some(u) = queue.pop_front() {
        if !alive[u] || nbrs[u].len() != 1 {
            continue;
        }
        let (&v, &c) = nbrs[u].iter().next().unwrap();
        let mut du = trees[u].take().expect("live vertex owns a tree");
        du.lift(c)?;
        let lifted = du.snapshot();
        trees[v].as_mut().expect("live neighbour owns a tree").add(&du);
        records.push(EliminationRecord { vertex: u, parent: v, conductance: c, lower: inst.lower()[u], lifted });
        alive[u] = false;
        nbrs[u].clear();
        nbrs[v].remove(&u);
        if nbrs[v].len() == 1 {
            queue.push_back(v);
        }
    }

    let survivors: Vec<usize> = (0..n).filter(|&u| alive[u]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &u) in survivors.iter().enumerate() {
        local[u] = i;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| alive[e.u] && alive[e.v])
        .map(|e| Edge { u: local[e.u], v: local[e.v], c: e.c })
        .collect();
    let graph = Arc::new(Graph::new(survivors.len(), edges)?);
    let vwfs = survivors.iter().map(|&u| trees[u].as_ref().expect("survivor owns a tree").to_vwf()).collect();
    let lower = survivors.iter().map(|&u| inst.lower()[u]).collect();
    let reduced = Instance::new_unchecked(graph, vwfs, lower);
    Ok(Elimination { reduced, map: RecoveryMap { n, survivors, records } })
}

impl<T: Scalar> RecoveryMap<T> {
    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    pub fn records(&self) -> &[EliminationRecord<T>] {
        &self.records
    }

    pub fn original_n(&self) -> usize {
        self.n
    }

    /// Replays the eliminations newest first.
    pub fn recover(&self, reduced_x: &[T]) -> Result<Vec<T>> {
        if reduced_x.len() != self.survivors.len() {
            return Err(Error::DimensionMismatch { expected: self.survivors.len(), found: reduced_x.len() });
        }
        let mut x = vec![T::nan(); self.n];
        for (&u, &xu) in self.survivors.iter().zip(reduced_x) {
            x[u] = xu;
        }
        for rec in self.records.iter().rev() {
            let y = rec.lifted.optimal_x(x[rec.parent])?;
            x[rec.vertex] = y.max(rec.lower);
        }
        Ok(x)
    }
}
