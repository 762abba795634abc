mod common;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use common::{random_connected, rng};
use flowdiff::eliminate::eliminate;
use flowdiff::oracle::pencil_bounds;
use flowdiff::sparsify::{
    canonical_jtree, decompose_tree, find_forest, jtree_sparsify_with, local_stretches, low_stretch_tree,
    spectral_sparsify_core, RootedForest, TreeDecomposition,
};
use flowdiff::{Graph, Instance};
use proptest::prelude::*;
use rand::Rng;

/// Tree-path resistance by breadth-first search over the tree edges.
fn brute_path_resistance(g: &Graph, tree_ids: &[usize], a: usize, b: usize) -> f64 {
    let mut adj: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for &id in tree_ids {
        let e = g.edge(id);
        adj.entry(e.u).or_default().push((e.v, 1.0 / e.c));
        adj.entry(e.v).or_default().push((e.u, 1.0 / e.c));
    }
    let mut dist: HashMap<usize, f64> = HashMap::from([(a, 0.0)]);
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        for &(w, r) in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&u] + r);
                queue.push_back(w);
            }
        }
    }
    dist[&b]
}

fn check_decomposition(g: &Graph, t: &RootedForest, d: &TreeDecomposition, w: &[f64], j: usize) {
    let total: f64 = w.iter().sum();
    assert!(d.pieces.len() <= j.max(1), "{} pieces for j = {j}", d.pieces.len());
    let tree_edges: Vec<(usize, usize)> = (0..g.n()).filter_map(|u| t.parent(u).map(|p| (u, p))).collect();
    let mut covered = vec![false; g.n()];
    let mut count = vec![0usize; g.n()];
    for (piece, weight) in d.pieces.iter().zip(d.piece_weights(w)) {
        if piece.len() > 1 {
            assert!(weight <= 20.0 * total / j as f64 + 1e-9 * total);
        }
        let set: HashSet<usize> = piece.iter().cloned().collect();
        let inner = tree_edges.iter().filter(|(u, p)| set.contains(u) && set.contains(p)).count();
        assert_eq!(inner + 1, piece.len(), "piece is not a subtree");
        for &u in piece {
            covered[u] = true;
            count[u] += 1;
        }
    }
    assert!(covered.iter().all(|&c| c));
    for (i, a) in d.pieces.iter().enumerate() {
        let shared = a.iter().filter(|&&u| count[u] > 1).count();
        assert!(shared <= 2, "piece {i} shares {shared} vertices");
        for b in &d.pieces[i + 1..] {
            assert!(a.iter().filter(|u| b.binary_search(u).is_ok()).count() <= 1);
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

fn tree_of(g: &Graph) -> RootedForest {
    let ids: Vec<usize> = (0..g.m()).collect();
    RootedForest::from_edges(g, &ids, &[0]).unwrap()
}

fn pencil_within(h: &Graph, g: &Graph, bound: f64) {
    let p = pencil_bounds(h, g).unwrap();
    assert!(p.lambda_min >= 1.0 - 1e-6, "lambda_min {}", p.lambda_min);
    assert!(p.lambda_max <= bound + 1e-6, "lambda_max {} above {bound}", p.lambda_max);
}

#[test]
fn tree_has_stretch_m() {
    let g = flowdiff::gen::path(9);
    let t = low_stretch_tree(&g, 0).unwrap();
    assert_eq!(t.total_stretch, 8.0);
    assert_eq!(t.forest.roots().len(), 1);
}

#[test]
fn cycle_stretch() {
    for n in [5, 12, 40] {
        let t = low_stretch_tree(&flowdiff::gen::ring(n), 1).unwrap();
        assert!((t.total_stretch - 2.0 * (n as f64 - 1.0)).abs() < 1e-9);
    }
}

#[test]
fn stretch_matches_brute_force() {
    let mut r = rng(40);
    let g = random_connected(&mut r, 40, true);
    let t = low_stretch_tree(&g, 2).unwrap();
    let ids = t.forest.edge_ids();
    assert_eq!(ids.len(), 39);
    for (e, &s) in g.edges().iter().zip(&t.stretch) {
        let want = e.c * brute_path_resistance(&g, &ids, e.u, e.v);
        assert!((s - want).abs() <= 1e-9 * want);
    }
}

#[test]
fn decomposition_small_j() {
    let g = flowdiff::gen::path(8);
    let t = tree_of(&g);
    let w = vec![1.0; 7];
    for j in [1, 4] {
        let d = decompose_tree(&g, &t, &w, j);
        check_decomposition(&g, &t, &d, &w, j);
    }
    let star = Graph::from_pairs(9, &(1..9).map(|v| (0, v)).collect::<Vec<_>>()).unwrap();
    let t = tree_of(&star);
    let d = decompose_tree(&star, &t, &[1.0; 8], 2);
    check_decomposition(&star, &t, &d, &[1.0; 8], 2);
}

#[test]
fn large_star_keeps_centre_shared() {
    let star = Graph::from_pairs(201, &(1..201).map(|v| (0, v)).collect::<Vec<_>>()).unwrap();
    let t = tree_of(&star);
    let w = vec![1.0; 200];
    let d = decompose_tree(&star, &t, &w, 20);
    check_decomposition(&star, &t, &d, &w, 20);
    assert!(d.pieces.len() > 1);
    assert!(d.pieces.iter().all(|p| p.contains(&0)));
}

#[test]
fn forest_examples() {
    let tree = flowdiff::gen::path(30);
    let f = find_forest(&tree, 10, 0).unwrap();
    assert!(f.forest.roots().len() <= 10);
    assert!(f.max_local_stretch <= f.tree_stretch);

    let cycle = flowdiff::gen::ring(64);
    let f = find_forest(&cycle, 10, 3).unwrap();
    assert!(f.max_local_stretch <= 3.0 * 100.0 * f.tree_stretch / 10.0);

    let edge = flowdiff::gen::path(2);
    assert!(find_forest(&edge, 10, 0).unwrap().max_local_stretch.is_finite());
    assert!(find_forest(&edge, 9, 0).is_err());
}

#[test]
fn forest_dump_lists_every_vertex() {
    let f = find_forest(&flowdiff::gen::grid(5, 5), 10, 1).unwrap();
    let dump = f.forest.dump();
    let lines: Vec<&str> = dump.lines().collect();
    assert_eq!(lines.len(), 25);
    for (u, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields.len(), 4);
        assert_eq!(fields[0], u.to_string());
        assert_eq!(fields[2], f.forest.root_of(u).to_string());
    }
}

#[test]
fn canonical_jtree_examples() {
    let c4 = flowdiff::gen::ring(4);
    let spanning = RootedForest::from_edges(&c4, &[0, 1, 2], &[0]).unwrap();
    let h = canonical_jtree(&c4, &spanning, 3.0).unwrap();
    assert_eq!(h.core_vertices(), &[0]);
    assert!(h.core_edges().is_empty());
    assert_eq!(h.envelope_scale(), 30.0);

    let pairs = RootedForest::from_edges(&c4, &[0, 2], &[0, 2]).unwrap();
    let h = canonical_jtree(&c4, &pairs, 1.0).unwrap();
    assert_eq!(h.core_edges().len(), 1);
    assert_eq!(h.core_edges()[0].c, 20.0);
}

/// Vertices of the 2-core of the merged core graph.
fn core_two_core(h: &flowdiff::sparsify::JTree) -> HashSet<usize> {
    let mut nbrs: HashMap<usize, HashSet<usize>> = h.core_vertices().iter().map(|&r| (r, HashSet::new())).collect();
    for e in h.core_edges() {
        nbrs.get_mut(&e.u).unwrap().insert(e.v);
        nbrs.get_mut(&e.v).unwrap().insert(e.u);
    }
    loop {
        let leaf = nbrs.iter().find(|(_, s)| s.len() <= 1).map(|(&u, _)| u);
        match leaf {
            Some(u) => {
                for w in nbrs.remove(&u).unwrap() {
                    nbrs.get_mut(&w).unwrap().remove(&u);
                }
            }
            None => return nbrs.into_keys().collect(),
        }
    }
}

/// Peeling strips the envelope entirely and stops at the 2-core of the
/// core, which is the whole core when every root has two core neighbours;
/// an acyclic core collapses to a single vertex.
fn peel_to_core(h: &flowdiff::sparsify::JTree) {
    let graph = Arc::new(h.graph());
    let inst = Instance::l2(graph, &vec![0.0; h.n()]).unwrap();
    let el = eliminate(&inst).unwrap();
    let survivors: HashSet<usize> = el.map.survivors().iter().cloned().collect();
    let two_core = core_two_core(h);
    if two_core.is_empty() {
        assert_eq!(survivors.len(), 1);
    } else {
        assert_eq!(survivors, two_core);
    }
}

#[test]
fn jtree_of_cycle_is_certified() {
    let g = flowdiff::gen::ring(40);
    let h = jtree_sparsify_with(&g, 10, 0, 0).unwrap();
    assert!(!h.is_exactly_certified());
    assert!(h.core_vertices().len() <= 10);
    pencil_within(&h.graph(), &g, h.quality());
    peel_to_core(&h);
}

#[test]
fn jtree_of_grid_is_certified() {
    let g = flowdiff::gen::grid(32, 32);
    let h = jtree_sparsify_with(&g, 64, 0, 0).unwrap();
    assert!(h.quality() <= 200.0 * h.kappa() + 1e-9);
    pencil_within(&h.graph(), &g, h.quality());
    peel_to_core(&h);
}

#[test]
fn exact_certificate_rescales() {
    let g = flowdiff::gen::grid(10, 10);
    let h = jtree_sparsify_with(&g, 20, 5, 1000).unwrap();
    assert!(h.is_exactly_certified());
    let p = pencil_bounds(&h.graph(), &g).unwrap();
    assert!((p.lambda_min - 1.0).abs() < 1e-6);
    assert!(p.lambda_max <= h.quality() + 1e-6);
}

#[test]
fn sparsifier_keeps_trees_and_sparse_graphs() {
    let t = flowdiff::gen::path(30);
    let s = spectral_sparsify_core(&t, 0).unwrap();
    assert_eq!(s.graph.m(), 29);
    assert_eq!(s.quality, 1.0);
    let k = flowdiff::gen::complete(20);
    let s = spectral_sparsify_core(&k, 2).unwrap();
    pencil_within(&s.graph, &k, 2.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_invariants(seed in any::<u64>(), n in 20usize..200, j in 9usize..60) {
        let mut r = rng(seed);
        let g = random_connected(&mut r, n, true);
        let t = low_stretch_tree(&g, seed).unwrap();
        let w: Vec<f64> = if r.gen_bool(0.5) { t.stretch.clone() } else { (0..g.m()).map(|_| r.gen_range(0.0..5.0)).collect() };
        let d = decompose_tree(&g, &t.forest, &w, j);
        check_decomposition(&g, &t.forest, &d, &w, j);
    }

    #[test]
    fn forest_roots_and_stretch(seed in any::<u64>(), n in 12usize..120, j in 10usize..40) {
        let mut r = rng(seed);
        let weighted = r.gen_bool(0.5);
        let g = random_connected(&mut r, n, weighted);
        let f = find_forest(&g, j, seed).unwrap();
        prop_assert!(f.forest.roots().len() <= j);
        prop_assert_eq!(f.forest.edge_ids().len() + f.forest.roots().len(), n);
        let local = local_stretches(&g, &f.forest);
        prop_assert_eq!(local.iter().cloned().fold(0.0, f64::max), f.max_local_stretch);
    }

    #[test]
    fn jtree_pencil_within_certificate(seed in any::<u64>(), n in 20usize..150) {
        let mut r = rng(seed);
        let weighted = r.gen_bool(0.5);
        let g = random_connected(&mut r, n, weighted);
        let h = jtree_sparsify_with(&g, 10.max(n / 8), seed, 0).unwrap();
        pencil_within(&h.graph(), &g, h.quality());
        peel_to_core(&h);
    }
}
