#![allow(dead_code)]

use std::sync::Arc;

use flowdiff::{Graph, Instance, Vwf};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A standard VWF (`s_0 <= 0`, `f(0) <= 0`) starting at `start` with up to
/// `max_pieces` pieces.
pub fn random_vwf(rng: &mut ChaCha8Rng, start: f64, max_pieces: usize) -> Vwf {
    let k = rng.gen_range(1..=max_pieces.max(1));
    let mut curv: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.05..3.0)).collect();
    curv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut s = start;
    let segments: Vec<(f64, f64)> = curv
        .iter()
        .map(|&r| {
            s += rng.gen_range(0.1..2.0);
            (s, r)
        })
        .collect();
    let slope0 = rng.gen_range(-3.0..3.0);
    let probe = Vwf::from_profile(start, 0.0, slope0, &segments).unwrap();
    let shift = -probe.eval(0.0).unwrap() - rng.gen_range(0.0..1.0);
    Vwf::from_profile(start, shift, slope0, &segments).unwrap()
}

/// Dense `f(x)` for a VWF given as `(s, r, a, b)` pieces.
pub fn eval_pieces(f: &Vwf, x: f64) -> f64 {
    let p = f.pieces();
    let i = p.iter().rposition(|q| q.start <= x).unwrap_or(0);
    let q = &p[i];
    0.5 * q.r * x * x + q.a * x + q.b
}

pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, weighted: bool) -> Graph {
    let mut triples = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        triples.push((u, v, 1.0));
    }
    let extra = rng.gen_range(0..=2 * n);
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            triples.push((u, v, 1.0));
        }
    }
    if weighted {
        for t in &mut triples {
            t.2 = rng.gen_range(0.25..4.0);
        }
    }
    Graph::from_triples(n, &triples).unwrap()
}

/// `d = deg - s` with random sources whose total stays below the volume.
pub fn random_demand(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<f64> {
    let mut d = g.weighted_degrees();
    let vol: f64 = d.iter().sum();
    let sources = rng.gen_range(1..=3.min(g.n()));
    let mass = rng.gen_range(0.1..0.9) * vol;
    for _ in 0..sources {
        let u = rng.gen_range(0..g.n());
        d[u] -= mass / sources as f64;
    }
    d
}

/// Generalised instance with multi-piece VWFs and lower bounds in `[-1, 0]`
/// whose energy is bounded below.
pub fn random_instance(rng: &mut ChaCha8Rng, g: Arc<Graph>, max_pieces: usize) -> Instance {
    let n = g.n();
    let mut lower = Vec::with_capacity(n);
    let mut vwfs = Vec::with_capacity(n);
    for _ in 0..n {
        let b = if rng.gen_bool(0.5) { 0.0 } else { -rng.gen_range(0.0..1.0) };
        let start = if rng.gen_bool(0.5) { b } else { b - rng.gen_range(0.0..0.5) };
        lower.push(b);
        vwfs.push(random_vwf(rng, start, max_pieces));
    }
    let tail: f64 = vwfs.iter().map(|f: &Vwf| f.pieces().last().unwrap().a).sum();
    if tail < 0.5 {
        let u = rng.gen_range(0..n);
        vwfs[u] = vwfs[u].add_linear(0.5 - tail + rng.gen_range(0.0..1.0));
    }
    Instance::new(g, vwfs, lower).unwrap()
}

pub fn dense_laplacian(g: &Graph) -> Vec<Vec<f64>> {
    let mut l = vec![vec![0.0; g.n()]; g.n()];
    for e in g.edges() {
        l[e.u][e.u] += e.c;
        l[e.v][e.v] += e.c;
        l[e.u][e.v] -= e.c;
        l[e.v][e.u] -= e.c;
    }
    l
}

pub fn dense_laplacian_apply(g: &Graph, x: &[f64]) -> Vec<f64> {
    let l = dense_laplacian(g);
    l.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `x^T L x / 2 + sum f_u(x_u)` from the dense Laplacian and the raw pieces.
pub fn dense_energy(inst: &Instance, x: &[f64]) -> f64 {
    let lx = dense_laplacian_apply(inst.graph(), x);
    let quad: f64 = 0.5 * x.iter().zip(&lx).map(|(a, b)| a * b).sum::<f64>();
    quad + inst.vwfs().iter().zip(x).map(|(f, &xi)| eval_pieces(f, xi)).sum::<f64>()
}

/// Projected gradient descent with step `1 / L_max`, an independent check
/// on the exact solver.
pub fn projected_gradient(inst: &Instance, steps: usize) -> (Vec<f64>, f64) {
    let g = inst.graph();
    let max_curv = inst.vwfs().iter().map(|f| f.pieces().iter().map(|p| p.r).fold(0.0, f64::max)).fold(0.0, f64::max);
    let lip = 2.0 * g.weighted_degrees().iter().cloned().fold(0.0, f64::max) + max_curv;
    let step = 1.0 / lip;
    let b = inst.lower();
    let mut x: Vec<f64> = b.iter().map(|&bi| bi.max(0.0)).collect();
    for _ in 0..steps {
        let lx = g.laplacian_apply(&x).unwrap();
        for u in 0..x.len() {
            let grad = lx[u] + inst.vwfs()[u].slope_unchecked(x[u]);
            x[u] = (x[u] - step * grad).max(b[u]);
        }
    }
    let e = inst.energy(&x).unwrap();
    (x, e)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
