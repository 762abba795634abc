//! Graph families used by tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

fn unit(n: usize, pairs: Vec<(usize, usize)>) -> Graph<f64> {
    let edges = pairs.into_iter().map(|(u, v)| Edge { u, v, c: 1.0 }).collect();
    Graph::new(n, edges).expect("generated edges are valid")
}

/// `rows x cols` unit grid; vertex `(i, j)` is `i * cols + j`.
pub fn grid(rows: usize, cols: usize) -> Graph<f64> {
    let mut pairs = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let u = i * cols + j;
            if j + 1 < cols {
                pairs.push((u, u + 1));
            }
            if i + 1 < rows {
                pairs.push((u, u + cols));
            }
        }
    }
    unit(rows * cols, pairs)
}

pub fn ring(n: usize) -> Graph<f64> {
    let pairs = match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    };
    unit(n, pairs)
}

pub fn path(n: usize) -> Graph<f64> {
    unit(n, (1..n).map(|i| (i - 1, i)).collect())
}

pub fn complete(n: usize) -> Graph<f64> {
    unit(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
}

/// A random Hamiltonian cycle plus `d - 2` random perfect matchings on an
/// even number of vertices: a connected random `d`-regular multigraph.
pub fn expander(n: usize, d: usize, seed: u64) -> Result<Graph<f64>> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Config(format!("expander needs an even n >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
    for _ in 0..d.saturating_sub(2) {
        perm.shuffle(&mut rng);
        pairs.extend(perm.chunks(2).map(|c| (c[0], c[1])));
    }
    Ok(unit(n, pairs))
}

/// Two cliques `K_k` on `0..k` and `k..2k` joined by the bridge `(k-1, k)`.
pub fn barbell(k: usize) -> Graph<f64> {
    let mut pairs = Vec::new();
    for side in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                pairs.push((side + u, side + v));
            }
        }
    }
    if k > 0 {
        pairs.push((k - 1, k));
    }
    unit(2 * k, pairs)
}

/// `G(n, p)` with a path added through all vertices to keep it connected
/// when `connect` is set.
pub fn erdos_renyi(n: usize, p: f64, connect: bool, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    if connect {
        pairs.extend((1..n).map(|i| (i - 1, i)));
    }
    unit(n, pairs)
}

/// Two dense `G(k, p_in)` clusters on `0..k` and `k..2k` joined by
/// `bridges` random cross edges. Each cluster contains a spanning path.
pub fn planted_partition(k: usize, p_in: f64, bridges: usize, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for side in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                if v == u + 1 || rng.gen::<f64>() < p_in {
                    pairs.push((side + u, side + v));
                }
            }
        }
    }
    for _ in 0..bridges.max(1) {
        pairs.push((rng.gen_range(0..k), k + rng.gen_range(0..k)));
    }
    unit(2 * k, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(grid(3, 4).m(), 17);
        assert_eq!(ring(5).m(), 5);
        assert_eq!(barbell(3).m(), 7);
        assert_eq!(complete(5).m(), 10);
        let e = expander(10, 4, 1).unwrap();
        assert_eq!(e.m(), 20);
        assert!((0..10).all(|u| e.degree(u) == 4));
        assert!(e.is_connected());
        assert!(erdos_renyi(30, 0.1, true, 2).is_connected());
        assert!(planted_partition(10, 0.5, 2, 3).is_connected());
    }
}
