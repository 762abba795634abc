//! Wall time of `l2_diffusion` on square grids.
//!
//! `cargo run --release --example scaling -- 16 24 32`

use std::sync::Arc;
use std::time::Instant;

use flowdiff::gen::grid;
use flowdiff::solver::{l2_diffusion, SolverConfig};

fn main() {
    let sides: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("grid side")).collect();
    for side in sides {
        let g = Arc::new(grid(side, side));
        let mut d = g.weighted_degrees();
        d[side / 2 * side + side / 2] -= 0.25 * g.total_volume();
        let t = Instant::now();
        let out = l2_diffusion(&g, &d, 1e-4, &SolverConfig::default()).expect("solve");
        println!(
            "side {side} n {} m {} ms {:.0} energy {:.6e} steps {}",
            g.n(),
            g.m(),
            t.elapsed().as_secs_f64() * 1e3,
            out.energy,
            out.stats.refinement_steps
        );
        for (i, l) in out.stats.levels.iter().enumerate() {
            println!("  level {i}: {l:?}");
        }
    }
}
