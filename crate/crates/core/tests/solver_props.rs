mod common;

use std::sync::Arc;
use std::time::Duration;

use common::{random_connected, random_demand, random_instance, rng};
use flowdiff::gen::{barbell, grid, path};
use flowdiff::oracle::{qp_solve_exact, vwf_min_scan};
use flowdiff::solver::{
    iter_refine, iter_refine_with, jtree_solve, l2_diffusion, prox_agd, prox_instance, recursive_approx_diffusion,
    solve, ProxOptions, SolverConfig,
};
use flowdiff::sparsify::jtree_sparsify;
use flowdiff::{Error, Graph, Instance};
use proptest::prelude::*;

fn exact(r: &Instance) -> flowdiff::Result<Vec<f64>> {
    Ok(qp_solve_exact(r)?.x)
}

/// Exact optimum scaled by one half: a 2-approximate oracle whenever the
/// energy of 0 is 0.
fn half(r: &Instance) -> flowdiff::Result<Vec<f64>> {
    Ok(qp_solve_exact(r)?.x.iter().map(|v| 0.5 * v).collect())
}

fn within(e: f64, opt: f64, eps: f64) -> bool {
    e <= opt / (1.0 + eps) + 1e-12 * opt.abs().max(1.0)
}

#[test]
fn refine_zero_optimum_returns_zero() {
    let g = Arc::new(path(4));
    let inst = Instance::l2(g, &[1.0, 0.0, 2.0, 0.5]).unwrap();
    let out = iter_refine(&inst, 1e-6, 2.0, &mut half).unwrap();
    assert_eq!(out.x, vec![0.0; 4]);
    assert_eq!(out.energy, 0.0);
}

#[test]
fn refine_two_nodes_with_exact_oracle() {
    let g = Arc::new(Graph::from_pairs(2, &[(0, 1)]).unwrap());
    let inst = Instance::l2(g, &[-1.0, 1.0]).unwrap();
    let out = iter_refine(&inst, 1e-6, 1.0, &mut exact).unwrap();
    assert!(out.energy <= -0.5 * (1.0 - 1e-6));
}

#[test]
fn refine_rejects_bad_parameters() {
    let g = Arc::new(path(2));
    let inst = Instance::l2(g, &[-1.0, 1.0]).unwrap();
    assert!(matches!(iter_refine(&inst, 0.0, 2.0, &mut exact), Err(Error::Config(_))));
    assert!(matches!(iter_refine(&inst, 1e-3, 0.5, &mut exact), Err(Error::Config(_))));
}

#[test]
fn prox_with_identical_preconditioner_is_exact() {
    let mut r = rng(3);
    let g = Arc::new(random_connected(&mut r, 15, true));
    let inst = random_instance(&mut r, g.clone(), 3);
    let opt = qp_solve_exact(&inst).unwrap().energy;
    let opts = ProxOptions { kappa: 1.0, steps_factor: 10.0, delta: 1e-12, early_stop: true };
    let out = prox_agd(&inst, &g, opts, &mut exact).unwrap();
    assert!((out.energy - opt).abs() <= 1e-8 * opt.abs().max(1.0));
}

#[test]
fn prox_zero_instance_runs_all_steps() {
    let g = Arc::new(grid(3, 3));
    let inst = Instance::l2(g.clone(), &[0.0; 9]).unwrap();
    let opts = ProxOptions { kappa: 4.0, steps_factor: 10.0, delta: 1e-10, early_stop: false };
    let out = prox_agd(&inst, &g, opts, &mut exact).unwrap();
    assert_eq!(out.y, vec![0.0; 9]);
    assert_eq!(out.iterations, 20);
}

#[test]
fn prox_instance_energy_is_the_model_difference() {
    let mut r = rng(11);
    let g = Arc::new(random_connected(&mut r, 12, true));
    let inst = random_instance(&mut r, g.clone(), 3);
    let h = Arc::new(jtree_sparsify(&g, 10, 1).unwrap().graph());
    let x: Vec<f64> = inst.lower().iter().map(|b| b + 0.3).collect();
    let y: Vec<f64> = inst.lower().iter().enumerate().map(|(i, b)| b + 0.1 * i as f64).collect();
    let px = prox_instance(&inst, &h, &x).unwrap();
    // Phi_x(y) = E(x) + <grad, y - x> + 1/2 |y - x|_H^2 with the smooth part
    // linearised and the VWFs kept exact.
    let lgx = g.laplacian_apply(&x).unwrap();
    let phi = |z: &[f64]| {
        let diff: Vec<f64> = z.iter().zip(&x).map(|(a, b)| a - b).collect();
        0.5 * g.quadratic_form(&x).unwrap()
            + lgx.iter().zip(&diff).map(|(a, b)| a * b).sum::<f64>()
            + 0.5 * h.quadratic_form(&diff).unwrap()
            + inst.vwfs().iter().zip(z).map(|(f, &v)| f.eval(v).unwrap()).sum::<f64>()
    };
    let zero = vec![0.0; x.len()];
    let want = phi(&y) - phi(&zero);
    let got = px.energy(&y).unwrap();
    assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
}

#[test]
fn jtree_solve_single_tree_uses_one_dimensional_core() {
    let mut r = rng(5);
    let g = Arc::new(path(12));
    let inst = Instance::l2(g, &random_demand(&mut r, &path(12))).unwrap();
    let opt = qp_solve_exact(&inst).unwrap().energy;
    let sol = jtree_solve(&inst, 1e-8, &mut |c: &Instance| {
        assert_eq!(c.n(), 1);
        let f = c.vwfs()[0].truncate(c.lower()[0])?;
        Ok(vec![vwf_min_scan(&f)?.0])
    })
    .unwrap();
    assert_eq!(sol.core_vertices, 1);
    assert_eq!(sol.eliminated, 11);
    assert!(within(inst.energy(&sol.x).unwrap(), opt, 1e-8));
}

#[test]
fn jtree_solve_two_nodes() {
    let g = Arc::new(Graph::from_pairs(2, &[(0, 1)]).unwrap());
    let inst = Instance::l2(g, &[-1.0, 1.0]).unwrap();
    let sol = jtree_solve(&inst, 1e-6, &mut exact).unwrap();
    assert!(within(inst.energy(&sol.x).unwrap(), -0.5, 1e-6));
}

#[test]
fn recursive_base_case_is_exact() {
    let g = Arc::new(grid(3, 3));
    let mut d: Vec<f64> = g.weighted_degrees();
    d[4] -= 10.0;
    let inst = Instance::l2(g, &d).unwrap();
    let opt = qp_solve_exact(&inst).unwrap();
    let sol = recursive_approx_diffusion(&inst, &SolverConfig::default()).unwrap();
    assert_eq!(sol.stats.levels[0].base_solves, 1);
    assert!((sol.energy - opt.energy).abs() <= 1e-12 * opt.energy.abs());
}

#[test]
fn recursive_halves_on_a_grid() {
    let mut r = rng(16);
    let g = Arc::new(grid(16, 16));
    let d = random_demand(&mut r, &g);
    let inst = Instance::l2(g, &d).unwrap();
    let opt = qp_solve_exact(&inst).unwrap().energy;
    let sol = recursive_approx_diffusion(&inst, &SolverConfig::default()).unwrap();
    assert!(opt < 0.0);
    assert!(sol.energy <= opt / 2.0, "{} vs {}", sol.energy, opt);
    assert!(sol.stats.levels[0].sparsifier_builds >= 1);
}

#[test]
fn recursive_on_a_path_stops_after_one_elimination() {
    let g = Arc::new(path(100));
    let mut d = g.weighted_degrees();
    d[50] -= 40.0;
    let inst = Instance::l2(g, &d).unwrap();
    let opt = qp_solve_exact(&inst).unwrap().energy;
    let sol = recursive_approx_diffusion(&inst, &SolverConfig::default()).unwrap();
    let levels = &sol.stats.levels;
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[0].agd_iterations, 1);
    assert_eq!(levels[0].eliminated_vertices, 99 * levels[0].jtree_solves);
    assert_eq!(levels[1].oracle_calls, levels[1].base_solves);
    assert!(sol.energy <= opt / 2.0);
}

#[test]
fn diffusion_nonnegative_demand() {
    let g = Arc::new(grid(4, 4));
    let out = l2_diffusion(&g, &g.weighted_degrees(), 1e-6, &SolverConfig::default()).unwrap();
    assert!(out.x.iter().all(|&v| v == 0.0));
    assert!(out.flow.iter().all(|&v| v == 0.0));
    assert_eq!(out.energy, 0.0);
}

#[test]
fn diffusion_two_nodes() {
    let g = Arc::new(Graph::from_pairs(2, &[(0, 1)]).unwrap());
    let out = l2_diffusion(&g, &[-1.0, 1.0], 1e-6, &SolverConfig::default()).unwrap();
    assert!((out.x[0] - 1.0).abs() <= 1e-6 && out.x[1].abs() <= 1e-6);
    assert!((out.energy + 0.5).abs() <= 1e-6);
    assert!((out.flow[0] + 1.0).abs() <= 1e-6 || (out.flow[0] - 1.0).abs() <= 1e-6);
}

fn brute_min_conductance(g: &Graph) -> f64 {
    let n = g.n();
    (1..(1u32 << n) - 1)
        .map(|mask| {
            let set: Vec<usize> = (0..n).filter(|&u| mask >> u & 1 == 1).collect();
            g.conductance_global(&set).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn diffusion_on_barbell_finds_the_bridge() {
    let g = Arc::new(barbell(3));
    let mut d = g.weighted_degrees();
    d[0] = -6.0;
    let out = l2_diffusion(&g, &d, 1e-6, &SolverConfig::default()).unwrap();
    let cut = g.sweep_cut_with(&out.x, true).unwrap();
    let mut verts = cut.vertices.clone();
    verts.sort();
    assert_eq!(verts, vec![0, 1, 2]);
    assert!((cut.conductance - brute_min_conductance(&g)).abs() < 1e-12);
    assert!((cut.conductance - 1.0 / 7.0).abs() < 1e-12);
}

#[test]
fn solve_general_instance() {
    let mut r = rng(21);
    let g = Arc::new(random_connected(&mut r, 40, true));
    let inst = random_instance(&mut r, g, 4);
    let opt = qp_solve_exact(&inst).unwrap().energy;
    let sol = solve(&inst, 1e-6, &SolverConfig::default()).unwrap();
    assert!(within(sol.energy, opt, 1e-6), "{} vs {}", sol.energy, opt);
    assert!(inst.energy(&sol.x).is_ok());
}

#[test]
fn time_limit_is_enforced() {
    let g = Arc::new(grid(12, 12));
    let mut d = g.weighted_degrees();
    d[0] -= 50.0;
    let cfg = SolverConfig { time_limit: Some(Duration::ZERO), ..SolverConfig::default() };
    let err = l2_diffusion(&g, &d, 1e-6, &cfg).unwrap_err();
    assert!(matches!(err, Error::TimeLimit { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn same_seed_same_bits() {
    let g = Arc::new(grid(10, 10));
    let mut d = g.weighted_degrees();
    d[45] -= 60.0;
    let cfg = SolverConfig { rng_seed: 9, ..SolverConfig::default() };
    let a = l2_diffusion(&g, &d, 1e-6, &cfg).unwrap();
    let b = l2_diffusion(&g, &d, 1e-6, &cfg).unwrap();
    assert_eq!(
        a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(without_wall(a.stats), without_wall(b.stats));
}

fn without_wall(mut s: flowdiff::solver::SolveStats) -> flowdiff::solver::SolveStats {
    s.wall_ms = 0.0;
    for l in &mut s.levels {
        l.wall_ms = 0.0;
    }
    s
}

#[test]
fn invalid_config_is_rejected() {
    let g = Arc::new(path(3));
    let cfg = SolverConfig { inner_delta: 0.0, ..SolverConfig::default() };
    assert!(matches!(l2_diffusion(&g, &[-1.0, 1.0, 1.0], 1e-6, &cfg), Err(Error::Config(_))));
    let cfg = SolverConfig { kappa: flowdiff::solver::KappaPolicy::Fixed(0.5), ..SolverConfig::default() };
    assert!(matches!(l2_diffusion(&g, &[-1.0, 1.0, 1.0], 1e-6, &cfg), Err(Error::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn refinement_contracts_the_gap(seed in any::<u64>(), n in 5usize..20) {
        let mut r = rng(seed);
        let g = Arc::new(random_connected(&mut r, n, true));
        let inst = random_instance(&mut r, g, 3);
        let opt = qp_solve_exact(&inst).unwrap().energy;
        let out = iter_refine_with(&inst, 1e-6, 2.0, false, &mut half).unwrap();
        for w in out.energies.windows(2) {
            let (before, after) = (w[0] - opt, w[1] - opt);
            // Below this gap the energy differences are dominated by rounding.
            if before > 1e-6 * opt.abs().max(1.0) {
                prop_assert!(after / before <= 0.5 + 1e-8, "ratio {} at gap {:e}", after / before, before);
            }
        }
        prop_assert!(within(out.energy, opt, 1e-6));
    }

    #[test]
    fn prox_halves_with_a_jtree(seed in any::<u64>(), n in 10usize..31, early in any::<bool>()) {
        let mut r = rng(seed);
        let g = Arc::new(random_connected(&mut r, n, true));
        let inst = random_instance(&mut r, g.clone(), 3);
        let tree = jtree_sparsify(&g, 10, seed).unwrap();
        let h = Arc::new(tree.graph());
        let opt = qp_solve_exact(&inst).unwrap().energy;
        let e0 = inst.energy_unchecked(&vec![0.0; n]);
        let opts = ProxOptions { kappa: tree.quality(), steps_factor: 10.0, delta: 1e-10, early_stop: early };
        let out = prox_agd(&inst, &h, opts, &mut exact).unwrap();
        prop_assert!(out.energy - opt <= 0.5 * (e0 - opt) + 1e-10 * opt.abs().max(1.0));
        prop_assert!(out.lower_bound <= opt + 1e-9 * opt.abs().max(1.0));
    }

    #[test]
    fn jtree_solve_matches_the_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = random_connected(&mut r, 50, true);
        let g = Arc::new(jtree_sparsify(&base, 10, seed).unwrap().graph());
        let inst = random_instance(&mut r, g, 3);
        let opt = qp_solve_exact(&inst).unwrap().energy;
        let sol = jtree_solve(&inst, 1e-6, &mut exact).unwrap();
        prop_assert!(sol.core_vertices <= 10);
        prop_assert!(within(inst.energy(&sol.x).unwrap(), opt, 1e-6));
    }

    #[test]
    fn diffusion_matches_the_oracle(seed in any::<u64>(), n in 5usize..50) {
        let mut r = rng(seed);
        let g = Arc::new(random_connected(&mut r, n, false));
        let d = random_demand(&mut r, &g);
        let opt = qp_solve_exact(&Instance::l2(g.clone(), &d).unwrap()).unwrap().energy;
        let out = l2_diffusion(&g, &d, 1e-6, &SolverConfig::default()).unwrap();
        prop_assert!(within(out.energy, opt, 1e-6), "{} vs {}", out.energy, opt);
        prop_assert_eq!(out.flow, g.potential_flow(&out.x).unwrap());
    }
}
