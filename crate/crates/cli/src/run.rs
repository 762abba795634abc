use std::sync::Arc;
use std::time::{Duration, Instant};

use flowdiff::oracle::{qp_solve_exact, QP_MAX_VERTICES};
use flowdiff::solver::{l2_diffusion, recursive_approx_diffusion, Diffusion, KappaPolicy, SolverConfig};
use flowdiff::{gen, io, Error, Graph, Instance, Result};
use serde_json::{json, Value};

use crate::demand::build_demand;
use crate::report::{csv_real, csv_rows, emit, json_text, num, nums, stats, SCHEMA};
use crate::{Cli, Format, Mode};

const VERIFY_FAILED: u8 = 4;

fn solver_config(cli: &Cli) -> Result<SolverConfig> {
    let mut cfg = SolverConfig { rng_seed: cli.seed, ..SolverConfig::default() };
    if let Some(k) = cli.kappa {
        cfg.kappa = KappaPolicy::Fixed(k);
    }
    cfg.j_override = cli.j;
    if let Some(b) = cli.base_case_edges {
        cfg.base_case_edges = b;
    }
    if let Some(d) = cli.inner_delta {
        cfg.inner_delta = d;
    }
    if let Some(t) = cli.time_limit {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Config(format!("time limit must be positive, got {t}")));
        }
        cfg.time_limit = Some(Duration::from_secs_f64(t));
    }
    cfg.validate()?;
    if !(cli.eps > 0.0 && cli.eps <= 1.0) {
        return Err(Error::Config(format!("eps must lie in (0, 1], got {}", cli.eps)));
    }
    Ok(cfg)
}

fn ingest(cli: &Cli) -> Result<Arc<Graph>> {
    let path = cli.input.as_ref().ok_or_else(|| Error::Config("--input is required".into()))?;
    let g = io::read_edge_list(path)?;
    let (_, components) = g.components();
    let merged = g.merged();
    eprintln!("graph: n={} m={} distinct pairs={} components={}", g.n(), g.m(), merged.m(), components);
    Ok(Arc::new(g))
}

fn demand(cli: &Cli, g: &Graph) -> Result<Vec<f64>> {
    match (&cli.seeds, &cli.demand_file) {
        (Some(seeds), None) => {
            let mass = cli.mass.ok_or_else(|| Error::Config("--seeds needs --mass".into()))?;
            build_demand(g, seeds, mass, cli.uniform_split)
        }
        (None, Some(path)) => io::parse_demand(&std::fs::read_to_string(path)?, g.n()),
        _ => Err(Error::Config("give exactly one of --seeds and --demand-file".into())),
    }
}

fn graph_summary(g: &Graph) -> Value {
    json!({ "n": g.n(), "m": g.m(), "components": g.components().1 })
}

pub fn run(cli: &Cli) -> Result<u8> {
    match cli.mode {
        Mode::Solve | Mode::Cluster => solve_or_cluster(cli),
        Mode::Verify => verify(cli),
        Mode::Bench => bench(cli),
    }
}

fn solve_or_cluster(cli: &Cli) -> Result<u8> {
    let cfg = solver_config(cli)?;
    let g = ingest(cli)?;
    let d = demand(cli, &g)?;
    let out: Diffusion = l2_diffusion(&g, &d, cli.eps, &cfg)?;
    let cut = match cli.mode {
        Mode::Cluster => Some(g.sweep_cut_with(&out.x, cli.global)?),
        _ => None,
    };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "schema": SCHEMA,
                "mode": if cut.is_some() { "cluster" } else { "solve" },
                "graph": graph_summary(&g),
                "eps": num(cli.eps),
                "seed": cli.seed,
                "energy": num(out.energy),
                "potentials": nums(&out.x),
                "flow": nums(&out.flow),
                "stats": stats(&out.stats),
            });
            if let Some(c) = &cut {
                v["cut_vertices"] = json!(c.vertices);
                v["conductance"] = num(c.conductance);
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut in_cut = vec![false; g.n()];
            if let Some(c) = &cut {
                for &u in &c.vertices {
                    in_cut[u] = true;
                }
            }
            let rows = out.x.iter().enumerate().map(|(u, &x)| {
                let mut row = vec![u.to_string(), csv_real(x)];
                if cut.is_some() {
                    row.push((in_cut[u] as u8).to_string());
                }
                row
            });
            let header: &[&str] =
                if cut.is_some() { &["vertex", "potential", "in_cut"] } else { &["vertex", "potential"] };
            csv_rows(header, rows)
        }
    };
    emit(&text, cli.output.as_deref())?;
    Ok(0)
}

struct Check {
    name: &'static str,
    value: f64,
    bound: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.value <= self.bound
    }
}

fn verify(cli: &Cli) -> Result<u8> {
    let cfg = solver_config(cli)?;
    let g = ingest(cli)?;
    if g.n() > QP_MAX_VERTICES {
        return Err(Error::Config(format!("verify mode is limited to {QP_MAX_VERTICES} vertices")));
    }
    let d = demand(cli, &g)?;
    let inst = Instance::l2(g.clone(), &d)?;
    let exact = qp_solve_exact(&inst)?;
    let opt = exact.energy;
    let slack = 1e-12 * opt.abs().max(1.0);
    let solved = l2_diffusion(&g, &d, cli.eps, &cfg)?;
    let single = recursive_approx_diffusion(&inst, &cfg)?;
    let lowest = |x: &[f64]| x.iter().cloned().fold(0.0, f64::min);
    let exact_flow = g.potential_flow(&exact.x)?;
    let net = g.residue(&exact_flow)?;
    let capacity_excess = net.iter().zip(&d).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let checks = [
        Check { name: "oracle_kkt_residual", value: exact.kkt_residual, bound: 1e-9 * opt.abs().max(1.0) },
        Check { name: "oracle_sink_capacity", value: capacity_excess, bound: 1e-9 * opt.abs().max(1.0) },
        Check { name: "solve_energy", value: solved.energy, bound: opt / (1.0 + cli.eps) + slack },
        Check { name: "solve_feasible", value: -lowest(&solved.x), bound: 0.0 },
        Check { name: "recursive_energy", value: single.energy, bound: opt / 2.0 + slack },
        Check { name: "recursive_feasible", value: -lowest(&single.x), bound: 0.0 },
    ];
    let ok = checks.iter().all(Check::pass);
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "pass": c.pass(), "value": num(c.value), "bound": num(c.bound) }))
                .collect();
            json_text(&json!({
                "schema": SCHEMA,
                "mode": "verify",
                "graph": graph_summary(&g),
                "eps": num(cli.eps),
                "optimum": num(opt),
                "checks": list,
                "pass": ok,
            }))
        }
        Format::Csv => csv_rows(
            &["check", "pass", "value", "bound"],
            checks.iter().map(|c| vec![c.name.to_string(), c.pass().to_string(), csv_real(c.value), csv_real(c.bound)]),
        ),
    };
    emit(&text, cli.output.as_deref())?;
    for c in &checks {
        eprintln!("{} {}", if c.pass() { "PASS" } else { "FAIL" }, c.name);
    }
    Ok(if ok { 0 } else { VERIFY_FAILED })
}

fn bench_instance(family: &str, side: usize, seed: u64) -> Result<(Arc<Graph>, Vec<f64>)> {
    let (g, source) = match family {
        "grid" => (gen::grid(side, side), side / 2 * side + side / 2),
        _ => {
            let n = (side * side).max(4);
            (gen::expander(n + n % 2, 4, seed)?, 0)
        }
    };
    let d = build_demand(&g, &[source], 0.25 * g.total_volume(), false)?;
    Ok((Arc::new(g), d))
}

fn bench(cli: &Cli) -> Result<u8> {
    let cfg = solver_config(cli)?;
    if cli.sizes.iter().any(|&s| s < 2) {
        return Err(Error::Config("bench sizes must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for family in ["grid", "expander"] {
        for &side in &cli.sizes {
            let (g, d) = bench_instance(family, side, cli.seed)?;
            let started = Instant::now();
            let out = l2_diffusion(&g, &d, cli.eps, &cfg)?;
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let oracle_calls: usize = out.stats.levels.iter().map(|l| l.oracle_calls).sum();
            eprintln!("{family} n={} m={} {wall_ms:.0} ms", g.n(), g.m());
            rows.push((family, g.n(), g.m(), wall_ms, oracle_calls, out.stats.levels.len(), out.energy));
        }
    }
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_rows(
            &["family", "n", "m", "wall_ms", "oracle_calls", "levels"],
            rows.iter().map(|r| {
                vec![
                    r.0.to_string(),
                    r.1.to_string(),
                    r.2.to_string(),
                    format!("{:.3}", r.3),
                    r.4.to_string(),
                    r.5.to_string(),
                ]
            }),
        ),
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({ "family": r.0, "n": r.1, "m": r.2, "wall_ms": num(r.3), "oracle_calls": r.4, "levels": r.5, "energy": num(r.6) })
                })
                .collect();
            json_text(&json!({ "schema": SCHEMA, "mode": "bench", "eps": num(cli.eps), "runs": list }))
        }
    };
    emit(&text, cli.output.as_deref())?;
    Ok(0)
}
