use std::fmt::Write as _;
use std::path::Path;

use flowdiff::solver::SolveStats;
use flowdiff::Result;
use serde_json::{json, Number, Value};

pub const SCHEMA: u32 = 1;

/// A JSON number with 17 significant digits.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    format!("{v:.16e}").parse::<Number>().map(Value::Number).unwrap_or(Value::Null)
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

/// Solver counters without wall-clock times, so that reruns compare equal.
pub fn stats(s: &SolveStats) -> Value {
    let levels: Vec<Value> = s
        .levels
        .iter()
        .map(|l| {
            json!({
                "oracle_calls": l.oracle_calls,
                "base_solves": l.base_solves,
                "sparsifier_builds": l.sparsifier_builds,
                "cache_hits": l.cache_hits,
                "max_quality": num(l.max_quality),
                "agd_iterations": l.agd_iterations,
                "jtree_solves": l.jtree_solves,
                "eliminated_vertices": l.eliminated_vertices,
                "core_refinements": l.core_refinements,
            })
        })
        .collect();
    json!({
        "refinement_steps": s.refinement_steps,
        "energies": nums(&s.energies),
        "levels": levels,
    })
}

pub fn csv_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_rows<I: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: I) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
