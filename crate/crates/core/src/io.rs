//! Line-oriented text formats for graphs, demands and VWFs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::vwf::{Piece, Vwf};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_token<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64> {
    match tok {
        "-inf" | "-Inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => {
            let v: f64 = parse_token(tok, line, what)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse { line, msg: format!("{what} `{tok}` is not finite") })
            }
        }
    }
}

/// Edge list: `u v [c]` per line, 0-based ids, `#` comments. The vertex
/// count is one more than the largest id.
pub fn parse_edge_list(text: &str) -> Result<Graph<f64>> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line, tokens) in content_lines(text) {
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse { line, msg: format!("expected `u v [c]`, found {} fields", tokens.len()) });
        }
        let u: usize = parse_token(tokens[0], line, "vertex id")?;
        let v: usize = parse_token(tokens[1], line, "vertex id")?;
        let c = match tokens.get(2) {
            Some(t) => parse_real(t, line, "conductance")?,
            None => 1.0,
        };
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at vertex {u}") });
        }
        if !(c > 0.0) {
            return Err(Error::Parse { line, msg: format!("conductance {c} is not positive") });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push(Edge { u, v, c });
    }
    Graph::new(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph<f64>> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_edge_list`] for graphs without trailing isolated
/// vertices.
pub fn write_edge_list(g: &Graph<f64>) -> String {
    let mut out = String::new();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.c).unwrap();
    }
    out
}

/// Demand file: `u d_u` per line; unlisted vertices get 0.
pub fn parse_demand(text: &str, n: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0; n];
    let mut seen = vec![false; n];
    for (line, tokens) in content_lines(text) {
        if tokens.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected `u d`, found {} fields", tokens.len()) });
        }
        let u: usize = parse_token(tokens[0], line, "vertex id")?;
        if u >= n {
            return Err(Error::Parse { line, msg: format!("vertex {u} outside 0..{n}") });
        }
        if seen[u] {
            return Err(Error::Parse { line, msg: format!("vertex {u} listed twice") });
        }
        seen[u] = true;
        d[u] = parse_real(tokens[1], line, "demand")?;
    }
    Ok(d)
}

/// A piece count `k`, then `s r a b` per piece; `s` may be `-inf`.
pub fn parse_vwf(text: &str) -> Result<Vwf<f64>> {
    let mut lines = content_lines(text);
    let (line, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty VWF block".into() })?;
    if head.len() != 1 {
        return Err(Error::Parse { line, msg: "expected the piece count".into() });
    }
    let k: usize = parse_token(head[0], line, "piece count")?;
    let mut pieces = Vec::with_capacity(k);
    for (line, tokens) in lines.by_ref().take(k) {
        if tokens.len() != 4 {
            return Err(Error::Parse { line, msg: format!("expected `s r a b`, found {} fields", tokens.len()) });
        }
        pieces.push(Piece::new(
            parse_real(tokens[0], line, "start")?,
            parse_real(tokens[1], line, "curvature")?,
            parse_real(tokens[2], line, "slope")?,
            parse_real(tokens[3], line, "offset")?,
        ));
    }
    if pieces.len() != k {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {k} pieces, found {}", pieces.len()),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse { line, msg: "trailing content after the last piece".into() });
    }
    Vwf::new(pieces)
}

pub fn write_vwf(f: &Vwf<f64>) -> String {
    let mut out = format!("{}\n", f.len());
    for p in f.pieces() {
        writeln!(out, "{} {} {} {}", p.start, p.r, p.a, p.b).unwrap();
    }
    out
}
