//! Deterministic Graphviz export and a parser for the same dialect.

use std::fmt::Write;

use super::{EGraph, Edge};
use crate::error::{Error, Result};

/// Colour `c` is drawn with `PALETTE[(c - 1) % PALETTE.len()]`.
pub const PALETTE: [&str; 10] =
    ["black", "blue", "red", "darkgreen", "orange", "purple", "brown", "magenta", "cyan", "gray"];

pub fn to_dot(g: &EGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "// egraph q={} p={} d={}", g.q, g.p, g.d);
    out.push_str("graph egraph {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=point];\n");
    let lefts: Vec<String> = (1..=g.q).map(|i| format!("l{i};")).collect();
    let rights: Vec<String> = (1..=g.p).map(|j| format!("r{j};")).collect();
    let _ = writeln!(out, "  {{ rank=same; {} }}", lefts.join(" "));
    let _ = writeln!(out, "  {{ rank=same; {} }}", rights.join(" "));
    for e in g.edges() {
        let colour = PALETTE[(e.colour.max(1) - 1) % PALETTE.len()];
        let _ = writeln!(out, "  l{} -- r{} [colour={}, color=\"{colour}\"];", e.left, e.right, e.colour);
    }
    out.push_str("}\n");
    out
}

fn bad(line: &str) -> Error {
    Error::invalid(format!("unrecognised DOT line: {line:?}"))
}

fn vertex(token: &str, prefix: char) -> Option<usize> {
    token.trim().trim_end_matches(';').strip_prefix(prefix)?.parse().ok()
}

/// Parses text produced by [`to_dot`].
pub fn parse_dot(text: &str) -> Result<EGraph> {
    let mut d = None;
    let mut q = 0;
    let mut p = 0;
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix("// egraph") {
            for field in header.split_whitespace() {
                if let Some(v) = field.strip_prefix("d=") {
                    d = Some(v.parse().map_err(|_| bad(line))?);
                }
            }
        } else if let Some(body) = line.strip_prefix("{ rank=same;") {
            let names: Vec<&str> = body.trim_end_matches('}').split_whitespace().collect();
            if names.iter().all(|t| vertex(t, 'l').is_some()) {
                q = names.len();
            } else if names.iter().all(|t| vertex(t, 'r').is_some()) {
                p = names.len();
            } else {
                return Err(bad(line));
            }
        } else if line.contains("--") {
            let (ends, attrs) = line.split_once('[').ok_or_else(|| bad(line))?;
            let (l, r) = ends.split_once("--").ok_or_else(|| bad(line))?;
            let left = vertex(l, 'l').ok_or_else(|| bad(line))?;
            let right = vertex(r, 'r').ok_or_else(|| bad(line))?;
            let colour = attrs
                .split(',')
                .find_map(|a| a.trim().strip_prefix("colour="))
                .and_then(|v| v.trim_end_matches("];").parse().ok())
                .ok_or_else(|| bad(line))?;
            edges.push(Edge::new(left, right, colour));
        }
    }
    let d = d.ok_or_else(|| Error::invalid("missing `// egraph` header"))?;
    Ok(EGraph::new(q, p, d, edges))
}
