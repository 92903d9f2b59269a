//! Plain-text graph formats.
//!
//! Edge list:
//!
//! ```text
//! p 3
//! 0 1 1/2
//! 1 2 3/1
//! ```
//!
//! Lines starting with `#` or `c` are comments. DOT output lists every
//! vertex so that isolated vertices survive a round trip.

use std::fmt::Write as _;

use super::{Conductance, GraphError, WeightedGraph};

pub fn to_edge_list<W: Conductance>(g: &WeightedGraph<W>) -> String {
    let mut out = format!("p {}\n", g.vertex_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight.to_token());
    }
    out
}

pub fn parse_edge_list<W: Conductance>(text: &str) -> Result<WeightedGraph<W>, GraphError> {
    let mut graph: Option<WeightedGraph<W>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("c ") || line == "c" {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |message: &str| GraphError::Parse { line: line_no, message: message.into() };
        match (&mut graph, fields.as_slice()) {
            (None, ["p", n]) => {
                let n = n.parse().map_err(|_| err("bad vertex count"))?;
                graph = Some(WeightedGraph::new(n));
            }
            (None, _) => return Err(err("expected header `p <vertex_count>`")),
            (Some(_), ["p", ..]) => return Err(err("duplicate header")),
            (Some(g), [u, v, w]) => {
                let u = u.parse().map_err(|_| err("bad vertex id"))?;
                let v = v.parse().map_err(|_| err("bad vertex id"))?;
                let w = W::from_token(w).ok_or_else(|| err("bad weight"))?;
                g.add_edge(u, v, w)?;
            }
            (Some(_), _) => return Err(err("expected `u v weight`")),
        }
    }
    graph.ok_or(GraphError::Parse { line: 0, message: "missing header".into() })
}

pub fn to_dot<W: Conductance>(g: &WeightedGraph<W>) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        let _ = writeln!(out, "  {v};");
    }
    for e in g.edges() {
        let _ = writeln!(out, "  {} -- {} [weight=\"{}\"];", e.u, e.v, e.weight.to_token());
    }
    out.push_str("}\n");
    out
}

/// Reads the subset of DOT written by [`to_dot`].
pub fn parse_dot<W: Conductance>(text: &str) -> Result<WeightedGraph<W>, GraphError> {
    let mut vertex_count = 0;
    let mut edges = Vec::new();
    let mut opened = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: &str| GraphError::Parse { line: line_no, message: message.into() };
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        if !opened {
            if line.starts_with("graph") && line.ends_with('{') {
                opened = true;
                continue;
            }
            return Err(err("expected `graph <name> {`"));
        }
        if line == "}" {
            break;
        }
        let body = line.strip_suffix(';').ok_or_else(|| err("missing `;`"))?;
        if let Some((lhs, rest)) = body.split_once("--") {
            let u: usize = lhs.trim().parse().map_err(|_| err("bad vertex id"))?;
            let (v, attrs) = rest.trim().split_once('[').ok_or_else(|| err("missing weight attribute"))?;
            let v: usize = v.trim().parse().map_err(|_| err("bad vertex id"))?;
            let token = attrs
                .trim()
                .strip_prefix("weight=\"")
                .and_then(|s| s.strip_suffix("\"]"))
                .ok_or_else(|| err("expected [weight=\"...\"]"))?;
            let w = W::from_token(token).ok_or_else(|| err("bad weight"))?;
            edges.push((u, v, w));
        } else {
            let v: usize = body.parse().map_err(|_| err("bad vertex id"))?;
            vertex_count = vertex_count.max(v + 1);
        }
    }
    if !opened {
        return Err(GraphError::Parse { line: 0, message: "empty document".into() });
    }
    WeightedGraph::from_edges(vertex_count, edges)
}
