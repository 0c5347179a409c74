//! Text formats.
//!
//! Graph: a header line `n m`, then `m` lines `u v` with `0 <= u < v < n`.
//!
//! Unique coverage instance: a header line `m s`, then exactly `s` lines,
//! each a space-separated list of element ids. A blank line is an empty set.
//!
//! Pure profiles are `0`/`1` strings with vertex 0 leftmost. Mixed profiles
//! are JSON arrays of numbers.
//!
//! Parsers never panic on arbitrary input and report 1-based line numbers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{MixedProfile, StrategyProfile};
use crate::graph::Graph;
use crate::ucp::UcpInstance;

/// Largest vertex count the graph parser accepts.
pub const MAX_PARSED_VERTICES: usize = 1 << 24;

fn parse_num(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
}

fn header(line: Option<&str>, a: &str, b: &str) -> Result<(usize, usize)> {
    let line = line.ok_or_else(|| Error::parse(1, "missing header line"))?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::parse(1, format!("header must be `{a} {b}`")));
    }
    Ok((parse_num(toks[0], 1, a)?, parse_num(toks[1], 1, b)?))
}

/// Lines of `text` with a single trailing line terminator removed.
fn lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let lines = lines(text);
    let (n, m) = header(lines.first().copied(), "n", "m")?;
    if n > MAX_PARSED_VERTICES {
        return Err(Error::parse(1, format!("n = {n} exceeds {MAX_PARSED_VERTICES}")));
    }
    let mut edges = Vec::with_capacity(m.min(lines.len()));
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in lines.iter().enumerate().skip(1) {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            if idx > m {
                continue;
            }
            return Err(Error::parse(line, "blank line where an edge was expected"));
        }
        if idx > m {
            return Err(Error::parse(line, format!("more than {m} edge lines")));
        }
        if toks.len() != 2 {
            return Err(Error::parse(line, "edge line must be `u v`"));
        }
        let u = parse_num(toks[0], line, "vertex id")?;
        let v = parse_num(toks[1], line, "vertex id")?;
        if v >= n {
            return Err(Error::parse(line, format!("vertex {v} out of range 0..{n}")));
        }
        if u == v {
            return Err(Error::parse(line, format!("self-loop at vertex {u}")));
        }
        if u > v {
            return Err(Error::parse(line, format!("edge `{u} {v}` must be written with u < v")));
        }
        if !seen.insert((u, v)) {
            return Err(Error::parse(line, format!("duplicate edge `{u} {v}`")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            lines.len() + 1,
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn parse_ucp(text: &str) -> Result<UcpInstance> {
    let lines = lines(text);
    let (m, s) = header(lines.first().copied(), "m", "s")?;
    if lines.len() - 1 < s {
        return Err(Error::parse(
            lines.len() + 1,
            format!("expected {s} set lines, found {}", lines.len() - 1),
        ));
    }
    let mut sets = Vec::with_capacity(s);
    for (idx, raw) in lines.iter().enumerate().skip(1) {
        let line = idx + 1;
        if idx > s {
            if raw.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(line, format!("more than {s} set lines")));
        }
        let mut set = Vec::new();
        for tok in raw.split_whitespace() {
            let e = parse_num(tok, line, "element id")?;
            if e >= m {
                return Err(Error::parse(line, format!("element {e} out of range 0..{m}")));
            }
            if set.contains(&e) {
                return Err(Error::parse(line, format!("element {e} repeated in one set")));
            }
            set.push(e);
        }
        sets.push(set);
    }
    UcpInstance::new(m, sets)
}

pub fn write_ucp(inst: &UcpInstance) -> String {
    let mut out = format!("{} {}\n", inst.universe_size(), inst.sets().len());
    for set in inst.sets() {
        let items: Vec<String> = set.iter().map(ToString::to_string).collect();
        out.push_str(&items.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_profile(text: &str) -> Result<StrategyProfile> {
    let text = text.trim();
    let mut bits = Vec::with_capacity(text.len());
    for (i, c) in text.chars().enumerate() {
        match c {
            '0' => bits.push(false),
            '1' => bits.push(true),
            _ => {
                return Err(Error::parse(
                    1,
                    format!("profile position {i}: expected 0 or 1, found {c:?}"),
                ))
            }
        }
    }
    Ok(StrategyProfile::new(bits))
}

pub fn write_profile(s: &StrategyProfile) -> String {
    s.to_string()
}

pub fn parse_mixed(text: &str) -> Result<MixedProfile> {
    let probs: Vec<f64> = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    MixedProfile::new(probs)
}

pub fn write_mixed(p: &MixedProfile) -> String {
    serde_json::to_string(p.probs()).expect("finite floats serialize")
}
