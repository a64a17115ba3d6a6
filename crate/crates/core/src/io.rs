//! hMETIS-style hypergraph files and node-weight files.
//!
//! Hypergraph: the first non-comment line is `m n [fmt]`. With `fmt = 1`
//! every hyperedge line starts with its weight, followed by 1-based node ids;
//! with `fmt` absent or `0` all weights are 1. Lines starting with `%` are
//! comments. Node weights: `n` lines with one positive number each.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::reduction::ReducedGraph;

/// A hypergraph exactly as read from a file, before cleaning.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHypergraph {
    pub n: usize,
    /// 0-based node ids; may still contain singletons or repeated nodes.
    pub edges: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Parse { line, message: format!("invalid {what} `{tok}`") })
}

pub fn parse_hmetis(text: &str) -> Result<RawHypergraph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "missing header `m n [fmt]`".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 || toks.len() > 3 {
        return Err(Error::Parse { line: hline, message: "header must be `m n [fmt]`".into() });
    }
    let m: usize = parse_num(toks[0], hline, "hyperedge count")?;
    let n: usize = parse_num(toks[1], hline, "node count")?;
    let weighted = match toks.get(2) {
        None => false,
        Some(t) => match parse_num::<u32>(t, hline, "format code")? {
            0 => false,
            1 => true,
            other => {
                return Err(Error::Parse {
                    line: hline,
                    message: format!("unsupported format code {other} (expected 0 or 1)"),
                })
            }
        },
    };
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (line, body) in lines.by_ref().take(m) {
        let mut toks = body.split_whitespace();
        let w = if weighted {
            let tok = toks.next().ok_or_else(|| Error::Parse { line, message: "empty line".into() })?;
            let w: f64 = parse_num(tok, line, "hyperedge weight")?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Parse { line, message: format!("hyperedge weight {w} must be positive") });
            }
            w
        } else {
            1.0
        };
        let mut e = Vec::new();
        for tok in toks {
            let id: usize = parse_num(tok, line, "node id")?;
            if id == 0 || id > n {
                return Err(Error::Parse { line, message: format!("node id {id} outside 1..={n}") });
            }
            e.push(id - 1);
        }
        if e.is_empty() {
            return Err(Error::Parse { line, message: "hyperedge without nodes".into() });
        }
        edges.push(e);
        weights.push(w);
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected {m} hyperedges, found {}", edges.len()),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse { line, message: "trailing content after the last hyperedge".into() });
    }
    Ok(RawHypergraph { n, edges, weights })
}

pub fn read_hmetis<R: BufRead>(mut reader: R) -> Result<RawHypergraph> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    parse_hmetis(&text)
}

/// Parses a node-weight file with exactly `n` positive values.
pub fn parse_node_weights(text: &str, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    for (line, body) in content_lines(text) {
        let v: f64 = parse_num(body, line, "node weight")?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveNodeWeight { node: out.len(), value: v });
        }
        out.push(v);
    }
    if out.len() != n {
        return Err(Error::WeightLength { expected: n, got: out.len() });
    }
    Ok(out)
}

/// Writes a hypergraph in the weighted (`fmt = 1`) hMETIS format.
pub fn write_hmetis<W: Write>(mut out: W, raw: &RawHypergraph) -> std::io::Result<()> {
    writeln!(out, "{} {} 1", raw.edges.len(), raw.n)?;
    for (e, w) in raw.edges.iter().zip(&raw.weights) {
        write!(out, "{w}")?;
        for v in e {
            write!(out, " {}", v + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Dumps a reduced graph as `u v weight` lines with 0-based ids.
pub fn write_edge_list<W: Write>(mut out: W, g: &ReducedGraph) -> std::io::Result<()> {
    for arc in g.arcs() {
        writeln!(out, "{} {} {}", arc.tail, arc.head, arc.weight)?;
    }
    Ok(())
}
