//! Plain-text edge-list format.
//!
//! ```text
//! n m
//! u v      (m lines, 0 <= u < v < n)
//! ```
//!
//! The writer always emits edges in ascending lexicographic order, so output is
//! canonical and `save -> load -> save` is bit-exact. The reader accepts edges
//! in any order but rejects repeats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Graph, GraphError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed header `{0}` (expected `n m`)")]
    MalformedHeader(String),
    #[error("line {line}: malformed edge `{content}` (expected `u v`)")]
    MalformedEdge { line: usize, content: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    IndexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: edge {u} {v} is not written as u < v")]
    AsymmetricEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: edge {u} {v} is listed twice")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or_else(|| ParseError::MalformedHeader(String::new()))?;
    let (n, m) = parse_pair(header).ok_or_else(|| ParseError::MalformedHeader(header.to_string()))?;

    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut seen = std::collections::HashSet::new();
    let mut found = 0;
    for (line, content) in lines {
        let (u, v) = parse_pair(content).ok_or_else(|| ParseError::MalformedEdge {
            line,
            content: content.to_string(),
        })?;
        for vertex in [u, v] {
            if vertex >= n {
                return Err(ParseError::IndexOutOfRange { line, vertex, n });
            }
        }
        if u >= v {
            return Err(ParseError::AsymmetricEdge { line, u, v });
        }
        if !seen.insert((u, v)) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        lists[u].push(v as u32);
        lists[v].push(u as u32);
        found += 1;
    }
    if found != m {
        return Err(ParseError::EdgeCountMismatch { declared: m, found });
    }
    for list in &mut lists {
        list.sort_unstable();
    }
    Ok(Graph::from_sorted_lists(lists))
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let mut it = s.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    writeln!(out, "{} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_graph(&text)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    fs::write(path, format_graph(g))?;
    Ok(())
}
