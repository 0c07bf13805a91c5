//! Graph files.
//!
//! Two encodings are accepted. The text form starts with a header line
//! `n m kind` (`kind` is `directed` or `undirected`) followed by `m` lines of
//! 1-based `u v` pairs; blank lines and lines starting with `#` are skipped.
//! The object form is a JSON document `{"n": .., "kind": .., "edges": [[u, v], ..]}`.

use std::fmt;
use std::str::FromStr;

use hamb_core::graph::MAX_VERTICES;
use hamb_core::{DiGraph, Graph, UndiGraph};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Environment variable that may lower the vertex cap.
pub const MAX_N_ENV: &str = "HAMB_MAX_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Object,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Object => "object",
        })
    }
}

/// The vertex cap in force: 64, or the value of `HAMB_MAX_N` when that is a
/// smaller positive integer.
pub fn max_vertices() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .map_or(MAX_VERTICES, |v| v.min(MAX_VERTICES))
}

/// Picks the object form when the first non-blank byte is `{`.
pub fn detect(input: &str) -> Format {
    match input.trim_start().chars().next() {
        Some('{') => Format::Object,
        _ => Format::Text,
    }
}

pub fn parse_graph(input: &str, format: Option<Format>, max_n: usize) -> Result<Graph, ParseError> {
    match format.unwrap_or_else(|| detect(input)) {
        Format::Text => parse_text(input, max_n),
        Format::Object => parse_object(input, max_n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Directed,
    Undirected,
}

impl FromStr for Kind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "directed" => Ok(Kind::Directed),
            "undirected" => Ok(Kind::Undirected),
            _ => Err(()),
        }
    }
}

/// Whitespace-separated tokens of one line, with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

fn parse_number(line: usize, (col, tok): (usize, &str), what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::at(line, col, format!("expected {what}, found `{tok}`")))
}

/// Shared header and edge checks, independent of the encoding.
struct Builder {
    n: usize,
    kind: Kind,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn header(n: usize, kind: Kind, max_n: usize, at: impl Fn(String) -> ParseError) -> Result<Self, ParseError> {
        if n == 0 {
            return Err(at("graph must have at least one vertex".into()));
        }
        if n > max_n {
            return Err(at(format!("n = {n} exceeds the vertex limit of {max_n}")).size_limit());
        }
        Ok(Builder {
            n,
            kind,
            edges: Vec::new(),
        })
    }

    /// Checks an edge; `at(k)` locates the error at the first (k = 0) or
    /// second (k = 1) endpoint.
    fn edge(&mut self, u: usize, v: usize, at: impl Fn(usize, String) -> ParseError) -> Result<(), ParseError> {
        for (k, x) in [(0, u), (1, v)] {
            if x == 0 || x > self.n {
                return Err(at(k, format!("vertex {x} out of range 1..={}", self.n)));
            }
        }
        if u == v {
            return Err(at(0, format!("self-loop at vertex {u}")));
        }
        self.edges.push((u - 1, v - 1));
        Ok(())
    }

    fn finish(self) -> Graph {
        match self.kind {
            Kind::Directed => Graph::Directed(
                DiGraph::from_arcs(self.n, self.edges).expect("edges were validated"),
            ),
            Kind::Undirected => Graph::Undirected(
                UndiGraph::from_edges(self.n, self.edges).expect("edges were validated"),
            ),
        }
    }
}

fn parse_text(input: &str, max_n: usize) -> Result<Graph, ParseError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });

    let (hl, header) = lines
        .next()
        .ok_or_else(|| ParseError::at(1, 1, "missing header line `n m kind`"))?;
    let ht = tokens(header);
    if ht.len() != 3 {
        let col = ht.get(3).map_or(header.len() + 1, |t| t.0);
        return Err(ParseError::at(hl, col, format!("header must be `n m kind`, found {} field(s)", ht.len())));
    }
    let n = parse_number(hl, ht[0], "vertex count")?;
    let m = parse_number(hl, ht[1], "edge count")?;
    let kind = ht[2]
        .1
        .parse::<Kind>()
        .map_err(|_| ParseError::at(hl, ht[2].0, format!("unknown kind `{}`, expected directed or undirected", ht[2].1)))?;
    let mut b = Builder::header(n, kind, max_n, |msg| ParseError::at(hl, ht[0].0, msg))?;

    let mut last_line = hl;
    for (ln, line) in lines {
        let t = tokens(line);
        if b.edges.len() == m {
            return Err(ParseError::at(ln, t[0].0, format!("more than the {m} declared edge(s)")));
        }
        if t.len() != 2 {
            let col = t.get(2).map_or(line.len() + 1, |t| t.0);
            return Err(ParseError::at(ln, col, format!("edge line must be `u v`, found {} field(s)", t.len())));
        }
        let u = parse_number(ln, t[0], "vertex")?;
        let v = parse_number(ln, t[1], "vertex")?;
        b.edge(u, v, |k, msg| ParseError::at(ln, t[k].0, msg))?;
        last_line = ln;
    }
    if b.edges.len() < m {
        return Err(ParseError::at(
            last_line + 1,
            1,
            format!("expected {m} edge(s), found {}", b.edges.len()),
        ));
    }
    Ok(b.finish())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    n: usize,
    kind: String,
    edges: Vec<[usize; 2]>,
}

fn parse_object(input: &str, max_n: usize) -> Result<Graph, ParseError> {
    let doc: ObjectFile = serde_json::from_str(input).map_err(|e| {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        ParseError::at(e.line(), e.column(), msg)
    })?;
    let kind = doc
        .kind
        .parse::<Kind>()
        .map_err(|_| ParseError::unplaced(format!("kind: unknown kind `{}`, expected directed or undirected", doc.kind)))?;
    let mut b = Builder::header(doc.n, kind, max_n, |msg| ParseError::unplaced(format!("n: {msg}")))?;
    for (idx, [u, v]) in doc.edges.iter().copied().enumerate() {
        b.edge(u, v, |k, msg| ParseError::unplaced(format!("edges[{idx}][{k}]: {msg}")))?;
    }
    Ok(b.finish())
}

fn edge_list(g: &Graph) -> (&'static str, Vec<(usize, usize)>) {
    match g {
        Graph::Directed(d) => ("directed", d.arcs().map(|(u, v)| (u + 1, v + 1)).collect()),
        Graph::Undirected(u) => ("undirected", u.edges().map(|(a, b)| (a + 1, b + 1)).collect()),
    }
}

/// Serializes a graph; parsing the result yields an identical graph.
pub fn write_graph(g: &Graph, format: Format) -> String {
    let (kind, edges) = edge_list(g);
    match format {
        Format::Text => {
            let mut s = format!("{} {} {kind}\n", g.n(), edges.len());
            for (u, v) in edges {
                s.push_str(&format!("{u} {v}\n"));
            }
            s
        }
        Format::Object => {
            let doc = ObjectFile {
                n: g.n(),
                kind: kind.to_string(),
                edges: edges.into_iter().map(|(u, v)| [u, v]).collect(),
            };
            let mut s = serde_json::to_string(&doc).expect("plain data serializes");
            s.push('\n');
            s
        }
    }
}
