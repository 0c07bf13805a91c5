//! Deterministic graph generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DiGraph, UndiGraph};

/// What kind of graph a generator should emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Undirected,
    /// The doubled digraph of an undirected graph.
    SymmetricDigraph,
    Digraph,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "undirected" => Ok(GraphKind::Undirected),
            "symmetric" | "symmetric-digraph" => Ok(GraphKind::SymmetricDigraph),
            "directed" | "digraph" => Ok(GraphKind::Digraph),
            other => Err(Error::UnknownName {
                what: "graph kind",
                name: other.to_string(),
            }),
        }
    }
}

/// Either flavour of graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Graph {
    Directed(DiGraph),
    Undirected(UndiGraph),
}

impl Graph {
    pub fn n(&self) -> usize {
        match self {
            Graph::Directed(g) => g.n(),
            Graph::Undirected(g) => g.n(),
        }
    }

    /// The digraph the counters run on: undirected graphs are doubled.
    pub fn as_digraph(&self) -> DiGraph {
        match self {
            Graph::Directed(g) => g.clone(),
            Graph::Undirected(g) => g.to_symmetric_digraph(),
        }
    }
}

/// Named deterministic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Complete,
    Cycle,
    Path,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Family::Complete),
            "cycle" => Ok(Family::Cycle),
            "path" => Ok(Family::Path),
            other => Err(Error::UnknownName {
                what: "family",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Path => "path",
        })
    }
}

fn finish(kind: GraphKind, n: usize, pairs: Vec<(usize, usize)>) -> Result<Graph> {
    match kind {
        GraphKind::Undirected => Ok(Graph::Undirected(UndiGraph::from_edges(n, pairs)?)),
        GraphKind::SymmetricDigraph => Ok(Graph::Directed(
            UndiGraph::from_edges(n, pairs)?.to_symmetric_digraph(),
        )),
        GraphKind::Digraph => Ok(Graph::Directed(DiGraph::from_arcs(n, pairs)?)),
    }
}

/// Erdős–Rényi `G(n, p)`.
///
/// Candidate pairs are visited in a fixed order (`u < v` for the
/// undirected and symmetric kinds, every `u != v` row-major for digraphs)
/// and each is kept when a uniform draw from a ChaCha8 stream seeded with
/// `seed` falls below `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64, kind: GraphKind) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        let from = if kind == GraphKind::Digraph { 0 } else { u + 1 };
        for v in from..n {
            if u != v && rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    finish(kind, n, pairs)
}

/// Complete graph, cycle `1 -> 2 -> ... -> n -> 1`, or path `1 -> ... -> n`.
/// Directed cycles and paths follow ascending labels.
pub fn gen_family(family: Family, n: usize, kind: GraphKind) -> Result<Graph> {
    let pairs: Vec<(usize, usize)> = match family {
        Family::Complete => {
            let directed = kind == GraphKind::Digraph;
            (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| if directed { u != v } else { u < v })
                .collect()
        }
        Family::Cycle => {
            if n < 3 {
                return Err(Error::TooSmall {
                    what: "cycle family",
                    n,
                    min: 3,
                });
            }
            (0..n).map(|u| (u, (u + 1) % n)).collect()
        }
        Family::Path => (1..n).map(|v| (v - 1, v)).collect(),
    };
    finish(kind, n, pairs)
}
