//! Graph representations backed by packed bit rows.
//!
//! Every adjacency row is a single `u64`, so graphs are capped at
//! [`MAX_VERTICES`] vertices. Internally vertices are `0..n`; the
//! `build_*` constructors and the `Display` impls use the 1-based labels
//! found in graph files.

use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count representable by the bit-row storage.
pub const MAX_VERTICES: usize = 64;

/// Read access to a square 0-1 matrix stored as bit rows.
///
/// Bit `j` of `row_bits(i)` is the entry `(i, j)`.
pub trait ZeroOneMatrix {
    fn dim(&self) -> usize;
    fn row_bits(&self, i: usize) -> u64;

    fn entry(&self, i: usize, j: usize) -> bool {
        (self.row_bits(i) >> j) & 1 == 1
    }

    fn row_sum(&self, i: usize) -> usize {
        self.row_bits(i).count_ones() as usize
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn swap_bits(x: u64, i: usize, j: usize) -> u64 {
    if ((x >> i) ^ (x >> j)) & 1 == 1 {
        x ^ ((1u64 << i) | (1u64 << j))
    } else {
        x
    }
}

/// Removes bit `i` and shifts the higher bits down by one.
#[inline]
fn remove_bit(x: u64, i: usize) -> u64 {
    let low = x & ((1u64 << i) - 1);
    let high = if i == 63 { 0 } else { (x >> (i + 1)) << i };
    low | high
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "graph storage",
            n,
            limit: MAX_VERTICES,
        });
    }
    Ok(())
}

fn check_label(label: usize, n: usize) -> Result<usize> {
    if label == 0 || label > n {
        return Err(Error::VertexOutOfRange { label, n });
    }
    Ok(label - 1)
}

/// The contraction `A'(ij)`: swap columns `i` and `j`, then delete row `i`
/// and column `i`.
fn contract_rows(rows: &[u64], i: usize, j: usize) -> Vec<u64> {
    rows.iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, &bits)| remove_bit(swap_bits(bits, i, j), i))
        .collect()
}

/// A simple directed graph: zero-diagonal 0-1 adjacency.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    n: usize,
    rows: Vec<u64>,
}

impl DiGraph {
    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(DiGraph {
            n,
            rows: vec![0; n],
        })
    }

    /// Builds a digraph from 0-based arcs. Duplicates collapse.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = DiGraph::empty(n)?;
        for (u, v) in arcs {
            if u >= n {
                return Err(Error::VertexOutOfRange { label: u + 1, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { label: v + 1, n });
            }
            if u == v {
                return Err(Error::SelfLoop { label: u + 1 });
            }
            g.rows[u] |= 1u64 << v;
        }
        Ok(g)
    }

    /// Builds a digraph from raw bit rows, rejecting diagonal bits and bits
    /// beyond column `n - 1`.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if rows.len() != n {
            return Err(Error::InvalidIndex {
                i: rows.len(),
                j: rows.len(),
                n,
            });
        }
        let mask = full_mask(n);
        for (i, &bits) in rows.iter().enumerate() {
            if bits & !mask != 0 {
                let col = (bits & !mask).trailing_zeros() as usize;
                return Err(Error::VertexOutOfRange { label: col + 1, n });
            }
            if (bits >> i) & 1 == 1 {
                return Err(Error::SelfLoop { label: i + 1 });
            }
        }
        Ok(DiGraph { n, rows })
    }

    /// Test hook: builds a digraph without checking the zero-diagonal
    /// invariant. Used by the self-test negative control.
    #[doc(hidden)]
    pub fn from_rows_unchecked(n: usize, rows: Vec<u64>) -> Self {
        DiGraph { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        (self.rows[u] >> v) & 1 == 1
    }

    pub fn out_neighbors(&self, u: usize) -> u64 {
        self.rows[u]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// All arcs as 0-based pairs in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, &bits)| BitIter(bits).map(move |v| (u, v)))
    }

    pub fn arc_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn has_zero_diagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &bits)| (bits >> i) & 1 == 0)
    }

    /// True iff the adjacency equals its transpose.
    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.has_arc(v, u))
    }

    /// Out-degrees `r_i`.
    pub fn row_sums(&self) -> DegreeSequence {
        DegreeSequence(self.rows.iter().map(|r| r.count_ones() as usize).collect())
    }

    /// The contraction `A'(ij)` on 0-based indices.
    pub fn contract(&self, i: usize, j: usize) -> Result<ContractedMatrix> {
        ContractedMatrix::from_digraph(self).contract(i, j)
    }
}

impl ZeroOneMatrix for DiGraph {
    fn dim(&self) -> usize {
        self.n
    }

    fn row_bits(&self, i: usize) -> u64 {
        self.rows[i]
    }
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<_> = self.arcs().map(|(u, v)| (u + 1, v + 1)).collect();
        f.debug_struct("DiGraph")
            .field("n", &self.n)
            .field("arcs", &arcs)
            .finish()
    }
}

/// Builds a digraph from 1-based labeled arcs.
pub fn build_digraph(n: usize, arcs: &[(usize, usize)]) -> Result<DiGraph> {
    let mut zero_based = Vec::with_capacity(arcs.len());
    for &(u, v) in arcs {
        zero_based.push((check_label(u, n)?, check_label(v, n)?));
    }
    DiGraph::from_arcs(n, zero_based)
}

/// A simple undirected graph, stored as a symmetric zero-diagonal adjacency.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UndiGraph {
    n: usize,
    rows: Vec<u64>,
}

impl UndiGraph {
    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(UndiGraph {
            n,
            rows: vec![0; n],
        })
    }

    /// Builds an undirected graph from 0-based pairs. `{u,v}` and `{v,u}`
    /// are the same edge; duplicates collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = UndiGraph::empty(n)?;
        for (u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { label: u + 1, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { label: v + 1, n });
            }
            if u == v {
                return Err(Error::SelfLoop { label: u + 1 });
            }
            g.rows[u] |= 1u64 << v;
            g.rows[v] |= 1u64 << u;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.rows[u] >> v) & 1 == 1
    }

    /// Edges as 0-based pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(u, &bits)| {
            let above = if u + 1 >= 64 { 0 } else { bits >> (u + 1) << (u + 1) };
            BitIter(above).map(move |v| (u, v))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn degrees(&self) -> DegreeSequence {
        DegreeSequence(self.rows.iter().map(|r| r.count_ones() as usize).collect())
    }

    /// Replaces every edge `{i,j}` by the two arcs `i->j` and `j->i`.
    pub fn to_symmetric_digraph(&self) -> DiGraph {
        DiGraph {
            n: self.n,
            rows: self.rows.clone(),
        }
    }
}

impl fmt::Debug for UndiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().map(|(u, v)| (u + 1, v + 1)).collect();
        f.debug_struct("UndiGraph")
            .field("n", &self.n)
            .field("edges", &edges)
            .finish()
    }
}

/// Builds an undirected graph from 1-based labeled pairs.
pub fn build_undigraph(n: usize, edges: &[(usize, usize)]) -> Result<UndiGraph> {
    let mut zero_based = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        zero_based.push((check_label(u, n)?, check_label(v, n)?));
    }
    UndiGraph::from_edges(n, zero_based)
}

/// Row sums `r_i` of a digraph or degrees `d_i` of an undirected graph.
///
/// Entries may reach `n` (not just `n - 1`) so that the sequence can also
/// describe contracted matrices, which allow a diagonal entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v > n) {
            return Err(Error::DegreeOutOfRange { index, value, n });
        }
        Ok(DegreeSequence(values))
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// A square 0-1 matrix produced by [`DiGraph::contract`].
///
/// Unlike [`DiGraph`] the diagonal may carry 1s: after contracting the arc
/// `i -> j`, the entry at the diagonal of slot `j` records the arc that
/// would close the cycle back to the start of the merged path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContractedMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl ContractedMatrix {
    pub fn from_digraph(g: &DiGraph) -> Self {
        ContractedMatrix {
            n: g.n,
            rows: g.rows.clone(),
        }
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        let mask = full_mask(n);
        if rows.len() != n || rows.iter().any(|&r| r & !mask != 0) {
            return Err(Error::InvalidIndex { i: n, j: n, n });
        }
        Ok(ContractedMatrix { n, rows })
    }

    /// The contraction `A'(ij)` on 0-based indices. Requires `i != j` and
    /// `n >= 2`; the result has dimension `n - 1`.
    pub fn contract(&self, i: usize, j: usize) -> Result<ContractedMatrix> {
        if self.n < 2 || i == j || i >= self.n || j >= self.n {
            return Err(Error::InvalidIndex { i, j, n: self.n });
        }
        Ok(ContractedMatrix {
            n: self.n - 1,
            rows: contract_rows(&self.rows, i, j),
        })
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Dense rendering, row by row.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j) as u8).collect())
            .collect()
    }
}

impl ZeroOneMatrix for ContractedMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn row_bits(&self, i: usize) -> u64 {
        self.rows[i]
    }
}

/// A Hamiltonian cycle in canonical form (0-based vertices).
///
/// Directed cycles are rotated so the smallest vertex comes first.
/// Undirected cycles are additionally reflected so that the second vertex
/// is smaller than the last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleWitness {
    vertices: Vec<usize>,
    directed: bool,
}

impl CycleWitness {
    pub fn new(vertices: Vec<usize>, directed: bool) -> Self {
        let mut w = CycleWitness { vertices, directed };
        w.canonicalize();
        w
    }

    fn canonicalize(&mut self) {
        let Some(pos) = self
            .vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map(|(i, _)| i)
        else {
            return;
        };
        self.vertices.rotate_left(pos);
        let n = self.vertices.len();
        if !self.directed && n > 2 && self.vertices[1] > self.vertices[n - 1] {
            self.vertices[1..].reverse();
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// The same cycle traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v[1..].reverse();
        CycleWitness::new(v, self.directed)
    }

    fn visits_all_once(&self, n: usize) -> bool {
        if self.vertices.len() != n {
            return false;
        }
        let mut seen = 0u64;
        for &v in &self.vertices {
            if v >= n || (seen >> v) & 1 == 1 {
                return false;
            }
            seen |= 1u64 << v;
        }
        true
    }

    fn consecutive_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// True iff this is a Hamiltonian cycle of `g`.
    pub fn is_cycle_of(&self, g: &DiGraph) -> bool {
        self.visits_all_once(g.n()) && self.consecutive_pairs().all(|(u, v)| g.has_arc(u, v))
    }

    /// True iff this is a Hamiltonian cycle of the undirected graph `g`.
    pub fn is_cycle_of_undirected(&self, g: &UndiGraph) -> bool {
        g.n() >= 3
            && self.visits_all_once(g.n())
            && self.consecutive_pairs().all(|(u, v)| g.has_edge(u, v))
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self
            .vertices
            .iter()
            .chain(self.vertices.first())
            .map(|v| (v + 1).to_string())
            .collect();
        if self.directed {
            write!(f, "({})", labels.join(", "))
        } else {
            write!(f, "{}", labels.join(" "))
        }
    }
}

/// Iterator over the set bit positions of a word, ascending.
#[derive(Debug, Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}
