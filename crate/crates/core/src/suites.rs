//! Verification suites. Each one cross-checks two independent routes to
//! the same number (enumeration vs. DP, decision tree vs. exact count,
//! exact count vs. bound) over a fixed, seeded family of graphs.
//!
//! The acceptance tests and `hamb selftest` both run these.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    bregman_bound, dominance_compare, minc_bound, symmetric_bound, undirected_bounds,
};
use crate::error::Result;
use crate::estimator::{estimate, RowOrderPolicy, RowTable};
use crate::exact::{
    estimator_expectation, ham_bruteforce, ham_dp, ham_undirected, permanent_ryser, Count,
};
use crate::generate::{gen_family, gen_gnp, Family, Graph, GraphKind};
use crate::graph::{CycleWitness, DegreeSequence, DiGraph, UndiGraph, ZeroOneMatrix};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub id: u32,
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub time_limit: Option<Duration>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.time_limit.map_or(true, |limit| self.elapsed < limit)
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] {:>2} {:<28} {:>6} cases  {:>8.2}s",
            self.id,
            self.name,
            self.cases,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(limit) = self.time_limit {
            write!(f, " (limit {}s)", limit.as_secs())?;
        }
        for msg in self.failures.iter().take(5) {
            write!(f, "\n        {msg}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n        ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn error<E: fmt::Display>(&mut self, context: &str, e: E) {
        self.cases += 1;
        self.failures.push(format!("{context}: {e}"));
    }
}

fn run<F: FnOnce(&mut Tally)>(id: u32, name: &'static str, limit: Option<u64>, body: F) -> SuiteResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    body(&mut tally);
    SuiteResult {
        id,
        name,
        cases: tally.cases,
        failures: tally.failures,
        elapsed: start.elapsed(),
        time_limit: limit.map(Duration::from_secs),
    }
}

/// Graph with random edge density in `[0.3, 0.95)`.
fn random_graph(rng: &mut ChaCha8Rng, n: usize, kind: GraphKind) -> Graph {
    let p = rng.gen_range(0.3..0.95);
    gen_gnp(n, p, rng.gen(), kind).expect("generator parameters are valid")
}

/// Every simple digraph on `n` vertices, one per subset of the `n(n-1)`
/// off-diagonal positions.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = DiGraph> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|(u, v)| u != v)
        .collect();
    (0u64..1 << slots.len()).map(move |mask| {
        DiGraph::from_arcs(
            n,
            slots
                .iter()
                .enumerate()
                .filter(|(b, _)| (mask >> b) & 1 == 1)
                .map(|(_, &arc)| arc),
        )
        .expect("slots are in range")
    })
}

/// Every simple undirected graph on `n` vertices.
pub fn all_undigraphs(n: usize) -> impl Iterator<Item = UndiGraph> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u64..1 << slots.len()).map(move |mask| {
        UndiGraph::from_edges(
            n,
            slots
                .iter()
                .enumerate()
                .filter(|(b, _)| (mask >> b) & 1 == 1)
                .map(|(_, &e)| e),
        )
        .expect("slots are in range")
    })
}

/// Ascending, follow-path from every start, and `tables` random tables.
pub fn policy_panel(n: usize, tables: usize, rng: &mut impl Rng) -> Vec<RowOrderPolicy> {
    let mut policies = vec![RowOrderPolicy::Ascending];
    policies.extend((0..n).map(|start| RowOrderPolicy::FollowPath { start }));
    policies.extend((0..tables).map(|_| RowOrderPolicy::Table(RowTable::random(n, rng))));
    policies
}

/// Subset DP against brute-force enumeration: every digraph on 4 vertices
/// and 200 random digraphs with 5 to 9 vertices.
pub fn oracle_agreement() -> SuiteResult {
    run(1, "oracle agreement", Some(60), |t| {
        let compare = |t: &mut Tally, g: &DiGraph| match (ham_dp(g), ham_bruteforce(g)) {
            (Ok(a), Ok(b)) => t.check(a == b, || format!("dp {a} != brute {b} on {g:?}")),
            (Err(e), _) | (_, Err(e)) => t.error("oracle", e),
        };
        for g in all_digraphs(4) {
            compare(t, &g);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
        for _ in 0..200 {
            let n = rng.gen_range(5..=9);
            let g = random_graph(&mut rng, n, GraphKind::Digraph).as_digraph();
            compare(t, &g);
        }
    })
}

fn check_expectations(t: &mut Tally, g: &DiGraph, policies: &[RowOrderPolicy]) {
    let truth = match ham_dp(g) {
        Ok(c) => BigRational::from_integer(BigInt::from(c)),
        Err(e) => return t.error("ham_dp", e),
    };
    for policy in policies {
        match estimator_expectation(g, policy) {
            Ok(e) => t.check(e == truth, || {
                format!("E[X] = {e} but NH = {truth} under {policy} on {g:?}")
            }),
            Err(e) => t.error("expectation", e),
        }
    }
}

/// Exact expectation of the estimator equals the exact count for every
/// policy in the panel.
pub fn unbiasedness_exact() -> SuiteResult {
    run(2, "unbiasedness (exact)", Some(300), |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB1A5);
        for u in all_undigraphs(4) {
            let policies = policy_panel(4, 3, &mut rng);
            check_expectations(t, &u.to_symmetric_digraph(), &policies);
        }
        for _ in 0..50 {
            let n = rng.gen_range(5..=6);
            let g = random_graph(&mut rng, n, GraphKind::SymmetricDigraph).as_digraph();
            let policies = policy_panel(n, 3, &mut rng);
            check_expectations(t, &g, &policies);
        }
    })
}

pub const STATISTICAL_TRIALS: u64 = 100_000;
pub const STATISTICAL_SEED: u64 = 20_240_607;

/// Monte Carlo mean on the doubled `K7` lies within five standard errors
/// of 720.
pub fn unbiasedness_statistical() -> SuiteResult {
    run(3, "unbiasedness (statistical)", Some(30), |t| {
        let g = gen_family(Family::Complete, 7, GraphKind::SymmetricDigraph)
            .expect("K7")
            .as_digraph();
        let truth = match ham_dp(&g) {
            Ok(c) => c,
            Err(e) => return t.error("ham_dp", e),
        };
        t.check(truth == Count::from(720u32), || format!("NH(K7) = {truth}, expected 720"));
        match estimate(&g, &RowOrderPolicy::Ascending, STATISTICAL_TRIALS, STATISTICAL_SEED) {
            Ok(report) => {
                let deviation = (report.mean_f64() - 720.0).abs();
                t.check(deviation <= 5.0 * report.standard_error, || {
                    format!(
                        "mean {} deviates {deviation:.3} > 5 x se {:.3}",
                        report.mean_f64(),
                        report.standard_error
                    )
                });
            }
            Err(e) => t.error("estimate", e),
        }
    })
}

/// `NH <= Per <= Minc`, `Per <= Bregman` (1e-9 relative slack), and the
/// symmetric bound on symmetric inputs, over 500 random graphs.
pub fn bound_validity() -> SuiteResult {
    run(4, "bound validity", None, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB0_0D);
        let kinds = [GraphKind::Digraph, GraphKind::SymmetricDigraph, GraphKind::Undirected];
        for i in 0..500 {
            let n = rng.gen_range(1..=12);
            let graph = random_graph(&mut rng, n, kinds[i % 3]);
            let g = graph.as_digraph();
            let (ham, per) = match (ham_dp(&g), permanent_ryser(&g)) {
                (Ok(h), Ok(p)) => (h, p),
                (Err(e), _) | (_, Err(e)) => {
                    t.error("oracle", e);
                    continue;
                }
            };
            let r = g.row_sums();
            t.check(ham <= per, || format!("NH {ham} > Per {per} on {g:?}"));
            t.check(minc_bound(&r).admits(&per, 0.0), || {
                format!("Per {per} exceeds Minc on {g:?}")
            });
            t.check(bregman_bound(&r).admits(&per, 1e-9), || {
                format!("Per {per} exceeds Bregman on {g:?}")
            });
            if g.is_symmetric() && n >= 3 {
                match symmetric_bound(&g) {
                    Ok(b) => t.check(b.admits(&ham, 0.0), || {
                        format!("NH {ham} exceeds the symmetric bound on {g:?}")
                    }),
                    Err(e) => t.error("symmetric bound", e),
                }
            }
            if let Graph::Undirected(u) = &graph {
                if n >= 3 {
                    let (count, report) = match (ham_undirected(u), undirected_bounds(u)) {
                        (Ok(c), Ok(r)) => (c, r),
                        (Err(e), _) | (_, Err(e)) => {
                            t.error("undirected", e);
                            continue;
                        }
                    };
                    let symmetric = report.symmetric.as_ref().expect("n >= 3");
                    for (name, b, slack) in [
                        ("minc", &report.minc, 0.0),
                        ("symmetric", symmetric, 0.0),
                        ("bregman", &report.bregman, 1e-9),
                    ] {
                        t.check(b.admits(&count, slack), || {
                            format!("undirected NH {count} exceeds the halved {name} bound on {u:?}")
                        });
                    }
                }
            }
        }
    })
}

/// `prod r_i / 2^(n-1) <= prod (r_i+1)/2` on 10^4 random degree sequences.
pub fn dominance() -> SuiteResult {
    run(5, "dominance over Minc", None, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD0_111);
        for _ in 0..10_000 {
            let n = rng.gen_range(3..=50);
            let r: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let seq = DegreeSequence::new(r).expect("entries below n");
            let record = dominance_compare(&seq);
            t.check(record.new_le_minc, || format!("new bound exceeds Minc for {seq:?}"));
        }
    })
}

/// At `r_i = 5`, `n = 100` the new bound sits below Brégman:
/// `100 ln 5 - 99 ln 2 < 100 ln(120) / 5`.
pub fn bregman_remark() -> SuiteResult {
    run(6, "bregman comparison (r=5, n=100)", None, |t| {
        let new_log = 100.0 * 5f64.ln() - 99.0 * 2f64.ln();
        let bregman_log = 100.0 * 120f64.ln() / 5.0;
        t.check((new_log - 92.3222).abs() < 1e-3, || format!("ln(new) = {new_log}"));
        t.check((bregman_log - 95.7498).abs() < 1e-3, || format!("ln(bregman) = {bregman_log}"));
        t.check(new_log < bregman_log, || {
            format!("{new_log} is not below {bregman_log}")
        });
        let record = dominance_compare(&DegreeSequence::new(vec![5; 100]).expect("valid"));
        t.check(record.new_le_bregman, || "dominance_compare disagrees".to_string());
        t.check(
            (record.new.log_upper - new_log).abs() < 1e-9
                && (record.bregman.log_upper - bregman_log).abs() < 1e-9,
            || {
                format!(
                    "library logs {} / {} differ from direct evaluation",
                    record.new.log_upper, record.bregman.log_upper
                )
            },
        );
    })
}

fn check_halving(t: &mut Tally, u: &UndiGraph) {
    match (ham_undirected(u), ham_dp(&u.to_symmetric_digraph())) {
        (Ok(half), Ok(full)) => t.check(&half * 2u32 == full, || {
            format!("2 x {half} != {full} on {u:?}")
        }),
        (Err(e), _) | (_, Err(e)) => t.error("transformation", e),
    }
}

/// Undirected count is exactly half the doubled digraph's count: every
/// graph with 3 to 5 vertices and 100 random graphs with up to 9.
pub fn transformation() -> SuiteResult {
    run(7, "undirected halving", None, |t| {
        for n in 3..=5 {
            for u in all_undigraphs(n) {
                check_halving(t, &u);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7_2A45);
        for _ in 0..100 {
            let n = rng.gen_range(3..=9);
            if let Graph::Undirected(u) = random_graph(&mut rng, n, GraphKind::Undirected) {
                check_halving(t, &u);
            }
        }
    })
}

/// Cycles `C_n` attain the symmetric bound (2) and the second undirected
/// bound (1).
pub fn tightness() -> SuiteResult {
    run(8, "cycle tightness", None, |t| {
        let two = BigRational::from_integer(2.into());
        let one = BigRational::from_integer(1.into());
        for n in 3..=12 {
            let Ok(Graph::Undirected(c)) = gen_family(Family::Cycle, n, GraphKind::Undirected) else {
                t.error("generator", format!("C{n}"));
                continue;
            };
            let g = c.to_symmetric_digraph();
            let nh = ham_dp(&g).ok();
            t.check(nh == Some(Count::from(2u32)), || format!("NH(C{n} doubled) = {nh:?}"));
            let b = symmetric_bound(&g).ok().and_then(|b| b.exact);
            t.check(b.as_ref() == Some(&two), || format!("symmetric bound of C{n} = {b:?}"));
            let nh_u = ham_undirected(&c).ok();
            t.check(nh_u == Some(Count::from(1u32)), || format!("NH(C{n}) = {nh_u:?}"));
            let second = undirected_bounds(&c)
                .ok()
                .and_then(|r| r.symmetric)
                .and_then(|b| b.exact);
            t.check(second.as_ref() == Some(&one), || {
                format!("second undirected bound of C{n} = {second:?}")
            });
        }
    })
}

/// `ham(A) = sum_{j != k} a_kj ham(A'(kj))` for every pivot `k` on 100
/// random digraphs; the left side by DP, the right by enumeration.
pub fn contraction_expansion() -> SuiteResult {
    run(9, "contraction expansion", None, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1E_443);
        for _ in 0..100 {
            let n = rng.gen_range(2..=7);
            let g = random_graph(&mut rng, n, GraphKind::Digraph).as_digraph();
            let lhs = match ham_dp(&g) {
                Ok(c) => c,
                Err(e) => {
                    t.error("ham_dp", e);
                    continue;
                }
            };
            for k in 0..n {
                let rhs: Result<Count> = (0..n)
                    .filter(|&j| j != k && g.entry(k, j))
                    .map(|j| g.contract(k, j).and_then(|m| ham_bruteforce(&m)))
                    .sum();
                match rhs {
                    Ok(rhs) => t.check(rhs == lhs, || {
                        format!("pivot {}: expansion {rhs} != {lhs} on {g:?}", k + 1)
                    }),
                    Err(e) => t.error("expansion", e),
                }
            }
        }
    })
}

/// Deliberate defects the invariant suite must catch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Put a 1 on the diagonal of one test graph.
    DiagonalEntry,
}

/// Structural invariants of generated graphs: zero diagonal, symmetric
/// doubling with matching degrees, canonical witnesses.
pub fn graph_invariants(fault: Option<Fault>) -> SuiteResult {
    run(0, "graph invariants", None, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x16_7A);
        let mut graphs: Vec<Graph> = Vec::new();
        for kind in [GraphKind::Digraph, GraphKind::SymmetricDigraph, GraphKind::Undirected] {
            for family in [Family::Complete, Family::Cycle, Family::Path] {
                for n in 3..=10 {
                    graphs.push(gen_family(family, n, kind).expect("n >= 3"));
                }
            }
            for _ in 0..40 {
                let n = rng.gen_range(1..=64);
                graphs.push(random_graph(&mut rng, n, kind));
            }
        }
        if fault == Some(Fault::DiagonalEntry) {
            let g = graphs[0].as_digraph();
            let mut rows = g.rows().to_vec();
            rows[0] |= 1;
            graphs[0] = Graph::Directed(DiGraph::from_rows_unchecked(g.n(), rows));
        }
        for graph in &graphs {
            let g = graph.as_digraph();
            t.check(g.has_zero_diagonal(), || format!("diagonal entry in {g:?}"));
            if let Graph::Undirected(u) = graph {
                t.check(g.is_symmetric(), || format!("doubling of {u:?} is not symmetric"));
                t.check(g.row_sums() == u.degrees(), || format!("degrees differ for {u:?}"));
                t.check(g.arc_count() == 2 * u.edge_count(), || format!("arc count for {u:?}"));
            }
        }
        for n in 3..=8 {
            let verts: Vec<usize> = (0..n).rev().collect();
            for directed in [true, false] {
                let w = CycleWitness::new(verts.clone(), directed);
                let again = CycleWitness::new(w.vertices().to_vec(), directed);
                t.check(w == again, || format!("canonicalization not idempotent: {w}"));
                t.check(w.vertices()[0] == 0, || format!("rotation not canonical: {w}"));
                t.check(directed || w.reversed() == w, || format!("reflection not canonical: {w}"));
            }
        }
    })
}

/// Every suite, invariants first.
pub fn all(fault: Option<Fault>) -> Vec<SuiteResult> {
    vec![
        graph_invariants(fault),
        oracle_agreement(),
        unbiasedness_exact(),
        unbiasedness_statistical(),
        bound_validity(),
        dominance(),
        bregman_remark(),
        transformation(),
        tightness(),
        contraction_expansion(),
    ]
}
