//! Randomized unbiased estimators of the number of Hamiltonian cycles.
//!
//! A trial runs the contraction process on the adjacency matrix `A`. At
//! each step one row `g` of the current matrix is expanded: the candidate
//! set is `W = {j != g : A[g][j] = 1}`, a column `J` is drawn uniformly from
//! `W`, `p = |W|` is recorded, and `A` is replaced by `A'(gJ)` (swap columns
//! `g` and `J`, delete row and column `g`). When the matrix is `1x1` its
//! single entry is the last factor. The output is the product of the
//! factors, and its expectation is the number of Hamiltonian cycles.
//!
//! The engine does not materialize the matrices. Row slot `s` of the
//! current matrix stands for a directed path segment: its row is the
//! segment's tail, its column is the segment's head. Contracting merges
//! two segments. The diagonal entry of a slot is the arc that would close
//! its own segment, which is why it is excluded from `W`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Count, ExactRational};
use crate::graph::{CycleWitness, DiGraph};

/// The `B` table of the policy-driven estimator.
///
/// Entry `(i, k)` (both 1-based) is the row of the step-`i` matrix to
/// expand when the previous step chose column `k`; `k = 1` at step 1.
/// Entries of row `i` lie in `1..=n-i+1`, the dimension at step `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowTable {
    entries: Vec<Vec<usize>>,
}

impl RowTable {
    pub fn new(entries: Vec<Vec<usize>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidPolicy("empty row table".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPolicy(format!(
                    "row table is not square: row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            let limit = n - i;
            if let Some((j, &b)) = row.iter().enumerate().find(|&(_, &b)| b == 0 || b > limit) {
                return Err(Error::InvalidPolicy(format!(
                    "row table entry ({}, {}) = {b} is outside 1..={limit}",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(RowTable { entries })
    }

    /// A table with every entry uniform over its allowed range.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|_| rng.gen_range(1..=n - i)).collect())
            .collect();
        RowTable { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }
}

/// Which row of the current matrix each step expands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RowOrderPolicy {
    /// Always the first row: vertices are given successors in label order.
    Ascending,
    /// Start at `start` (0-based) and keep extending the path from its
    /// current endpoint.
    FollowPath { start: usize },
    Table(RowTable),
}

impl RowOrderPolicy {
    pub fn validate_for(&self, n: usize) -> Result<()> {
        match self {
            RowOrderPolicy::Ascending => Ok(()),
            RowOrderPolicy::FollowPath { start } if *start < n => Ok(()),
            RowOrderPolicy::FollowPath { start } => Err(Error::InvalidPolicy(format!(
                "follow-path start {} is outside 1..={n}",
                start + 1
            ))),
            RowOrderPolicy::Table(t) if t.n() == n => Ok(()),
            RowOrderPolicy::Table(t) => Err(Error::InvalidPolicy(format!(
                "row table is {0}x{0} but the graph has {n} vertices",
                t.n()
            ))),
        }
    }

    /// Row slot (0-based) to expand at `step` (0-based) in a matrix of
    /// dimension `dim`, given the `(row, column)` slots chosen at the
    /// previous step.
    pub fn select_row(&self, step: usize, dim: usize, prev: Option<(usize, usize)>) -> Result<usize> {
        match self {
            RowOrderPolicy::Ascending => Ok(0),
            RowOrderPolicy::FollowPath { start } => Ok(match prev {
                None => *start,
                // the chosen vertex's row shifts down if the expanded row
                // sat above it
                Some((row, col)) if col > row => col - 1,
                Some((_, col)) => col,
            }),
            RowOrderPolicy::Table(t) => {
                let k = prev.map_or(0, |(_, col)| col);
                let b = t
                    .entries
                    .get(step)
                    .and_then(|row| row.get(k))
                    .copied()
                    .ok_or_else(|| Error::PolicyRuntime {
                        step: step + 1,
                        reason: format!("no table entry ({}, {})", step + 1, k + 1),
                    })?;
                if b == 0 || b > dim {
                    return Err(Error::PolicyRuntime {
                        step: step + 1,
                        reason: format!("table entry {b} exceeds the current dimension {dim}"),
                    });
                }
                Ok(b - 1)
            }
        }
    }
}

impl fmt::Display for RowOrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowOrderPolicy::Ascending => f.write_str("ascending"),
            RowOrderPolicy::FollowPath { start } => write!(f, "follow-path:{}", start + 1),
            RowOrderPolicy::Table(t) => write!(f, "table:{0}x{0}", t.n()),
        }
    }
}

/// Source of the uniform choices a trial makes.
pub trait ChoiceSource {
    /// Returns an index in `0..len`. `len` is at least 1.
    fn choose(&mut self, len: usize) -> usize;
}

impl<F: FnMut(usize) -> usize> ChoiceSource for F {
    fn choose(&mut self, len: usize) -> usize {
        self(len)
    }
}

struct Stream<'a, R: ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> ChoiceSource for Stream<'_, R> {
    fn choose(&mut self, len: usize) -> usize {
        debug_assert!(len > 0 && len <= u32::MAX as usize);
        self.0.gen_range(0..len as u32) as usize
    }
}

/// Result of a single estimator run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Product of `p_factors`; zero when the trial dead-ends.
    pub value: Count,
    /// The Hamiltonian cycle built by the trial, present iff `value > 0`.
    pub witness: Option<CycleWitness>,
    /// The `n` multipliers. After a dead end the remaining entries are 0.
    pub p_factors: Vec<u64>,
}

/// Runs one trial, taking every random choice from `chooser`.
pub fn trial_with<C: ChoiceSource + ?Sized>(
    g: &DiGraph,
    policy: &RowOrderPolicy,
    chooser: &mut C,
) -> Result<TrialOutcome> {
    let n = g.n();
    policy.validate_for(n)?;

    // slot s: tails[s] is the segment's last vertex, heads[s] its first
    let mut tails: Vec<usize> = (0..n).collect();
    let mut heads: Vec<usize> = (0..n).collect();
    let mut succ = vec![usize::MAX; n];
    let mut factors = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(n);
    let mut prev = None;

    for step in 0..n {
        let dim = n - step;
        let row = policy.select_row(step, dim, prev)?;
        let tail = tails[row];
        if dim == 1 {
            let head = heads[0];
            let closes = g.has_arc(tail, head);
            factors.push(closes as u64);
            if closes {
                succ[tail] = head;
            }
            break;
        }
        candidates.clear();
        candidates.extend((0..dim).filter(|&c| c != row && g.has_arc(tail, heads[c])));
        if candidates.is_empty() {
            factors.push(0);
            break;
        }
        let pick = chooser.choose(candidates.len());
        let col = candidates[pick];
        factors.push(candidates.len() as u64);
        succ[tail] = heads[col];
        heads[col] = heads[row];
        tails.remove(row);
        heads.remove(row);
        prev = Some((row, col));
    }
    factors.resize(n, 0);

    let value: BigUint = factors.iter().map(|&p| BigUint::from(p)).product();
    let witness = if value.is_zero() {
        None
    } else {
        let mut cycle = Vec::with_capacity(n);
        let mut v = 0;
        for _ in 0..n {
            cycle.push(v);
            v = succ[v];
        }
        Some(CycleWitness::new(cycle, true))
    };
    Ok(TrialOutcome {
        value,
        witness,
        p_factors: factors,
    })
}

/// One run of the ascending-row estimator.
pub fn trial_alg31<R: Rng + ?Sized>(g: &DiGraph, rng: &mut R) -> TrialOutcome {
    trial_with(g, &RowOrderPolicy::Ascending, &mut Stream(rng))
        .expect("ascending policy is valid for every n")
}

/// One run of the policy-driven estimator.
pub fn trial_alg32<R: Rng + ?Sized>(
    g: &DiGraph,
    policy: &RowOrderPolicy,
    rng: &mut R,
) -> Result<TrialOutcome> {
    trial_with(g, policy, &mut Stream(rng))
}

/// The random stream of trial `t`: ChaCha20 keyed by
/// `seed_from_u64(seed)`, on stream number `t`.
pub fn trial_stream(seed: u64, t: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// Monte Carlo summary of repeated trials.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub trials: u64,
    pub sum: Count,
    pub sum_of_squares: Count,
    pub zero_trials: u64,
    pub mean: ExactRational,
    /// Unbiased sample variance (denominator `trials - 1`; 0 for one trial).
    pub sample_variance: ExactRational,
    pub standard_error: f64,
    pub zero_fraction: f64,
    pub seed: u64,
    pub policy: String,
}

impl EstimateReport {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[derive(Default)]
struct Totals {
    sum: BigUint,
    sum_of_squares: BigUint,
    zeros: u64,
}

impl Totals {
    fn add(mut self, value: BigUint) -> Self {
        if value.is_zero() {
            self.zeros += 1;
        } else {
            self.sum_of_squares += &value * &value;
            self.sum += value;
        }
        self
    }

    fn merge(mut self, other: Totals) -> Self {
        self.sum += other.sum;
        self.sum_of_squares += other.sum_of_squares;
        self.zeros += other.zeros;
        self
    }
}

/// Runs `trials` independent trials, trial `t` on [`trial_stream`]`(seed, t)`.
///
/// Trials run in parallel; the totals are exact integer sums, so the report
/// does not depend on scheduling.
pub fn estimate(g: &DiGraph, policy: &RowOrderPolicy, trials: u64, seed: u64) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    policy.validate_for(g.n())?;

    let totals = (0..trials)
        .into_par_iter()
        .map(|t| trial_alg32(g, policy, &mut trial_stream(seed, t)).map(|o| o.value))
        .try_fold(Totals::default, |acc, v| v.map(|v| acc.add(v)))
        .try_reduce(Totals::default, |a, b| Ok(a.merge(b)))?;

    let t = BigInt::from(trials);
    let sum = BigInt::from(totals.sum.clone());
    let sum_sq = BigInt::from(totals.sum_of_squares.clone());
    let mean = BigRational::new(sum.clone(), t.clone());
    let sample_variance = if trials > 1 {
        BigRational::new(&t * &sum_sq - &sum * &sum, &t * (&t - 1))
    } else {
        BigRational::zero()
    };
    let standard_error = (&sample_variance / BigRational::from_integer(t))
        .to_f64()
        .map_or(f64::INFINITY, f64::sqrt);

    Ok(EstimateReport {
        trials,
        sum: totals.sum,
        sum_of_squares: totals.sum_of_squares,
        zero_trials: totals.zeros,
        mean,
        sample_variance,
        standard_error,
        zero_fraction: totals.zeros as f64 / trials as f64,
        seed,
        policy: policy.to_string(),
    })
}
