//! Exact reference counts: Hamiltonian cycles by enumeration and by subset
//! DP, the permanent by Ryser's formula, and the exact expectation of the
//! estimators by walking their whole decision tree.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::estimator::RowOrderPolicy;
use crate::graph::{BitIter, ContractedMatrix, DiGraph, UndiGraph, ZeroOneMatrix};

/// An exact non-negative count.
pub type Count = BigUint;
/// An exact rational, always stored reduced with a positive denominator.
pub type ExactRational = BigRational;

pub const MAX_BRUTEFORCE_N: usize = 10;
/// Path counts in the DP table are bounded by `(n-1)!`, which fits a `u64`
/// up to `n = 21`. The table has `2^(n-1) * (n-1)` entries.
pub const MAX_DP_N: usize = 21;
pub const MAX_PERMANENT_N: usize = 24;
pub const MAX_EXPECTATION_N: usize = 8;

fn check_limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { what, n, limit });
    }
    Ok(())
}

/// `ham(A)` by enumerating every cyclic order anchored at vertex 0.
///
/// For `n = 1` this is the single entry `a_11`.
pub fn ham_bruteforce<M: ZeroOneMatrix + ?Sized>(m: &M) -> Result<Count> {
    let n = m.dim();
    check_limit("brute-force enumeration", n, MAX_BRUTEFORCE_N)?;
    if n == 1 {
        return Ok(Count::from(m.entry(0, 0) as u8));
    }
    let count = (1..n)
        .permutations(n - 1)
        .filter(|order| {
            let mut prev = 0;
            for &v in order {
                if !m.entry(prev, v) {
                    return false;
                }
                prev = v;
            }
            m.entry(prev, 0)
        })
        .count();
    Ok(Count::from(count))
}

/// `ham(A)` by dynamic programming over (visited subset, endpoint).
///
/// Counts directed paths that start at vertex 0; each Hamiltonian cycle is
/// counted once, as the path that closes back to 0.
pub fn ham_dp<M: ZeroOneMatrix + ?Sized>(m: &M) -> Result<Count> {
    let n = m.dim();
    check_limit("subset DP", n, MAX_DP_N)?;
    if n == 1 {
        return Ok(Count::from(m.entry(0, 0) as u8));
    }
    // vertex v >= 1 is bit v-1 of the subset
    let k = n - 1;
    let out: Vec<u64> = (1..n).map(|v| m.row_bits(v) >> 1).collect();
    let into_start: Vec<bool> = (1..n).map(|v| m.entry(v, 0)).collect();
    let mut dp = vec![0u64; (1usize << k) * k];
    for v in BitIter(m.row_bits(0) >> 1) {
        dp[(1usize << v) * k + v] = 1;
    }
    let full = (1usize << k) - 1;
    for subset in 1..=full {
        for v in BitIter(subset as u64) {
            let paths = dp[subset * k + v];
            if paths == 0 {
                continue;
            }
            for w in BitIter(out[v] & !(subset as u64)) {
                dp[(subset | 1 << w) * k + w] += paths;
            }
        }
    }
    let total: u128 = (0..k)
        .filter(|&v| into_start[v])
        .map(|v| dp[full * k + v] as u128)
        .sum();
    Ok(Count::from(total))
}

/// The permanent by Ryser's inclusion-exclusion formula, visiting column
/// subsets in Gray-code order so each step updates one column's
/// contribution to the row sums.
pub fn permanent_ryser<M: ZeroOneMatrix + ?Sized>(m: &M) -> Result<Count> {
    let n = m.dim();
    check_limit("permanent", n, MAX_PERMANENT_N)?;
    // row sums are at most n <= 24, so each product is below 24^24 < 2^111
    let columns: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| m.entry(i, j) as i64).collect())
        .collect();
    let mut row_sums = vec![0i64; n];
    let mut acc: i128 = 0;
    let mut spill = BigInt::zero();
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        gray ^= 1 << j;
        let sign = if (gray >> j) & 1 == 1 { 1 } else { -1 };
        for (s, a) in row_sums.iter_mut().zip(&columns[j]) {
            *s += sign * a;
        }
        if row_sums.contains(&0) {
            continue;
        }
        let product: i128 = row_sums.iter().map(|&s| s as i128).product();
        let term = if gray.count_ones() % 2 == 0 { product } else { -product };
        match acc.checked_add(term) {
            Some(v) => acc = v,
            None => {
                spill += BigInt::from(acc);
                acc = term;
            }
        }
    }
    let mut total = spill + BigInt::from(acc);
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total
        .to_biguint()
        .expect("permanent of a 0-1 matrix is non-negative"))
}

/// Hamiltonian cycles of an undirected graph: half the count of its doubled
/// digraph. Requires `n >= 3`.
pub fn ham_undirected(g: &UndiGraph) -> Result<Count> {
    if g.n() < 3 {
        return Err(Error::TooSmall {
            what: "undirected Hamiltonian cycle count",
            n: g.n(),
            min: 3,
        });
    }
    let directed = ham_dp(&g.to_symmetric_digraph())?;
    debug_assert!(!directed.bit(0), "directed count of a doubled graph is even");
    Ok(directed >> 1)
}

/// Exact `E[X_A]` of the estimator under `policy`, by visiting every branch
/// of its decision tree.
///
/// This walks explicit contracted matrices rather than the estimator's
/// segment bookkeeping, so the two implementations check each other.
pub fn estimator_expectation(g: &DiGraph, policy: &RowOrderPolicy) -> Result<ExactRational> {
    let n = g.n();
    check_limit("decision-tree enumeration", n, MAX_EXPECTATION_N)?;
    policy.validate_for(n)?;
    let mut total = BigRational::zero();
    expand(
        &ContractedMatrix::from_digraph(g),
        policy,
        0,
        None,
        &BigRational::one(),
        &BigUint::one(),
        &mut total,
    )?;
    Ok(total)
}

fn expand(
    m: &ContractedMatrix,
    policy: &RowOrderPolicy,
    step: usize,
    prev: Option<(usize, usize)>,
    probability: &BigRational,
    product: &BigUint,
    total: &mut BigRational,
) -> Result<()> {
    let dim = m.dim();
    let row = policy.select_row(step, dim, prev)?;
    if dim == 1 {
        if m.entry(0, 0) {
            *total += probability * BigRational::from_integer(BigInt::from(product.clone()));
        }
        return Ok(());
    }
    let choices: Vec<usize> = (0..dim).filter(|&j| j != row && m.entry(row, j)).collect();
    if choices.is_empty() {
        return Ok(());
    }
    let width = choices.len();
    let branch_probability = probability / BigRational::from_integer(BigInt::from(width));
    let branch_product = product * BigUint::from(width);
    for j in choices {
        expand(
            &m.contract(row, j)?,
            policy,
            step + 1,
            Some((row, j)),
            &branch_probability,
            &branch_product,
            total,
        )?;
    }
    Ok(())
}
