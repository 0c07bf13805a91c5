//! Upper bounds on the permanent and on Hamiltonian cycle counts.
//!
//! Products of rationals are kept exact. The Brégman bound is irrational in
//! general and lives in log space, rounded up by [`LOG_GUARD`].

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{Count, ExactRational};
use crate::graph::{DegreeSequence, DiGraph, UndiGraph};

/// Relative guard added to every computed logarithm. Each `ln` is accurate
/// to a few ulps, so `1e-12` of the accumulated magnitude keeps the result
/// an upper bound.
pub const LOG_GUARD: f64 = 1e-12;

/// An upper bound, exact where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub exact: Option<ExactRational>,
    /// Natural log of the bound, rounded up. `-inf` for a zero bound.
    pub log_upper: f64,
    /// `floor(bound)`, when it can be represented.
    pub integer_cap: Option<Count>,
}

impl BoundValue {
    fn from_exact(q: ExactRational) -> Self {
        let integer_cap = q.floor().to_integer().to_biguint();
        let log_upper = if q.is_zero() {
            f64::NEG_INFINITY
        } else {
            let num = ln_big(q.numer().magnitude());
            let den = ln_big(q.denom().magnitude());
            num - den + LOG_GUARD * (num.abs() + den.abs() + 1.0)
        };
        BoundValue {
            exact: Some(q),
            log_upper,
            integer_cap,
        }
    }

    /// A bound known only through its (already guarded) logarithm.
    fn from_log(log_upper: f64, forced_zero: bool) -> Self {
        let integer_cap = if forced_zero {
            Some(Count::zero())
        } else if log_upper < 700.0 {
            BigUint::from_f64(log_upper.exp().floor())
        } else {
            None
        };
        BoundValue {
            exact: None,
            log_upper,
            integer_cap,
        }
    }

    /// The bound as a float, for display.
    pub fn approx(&self) -> f64 {
        match &self.exact {
            Some(q) => q.to_f64().unwrap_or(f64::INFINITY),
            None => self.log_upper.exp(),
        }
    }

    /// True iff `count` does not exceed the bound. Exact bounds compare
    /// exactly; log-space bounds allow `relative_slack` (so `1e-9` accepts
    /// counts up to `bound * (1 + 1e-9)`).
    pub fn admits(&self, count: &Count, relative_slack: f64) -> bool {
        if let Some(q) = &self.exact {
            return BigRational::from_integer(BigInt::from(count.clone())) <= *q;
        }
        if let Some(cap) = &self.integer_cap {
            if count <= cap {
                return true;
            }
            if cap.is_zero() {
                return false;
            }
        }
        count.is_zero() || ln_big(count) <= self.log_upper + relative_slack.ln_1p()
    }
}

/// `ln(x)` for an arbitrarily large integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_factorial_over(r: usize) -> f64 {
    (2..=r).map(|k| (k as f64).ln()).sum::<f64>() / r as f64
}

/// `sum ln(r_i!)/r_i` over the non-zero entries, guarded upward, and
/// whether a zero entry occurred.
fn bregman_log(r: &[usize]) -> (f64, bool) {
    let terms: Vec<f64> = r.iter().filter(|&&v| v > 0).map(|&v| ln_factorial_over(v)).collect();
    let sum: f64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    (sum + LOG_GUARD * (magnitude + 1.0), r.contains(&0))
}

/// `prod(values) / 2^shift` as an exact rational.
fn product_over_power_of_two<I: IntoIterator<Item = usize>>(values: I, shift: usize) -> ExactRational {
    let numerator: BigUint = values.into_iter().map(BigUint::from).product();
    BigRational::new(BigInt::from(numerator), BigInt::one() << shift)
}

/// Minc: `Per(A) <= prod (r_i + 1) / 2`.
pub fn minc_bound(r: &DegreeSequence) -> BoundValue {
    BoundValue::from_exact(product_over_power_of_two(
        r.values().iter().map(|&v| v + 1),
        r.len(),
    ))
}

/// Brégman: `Per(A) <= prod (r_i!)^(1/r_i)`.
///
/// A zero row forces `Per(A) = 0`: such rows are left out of `log_upper`
/// and the integer cap is 0.
pub fn bregman_bound(r: &DegreeSequence) -> BoundValue {
    let (log, has_zero) = bregman_log(r.values());
    BoundValue::from_log(log, has_zero)
}

/// `prod r_i / 2^(n-1)` for any degree sequence, without applicability
/// checks.
pub fn symmetric_formula(r: &DegreeSequence) -> BoundValue {
    BoundValue::from_exact(product_over_power_of_two(
        r.values().iter().copied(),
        r.len() - 1,
    ))
}

/// The symmetric-digraph bound `NH <= prod r_i / 2^(n-1)`. Requires a
/// symmetric digraph with at least 3 vertices.
pub fn symmetric_bound(g: &DiGraph) -> Result<BoundValue> {
    if g.n() < 3 {
        return Err(Error::TooSmall {
            what: "symmetric-digraph bound",
            n: g.n(),
            min: 3,
        });
    }
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(symmetric_formula(&g.row_sums()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundName {
    Symmetric,
    Bregman,
    Minc,
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundName::Symmetric => "symmetric",
            BoundName::Bregman => "bregman",
            BoundName::Minc => "minc",
        })
    }
}

/// All bounds applicable to one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub minc: BoundValue,
    pub bregman: BoundValue,
    pub symmetric: Option<BoundValue>,
    pub applicable_minimum: BoundName,
}

impl BoundReport {
    fn new(minc: BoundValue, bregman: BoundValue, symmetric: Option<BoundValue>) -> Self {
        // ties go to the earlier entry
        let ranked = [
            symmetric.as_ref().map(|b| (BoundName::Symmetric, b.log_upper)),
            Some((BoundName::Bregman, bregman.log_upper)),
            Some((BoundName::Minc, minc.log_upper)),
        ];
        let applicable_minimum = ranked
            .into_iter()
            .flatten()
            .reduce(|best, next| if next.1 < best.1 { next } else { best })
            .map(|(name, _)| name)
            .expect("bregman and minc are always present");
        BoundReport {
            minc,
            bregman,
            symmetric,
            applicable_minimum,
        }
    }

    pub fn get(&self, name: BoundName) -> Option<&BoundValue> {
        match name {
            BoundName::Symmetric => self.symmetric.as_ref(),
            BoundName::Bregman => Some(&self.bregman),
            BoundName::Minc => Some(&self.minc),
        }
    }

    pub fn minimum(&self) -> &BoundValue {
        self.get(self.applicable_minimum)
            .expect("the minimum is always a present bound")
    }
}

/// Bounds on the Hamiltonian cycle count of a digraph: Minc and Brégman
/// (through the permanent), plus the symmetric bound when the digraph is
/// symmetric with `n >= 3`.
pub fn digraph_bounds(g: &DiGraph) -> BoundReport {
    let r = g.row_sums();
    let symmetric = symmetric_bound(g).ok();
    BoundReport::new(minc_bound(&r), bregman_bound(&r), symmetric)
}

/// The three undirected bounds, each the directed bound on the doubled
/// graph halved: `prod(d_i+1)/2^(n+1)`, `prod d_i/2^n` and
/// `(1/2) prod (d_i!)^(1/d_i)`. Requires `n >= 3`.
pub fn undirected_bounds(g: &UndiGraph) -> Result<BoundReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::TooSmall {
            what: "undirected bounds",
            n,
            min: 3,
        });
    }
    let d = g.degrees();
    let minc = BoundValue::from_exact(product_over_power_of_two(
        d.values().iter().map(|&v| v + 1),
        n + 1,
    ));
    let symmetric = BoundValue::from_exact(product_over_power_of_two(d.values().iter().copied(), n));
    let (log, has_zero) = bregman_log(d.values());
    let halved = log - std::f64::consts::LN_2 + LOG_GUARD;
    let bregman = BoundValue::from_log(halved, has_zero);
    Ok(BoundReport::new(minc, bregman, Some(symmetric)))
}

/// The three formulas evaluated on one degree sequence, with dominance flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceRecord {
    pub new: BoundValue,
    pub minc: BoundValue,
    pub bregman: BoundValue,
    /// `prod r_i / 2^(n-1) <= prod (r_i+1)/2`, compared exactly.
    pub new_le_minc: bool,
    /// `prod r_i / 2^(n-1) <= prod (r_i!)^(1/r_i)`, compared in log space.
    pub new_le_bregman: bool,
}

pub fn dominance_compare(r: &DegreeSequence) -> DominanceRecord {
    let new = symmetric_formula(r);
    let minc = minc_bound(r);
    let bregman = bregman_bound(r);
    let new_le_minc = new.exact <= minc.exact;
    let new_le_bregman = if r.values().contains(&0) {
        // the product vanishes, and so does the permanent bound
        true
    } else {
        new.log_upper <= bregman.log_upper
    };
    DominanceRecord {
        new,
        minc,
        bregman,
        new_le_minc,
        new_le_bregman,
    }
}

/// Renders an exact rational as `num/den`, or as a bare integer when the
/// denominator is 1.
pub fn rational_string(q: &ExactRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` (or a bare integer) back into a reduced rational.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    let g = num.gcd(&den);
    let (mut num, mut den) = (num / &g, den / &g);
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    Some(BigRational::new_raw(num, den))
}
