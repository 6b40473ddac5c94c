//! Partial sums of `sum_n ln(q_{n+1}) / q_n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::convergents::ConvergentTable;
use crate::error::{Error, Result};
use crate::exactnum::ContinuedFraction;
use crate::precise::{bits_for_digits, ln_bigint, Precise};

pub const DEFAULT_BRJUNO_DIGITS: u32 = 64;

// ln 2 < 0.6931472 and ln 1.6 < 0.47
const LN2_UP: (i64, i64) = (6_931_472, 10_000_000);
const LN_1_6_UP: (i64, i64) = (47, 100);

// Tail terms summed one by one before the geometric remainder.
const TAIL_TERMS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrjunoVerdict {
    /// A tail bound is attached, or the last term is already below
    /// `10^-digits`.
    CertifiedFiniteAtDepth,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrjunoTerm {
    pub n: usize,
    /// `ln(q_{n+1}) / q_n` on the working grid.
    pub value: Precise,
    /// Exact upper bound `bitlen(q_{n+1}) ln 2 / q_n`, useful when the term
    /// is far below the working precision.
    pub upper: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrjunoReport {
    pub depth: usize,
    pub digits: u32,
    pub terms: Vec<BrjunoTerm>,
    pub partial_sum: Precise,
    /// Upper bound on `sum_{n > N}`, given a bound on the coefficients past
    /// `N`.
    pub tail_bound: Option<BigRational>,
    /// The coefficient bound the tail was computed from.
    pub coefficient_bound: Option<BigInt>,
    pub verdict: BrjunoVerdict,
}

fn ln_upper(x: &BigInt) -> BigRational {
    BigRational::new(BigInt::from(x.bits()) * LN2_UP.0, LN2_UP.1.into())
}

/// `sum_{n=0}^{N} ln(q_{n+1}) / q_n` with rounding error below
/// `10^-(digits - 2)`.
///
/// `bound` overrides the stream's own bound on `a_m`, `m > N`; with either,
/// the report carries a tail bound from `q_{N+k} >= q_N Fib(k+1)`.
pub fn brjuno_partial(
    cf: &ContinuedFraction,
    depth: usize,
    digits: u32,
    bound: Option<BigInt>,
) -> Result<BrjunoReport> {
    if cf.is_rational() {
        return Err(Error::RationalSource("Brjuno sum undefined for rationals"));
    }
    if depth == 0 {
        return Err(Error::invalid("depth must be >= 1"));
    }
    // guard bits for the accumulated per-term errors
    let guard = 64 - (depth as u64 + 1).leading_zeros() + 8;
    let bits = bits_for_digits(digits) + guard;
    let mut table = ConvergentTable::new(cf.clone());
    table.require(depth + 1)?;
    let mut sum = Precise::zero(bits);
    let mut terms = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let q = &table.get(n).expect("populated").q;
        let q1 = &table.get(n + 1).expect("populated").q;
        let value = ln_bigint(q1, bits).div_int(q);
        let upper = ln_upper(q1) / BigRational::from_integer(q.clone());
        sum = sum.add(&value);
        terms.push(BrjunoTerm { n, value, upper });
    }
    let bound = bound.or_else(|| cf.coefficient_bound_beyond(depth));
    let tail_bound = match &bound {
        Some(m) => {
            let q = &table.get(depth).expect("populated").q;
            let q1 = &table.get(depth + 1).expect("populated").q;
            tail_upper(q, q1, m, bits)
        }
        None => None,
    };
    let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize));
    let negligible = terms.last().is_some_and(|t| t.upper < tiny);
    let verdict = if tail_bound.is_some() || negligible {
        BrjunoVerdict::CertifiedFiniteAtDepth
    } else {
        BrjunoVerdict::Inconclusive
    };
    Ok(BrjunoReport {
        depth,
        digits,
        terms,
        partial_sum: sum,
        tail_bound,
        coefficient_bound: bound,
        verdict,
    })
}

// rounds a positive rational up to the 2^-bits grid, returning the numerator
fn grid_up(x: &BigRational, bits: u32) -> BigInt {
    (x.numer() << bits as usize).div_ceil(x.denom())
}

/// Upper bound on `sum_{k >= 1} ln(q_{N+k+1}) / q_{N+k}` when every
/// `a_m <= m_bound` past `N`.
fn tail_upper(q: &BigInt, q1: &BigInt, m_bound: &BigInt, bits: u32) -> Option<BigRational> {
    let m1 = m_bound + 1;
    // ln((M+1)x)/x decreases once (M+1)x >= e
    if &m1 * q1 < BigInt::from(3) {
        return None;
    }
    // q_{N+k} >= L_k with L_0 = q_N, L_1 = q_{N+1}, L_{k+1} = L_k + L_{k-1},
    // and q_{N+k+1} <= (M+1) q_{N+k}
    let mut acc = BigInt::zero();
    let (mut prev, mut cur) = (q.clone(), q1.clone());
    for _ in 0..TAIL_TERMS {
        let term = ln_upper(&(&m1 * &cur)) / BigRational::from_integer(cur.clone());
        acc += grid_up(&term, bits);
        let next = &cur + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    // k > K: L_k >= q_N Fib(k+1) >= q_N 1.6^(k-1); with j = k - 1 >= K and
    // r = 5/8 the terms are at most (A + j B) r^j / q_N, A = ln((M+1) q_N),
    // B = ln 1.6
    let a = ln_upper(&(&m1 * q));
    let b = BigRational::new(LN_1_6_UP.0.into(), LN_1_6_UP.1.into());
    let r = BigRational::new(5.into(), 8.into());
    let one_minus = BigRational::one() - &r;
    let j = BigRational::from_integer(TAIL_TERMS.into());
    let rj = num_traits::pow(r.clone(), TAIL_TERMS);
    let geometric = &rj / &one_minus;
    let weighted = &rj * (&j * &one_minus + &r) / (&one_minus * &one_minus);
    let rest = (a * geometric + b * weighted) / BigRational::from_integer(q.clone());
    acc += grid_up(&rest, bits);
    Some(BigRational::new(acc, BigInt::one() << bits as usize))
}

impl BrjunoReport {
    /// Rigorous upper bound on the partial sum.
    pub fn partial_upper(&self) -> BigRational {
        self.partial_sum.upper()
    }
}
