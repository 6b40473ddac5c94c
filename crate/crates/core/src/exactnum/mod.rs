//! Exact integers and rationals, coefficient streams and continued fractions.

mod enclosure;
mod interval;
mod stream;

use std::fmt;
use std::sync::Arc;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use enclosure::{certified_prefix, DecimalEnclosure, EnclosureOracle, SqrtEnclosure};
pub use interval::Interval;
pub use stream::{
    ArithmeticRule, CertifiedStream, CoefficientRule, CoefficientStream, EulerRule,
    LiouvilleRule, RandomRule, RuleStream, DEFAULT_MAX_REFINEMENTS,
};

use crate::error::{Error, Result};

/// `a_0 + 1/(a_1 + 1/(a_2 + ...))`.
///
/// Cheap to clone: the coefficient stream is shared and memoized. A non-zero
/// `offset` views the stream shifted by that many places (the Gauss map
/// orbit), in which case `a_0` is 0.
#[derive(Clone)]
pub struct ContinuedFraction {
    a0: BigInt,
    tail: Arc<CoefficientStream>,
    offset: usize,
}

impl ContinuedFraction {
    pub fn new(a0: BigInt, tail: CoefficientStream) -> Self {
        Self {
            a0,
            tail: Arc::new(tail),
            offset: 0,
        }
    }

    pub fn finite(a0: BigInt, tail: Vec<BigInt>) -> Result<Self> {
        Ok(Self::new(a0, CoefficientStream::finite(tail)?))
    }

    pub fn periodic(a0: BigInt, preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        Ok(Self::new(a0, CoefficientStream::periodic(preperiod, period)?))
    }

    pub fn from_rule(a0: BigInt, rule: Arc<dyn CoefficientRule>) -> Self {
        Self::new(a0, CoefficientStream::rule(rule))
    }

    /// Continued fraction of the number enclosed by `oracle`.
    pub fn from_enclosure(oracle: Arc<dyn EnclosureOracle>, max_refinements: u32) -> Result<Self> {
        let stream = CoefficientStream::certified(oracle, max_refinements);
        let a0 = stream
            .get(0)?
            .ok_or(Error::PrecisionExhausted { certified_upto: None })?;
        Ok(Self::new(a0, stream))
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn stream(&self) -> &CoefficientStream {
        &self.tail
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// `a_n`, or `None` past the end of a terminating expansion.
    pub fn coefficient(&self, n: usize) -> Result<Option<BigInt>> {
        if n == 0 {
            return Ok(Some(self.a0.clone()));
        }
        self.tail.get(self.offset + n)
    }

    /// `a_0 ..= a_upto`, stopping early at the end of a finite stream.
    pub fn coefficients(&self, upto: usize) -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(upto.min(256) + 1);
        for n in 0..=upto {
            match self.coefficient(n)? {
                Some(a) => out.push(a),
                None => break,
            }
        }
        Ok(out)
    }

    /// Finite expansions represent rationals; everything else is treated as
    /// irrational.
    pub fn is_rational(&self) -> bool {
        self.tail.is_finite()
    }

    /// `[0; a_{j+1}, a_{j+2}, ...]`, the fractional part shifted `j` places.
    pub fn shifted(&self, j: usize) -> Self {
        Self {
            a0: BigInt::zero(),
            tail: Arc::clone(&self.tail),
            offset: self.offset + j,
        }
    }

    /// Same tail with a different integer part.
    pub fn with_a0(&self, a0: BigInt) -> Self {
        Self {
            a0,
            tail: Arc::clone(&self.tail),
            offset: self.offset,
        }
    }

    /// Verified bound on every `a_m` with `m > n`, when the source has one.
    pub fn coefficient_bound_beyond(&self, n: usize) -> Option<BigInt> {
        self.tail.bound_beyond(self.offset + n)
    }
}

impl fmt::Debug for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuedFraction")
            .field("a0", &self.a0)
            .field("tail", &self.tail)
            .field("offset", &self.offset)
            .finish()
    }
}

/// Canonical expansion of a rational by the Euclidean algorithm.
///
/// The last coefficient is at least 2 whenever there is more than one.
pub fn cf_from_rational(r: &BigRational) -> ContinuedFraction {
    let (a0, tail) = expand_rational(r);
    ContinuedFraction::finite(a0, tail).expect("euclid emits positive quotients")
}

pub(crate) fn expand_rational(r: &BigRational) -> (BigInt, Vec<BigInt>) {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let (a0, rem) = num.div_mod_floor(&den);
    let mut tail = Vec::new();
    num = den;
    den = rem;
    while !den.is_zero() {
        let (a, rem) = num.div_mod_floor(&den);
        tail.push(a);
        num = den;
        den = rem;
    }
    (a0, tail)
}

/// Folds `[a_0; a_1, ..., a_k]` back into a rational.
pub fn rational_from_coefficients(coefficients: &[BigInt]) -> BigRational {
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (coefficients[0].clone(), BigInt::one());
    for a in &coefficients[1..] {
        let pn = a * &p + &p_prev;
        let qn = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    BigRational::new(p, q)
}

/// Interval between the convergents of order `depth - 1` and `depth`.
///
/// When the expansion terminates before `depth`, returns the exact point.
pub fn evaluate_enclosure(cf: &ContinuedFraction, depth: usize) -> Result<Interval> {
    if depth == 0 {
        return Err(Error::invalid("enclosure depth must be >= 1"));
    }
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (cf.a0().clone(), BigInt::one());
    for n in 1..=depth {
        let a = match cf.coefficient(n)? {
            Some(a) => a,
            None => return Ok(Interval::point(BigRational::new(p, q))),
        };
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    Ok(Interval::spanning(
        BigRational::new(p_prev, q_prev),
        BigRational::new(p, q),
    ))
}
