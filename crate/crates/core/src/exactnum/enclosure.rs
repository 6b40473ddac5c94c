//! Shrinking rational enclosures of real numbers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Interval;
use crate::error::{Error, Result};

/// Source of nested rational enclosures of a real number.
///
/// Contract: `enclosure(k + 1)` is contained in `enclosure(k)` and is at most
/// half as wide. A source that cannot refine any further may keep returning
/// the same interval; the coefficient stream treats that as exhausted
/// precision.
pub trait EnclosureOracle: Send + Sync + fmt::Debug {
    fn enclosure(&self, level: u32) -> Interval;

    /// Text form used by the `dec:` / `sqrt:` encodings, when there is one.
    fn describe(&self) -> Option<String> {
        None
    }
}

/// A decimal string with a stated uncertainty in units of the last digit.
/// Cannot be refined.
#[derive(Debug, Clone)]
pub struct DecimalEnclosure {
    text: String,
    interval: Interval,
}

impl DecimalEnclosure {
    /// `digits` is the decimal literal (e.g. `3.14159`), `ulp` the number of
    /// last-place units of uncertainty on either side.
    pub fn new(digits: &str, ulp: &BigInt) -> Result<Self> {
        let (value, scale) = parse_decimal(digits)?;
        if ulp.is_negative() {
            return Err(Error::invalid("negative ulp count"));
        }
        let unit = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), scale));
        let radius = unit * BigRational::from_integer(ulp.clone());
        Ok(Self {
            text: format!("{digits}±{ulp}"),
            interval: Interval::spanning(&value - &radius, &value + &radius),
        })
    }
}

impl EnclosureOracle for DecimalEnclosure {
    fn enclosure(&self, _level: u32) -> Interval {
        self.interval.clone()
    }

    fn describe(&self) -> Option<String> {
        Some(format!("dec:{}", self.text))
    }
}

/// Exact value of a decimal literal and its number of fractional digits.
pub(crate) fn parse_decimal(s: &str) -> Result<(BigRational, usize)> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::invalid(format!("empty decimal literal {s:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::invalid(format!("malformed decimal literal {s:?}")));
    }
    let mantissa: BigInt = all.parse().map_err(|_| Error::invalid("bad decimal"))?;
    let mantissa = if neg { -mantissa } else { mantissa };
    let scale = frac_part.len();
    Ok((
        BigRational::new(mantissa, num_traits::pow(BigInt::from(10), scale)),
        scale,
    ))
}

/// Enclosures of `sqrt(n)` from integer square roots, width `2^-level`.
#[derive(Debug, Clone)]
pub struct SqrtEnclosure {
    radicand: BigInt,
}

impl SqrtEnclosure {
    pub fn new(radicand: BigInt) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::invalid("negative radicand"));
        }
        Ok(Self { radicand })
    }
}

impl EnclosureOracle for SqrtEnclosure {
    fn enclosure(&self, level: u32) -> Interval {
        let scaled = &self.radicand << (2 * level as usize);
        let s = scaled.sqrt();
        let den = BigInt::one() << level as usize;
        if &s * &s == scaled {
            return Interval::point(BigRational::new(s, den));
        }
        Interval::spanning(
            BigRational::new(s.clone(), den.clone()),
            BigRational::new(s + 1, den),
        )
    }

    fn describe(&self) -> Option<String> {
        Some(format!("sqrt:{}", self.radicand))
    }
}

/// Longest run of continued-fraction coefficients shared by every number in
/// `enclosure` (index 0 is the integer part).
///
/// Stops as soon as the floors of the two endpoints differ, or when the lower
/// endpoint is itself the truncation point (a rational inside the enclosure
/// could terminate there).
pub fn certified_prefix(enclosure: &Interval, limit: usize) -> Vec<BigInt> {
    let mut lo = enclosure.lo().clone();
    let mut hi = enclosure.hi().clone();
    let mut out = Vec::new();
    while out.len() < limit {
        let fl = lo.floor();
        if fl != hi.floor() {
            break;
        }
        let a = fl.to_integer();
        out.push(a);
        let lo_frac = &lo - &fl;
        if lo_frac.is_zero() {
            break;
        }
        let hi_frac = &hi - &fl;
        // x -> 1/(x - a) reverses the order of the endpoints.
        lo = hi_frac.recip();
        hi = lo_frac.recip();
    }
    out
}
