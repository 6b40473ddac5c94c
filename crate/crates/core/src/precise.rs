//! Binary fixed-point balls over `BigInt` for sums that need more digits
//! than `f64` carries.
//!
//! A [`Precise`] value is `mantissa * 2^-bits` with an absolute error of at
//! most `err * 2^-bits`.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precise {
    mantissa: BigInt,
    bits: u32,
    err: BigInt,
}

/// Binary digits needed to carry `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) < 3.3220
    (digits as u64 * 33220 / 10000) as u32 + 8
}

impl Precise {
    pub fn zero(bits: u32) -> Self {
        Self {
            mantissa: BigInt::zero(),
            bits,
            err: BigInt::zero(),
        }
    }

    /// Exact rational rounded down to the grid (error one ulp).
    pub fn from_ratio(x: &BigRational, bits: u32) -> Self {
        let scaled = x.numer() << bits as usize;
        Self {
            mantissa: scaled.div_floor(x.denom()),
            bits,
            err: BigInt::one(),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Error bound in units of `2^-bits`.
    pub fn error_ulps(&self) -> &BigInt {
        &self.err
    }

    pub fn center(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.bits as usize)
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(self.err.clone(), BigInt::one() << self.bits as usize)
    }

    pub fn lower(&self) -> BigRational {
        self.center() - self.radius()
    }

    pub fn upper(&self) -> BigRational {
        self.center() + self.radius()
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalar::ratio_to_real::<f64>(&self.center())
    }

    pub fn add(&self, other: &Precise) -> Precise {
        assert_eq!(self.bits, other.bits, "mixed precisions");
        Precise {
            mantissa: &self.mantissa + &other.mantissa,
            bits: self.bits,
            err: &self.err + &other.err,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Precise {
        Precise {
            mantissa: &self.mantissa * k,
            bits: self.bits,
            err: &self.err * k.abs(),
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, d: &BigInt) -> Precise {
        assert!(d.sign() == Sign::Plus);
        Precise {
            mantissa: self.mantissa.div_floor(d),
            bits: self.bits,
            err: self.err.div_ceil(d) + 1,
        }
    }

    /// Drops to a coarser grid.
    pub fn round_to(&self, bits: u32) -> Precise {
        assert!(bits <= self.bits);
        let shift = (self.bits - bits) as usize;
        let one = BigInt::one() << shift;
        Precise {
            mantissa: self.mantissa.div_floor(&one),
            bits,
            err: self.err.div_ceil(&one) + 1,
        }
    }

    /// Decimal rendering of the center with `digits` fractional digits,
    /// rounded to nearest.
    pub fn to_decimal(&self, digits: usize) -> String {
        decimal_string(&self.center(), digits)
    }
}

impl fmt::Display for Precise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.bits as usize * 3) / 10;
        write!(f, "{}", self.to_decimal(digits))
    }
}

/// Decimal string of an exact rational, rounded to nearest at `digits`
/// fractional digits.
pub fn decimal_string(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x * BigRational::from_integer(scale);
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let neg = rounded.is_negative();
    let s = rounded.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// `2 * atanh(num/den)` for `|num/den| <= 1/3`, on a `bits` grid.
fn two_atanh(num: &BigInt, den: &BigInt, bits: u32) -> Precise {
    debug_assert!(num.abs() * 3 <= *den);
    let one = BigInt::one() << bits as usize;
    let num2 = num * num;
    let den2 = den * den;
    // power_k ~ y^(2k+1) * 2^bits, each floor costs at most one ulp
    let mut power = (&one * num).div_floor(den);
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += power.div_floor(&BigInt::from(2 * k + 1));
        power = (&power * &num2).div_floor(&den2);
        terms += 1;
        k += 1;
        // floor of a negative power never reaches zero
        if power == BigInt::from(-1) {
            break;
        }
    }
    // each term: floor in power (<=1) and floor in division (<=1); geometric
    // tail after the last nonzero power is below two ulps
    Precise {
        mantissa: sum * 2,
        bits,
        err: BigInt::from(2 * (2 * terms + 2)),
    }
}

/// ln 2 on a `bits` grid.
pub fn ln2(bits: u32) -> Precise {
    two_atanh(&BigInt::one(), &BigInt::from(3), bits)
}

/// Natural logarithm of a positive integer on a `bits` grid.
///
/// Only the leading `bits + 24` binary digits of `x` are used; the
/// discarded part contributes less than one ulp.
pub fn ln_bigint(x: &BigInt, bits: u32) -> Precise {
    assert!(x.sign() == Sign::Plus, "ln of non-positive integer");
    let size = x.bits();
    let guard = 24 + (64 - size.leading_zeros());
    let work = bits + guard;
    let keep = (work as u64 + 24).min(size);
    let dropped = size - keep;
    let m = x >> dropped as usize;
    let truncated = (&m << dropped as usize) != *x;
    // x ~ m * 2^dropped with m in [2^(keep-1), 2^keep): ln x = keep*ln2 + ln(m / 2^keep)
    let top = BigInt::one() << keep as usize;
    let ln_y = two_atanh(&(&m - &top), &(&m + &top), work);
    let exponent = BigInt::from(keep + dropped);
    let mut total = ln2(work).mul_int(&exponent).add(&ln_y);
    if truncated {
        // 0 <= ln(x / (m 2^dropped)) < 2^(1-keep)
        total.err += 1;
    }
    total.round_to(bits)
}

/// Natural logarithm of a positive rational.
pub fn ln_ratio(x: &BigRational, bits: u32) -> Precise {
    let a = ln_bigint(x.numer(), bits);
    let b = ln_bigint(x.denom(), bits);
    Precise {
        mantissa: a.mantissa - b.mantissa,
        bits,
        err: a.err + b.err,
    }
}

impl Precise {
    /// Value as `f64` plus its error radius as `f64`.
    pub fn to_f64_ball(&self) -> (f64, f64) {
        let r = self.radius().to_f64().unwrap_or(f64::INFINITY);
        (self.to_f64(), r)
    }
}
