//! Floating-point scalars used by the numerical estimators.
//!
//! Exact quantities (coefficients, convergents, error enclosures) live in
//! `BigInt`/`BigRational`; anything that needs a logarithm is evaluated in a
//! [`Real`] so the estimators can run in `f32` or `f64`.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Nearest representable value of an `f64` constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Machine epsilon as used for outward rounding margins.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

// Mantissa width kept when a big integer is too large for a direct conversion.
const MANTISSA_BITS: u64 = 64;

/// Natural logarithm of a positive big integer.
///
/// Integers beyond the `f64` range are split as `m * 2^s` with a 64-bit
/// mantissa `m`; the relative error is dominated by the final rounding.
pub fn ln_bigint<F: Real>(x: &BigInt) -> F {
    assert!(x.sign() == Sign::Plus, "ln_bigint of non-positive value");
    let bits = x.bits();
    if bits <= 1000 {
        return F::lit(x.to_f64().expect("within f64 range").ln());
    }
    let shift = bits - MANTISSA_BITS;
    let mantissa = (x >> shift).to_f64().expect("64-bit mantissa");
    F::lit(mantissa.ln() + (shift as f64) * std::f64::consts::LN_2)
}

/// Natural logarithm of a positive rational, evaluated as `ln num - ln den`.
pub fn ln_ratio<F: Real>(x: &BigRational) -> F {
    ln_bigint::<F>(x.numer()) - ln_bigint::<F>(x.denom())
}

/// Closest float to an exact rational (through the logarithm for huge or tiny
/// values, so no intermediate overflows).
pub fn ratio_to_real<F: Real>(x: &BigRational) -> F {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && v != 0.0 {
            return F::lit(v);
        }
    }
    if x.numer().sign() == Sign::NoSign {
        return F::zero();
    }
    let sign = if x.numer().sign() == Sign::Minus {
        -F::one()
    } else {
        F::one()
    };
    let abs = BigRational::new(num_traits::Signed::abs(x.numer()), x.denom().clone());
    sign * ln_ratio::<F>(&abs).exp()
}
