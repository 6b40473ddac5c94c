//! Gauss-map orbits, Lyapunov exponents and the Gauss measure.

mod measure;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::convergents::Denominators;
use crate::error::{Error, Result};
use crate::exactnum::{evaluate_enclosure, ContinuedFraction, Interval};
use crate::scalar::{ln_bigint, ln_ratio, Real};

pub use measure::{
    gauss_density_quadrature, gauss_measure_enclosure, gauss_measure_interval, integrate, kappa_gauss,
    kappa_partial, lambda_gauss_exact, lambda_gauss_quadrature, lyapunov_sample, monte_carlo_lyapunov,
    MonteCarloResult, Quadrature, MC_GENERATOR, QUADRATURE_SPLIT,
};

/// `G^j(alpha)` as the continued fraction `[0; a_{j+1}, a_{j+2}, ...]`.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub tail: ContinuedFraction,
    pub j: usize,
}

impl OrbitPoint {
    /// The fractional part of `alpha`, step 0.
    pub fn start(cf: &ContinuedFraction) -> Self {
        Self {
            tail: cf.shifted(0),
            j: 0,
        }
    }
}

/// One step of the Gauss map: drops the first partial quotient.
pub fn gauss_shift(point: &OrbitPoint) -> Result<OrbitPoint> {
    if point.tail.coefficient(1)?.is_none() {
        return Err(Error::RationalSource("orbit terminates at rational"));
    }
    Ok(OrbitPoint {
        tail: point.tail.shifted(1),
        j: point.j + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport<F> {
    pub depth: usize,
    pub window: usize,
    /// `s[n - 1] = (2/n) ln q_n` for `n = 1..=N`.
    pub s: Vec<F>,
    /// Max of `s_n` over the trailing window (limsup surrogate).
    pub lambda_upper_estimate: F,
    /// Min of `s_n` over the trailing window (liminf surrogate).
    pub lambda_lower_estimate: F,
    /// Max over the window of `(1/n) sum_{j<n} ln a_{j+1}`.
    pub kappa_upper_estimate: F,
}

impl<F: Real> LyapunovReport<F> {
    /// `s_n` for `1 <= n <= N`.
    pub fn s_n(&self, n: usize) -> F {
        self.s[n - 1]
    }

    /// Tab-separated `n, s_n` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\ts_n\n");
        for (i, s) in self.s.iter().enumerate() {
            writeln!(out, "{}\t{:.12}", i + 1, s).expect("write to string");
        }
        out
    }
}

/// Streams `q_n` and records `s_n = (2/n) ln q_n` for `n <= N`; the window
/// `(N - w, N]` defaults to `w = ceil(N/2)`.
pub fn lyapunov_report<F: Real>(cf: &ContinuedFraction, depth: usize, window: Option<usize>) -> Result<LyapunovReport<F>> {
    let w = window.unwrap_or(depth.div_ceil(2));
    if depth == 0 || w == 0 || w > depth {
        return Err(Error::invalid("need depth >= window >= 1"));
    }
    let start = depth - w + 1;
    let mut s = Vec::with_capacity(depth);
    let mut log_a_sum = 0f64;
    let mut kappa = F::neg_infinity();
    for item in Denominators::new(cf).skip(1) {
        let (n, a, q) = item?;
        if n > depth {
            break;
        }
        log_a_sum += ln_bigint::<f64>(&a);
        let sn = 2.0 * ln_bigint::<f64>(&q) / n as f64;
        s.push(F::lit(sn));
        if n >= start {
            kappa = kappa.max(F::lit(log_a_sum / n as f64));
        }
    }
    if s.len() < depth {
        return Err(Error::RationalSource("Lyapunov exponent undefined for rationals"));
    }
    let tail = &s[start - 1..];
    Ok(LyapunovReport {
        depth,
        window: w,
        lambda_upper_estimate: tail.iter().copied().fold(F::neg_infinity(), F::max),
        lambda_lower_estimate: tail.iter().copied().fold(F::infinity(), F::min),
        kappa_upper_estimate: kappa,
        s,
    })
}

/// Visits `s_n` for every `n <= N` without storing the sequence.
pub fn for_each_s<F: Real>(cf: &ContinuedFraction, depth: usize, mut visit: impl FnMut(usize, F)) -> Result<()> {
    for item in Denominators::new(cf).skip(1) {
        let (n, _, q) = item?;
        if n > depth {
            break;
        }
        visit(n, F::lit(2.0 * ln_bigint::<f64>(&q) / n as f64));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffEstimate<F> {
    pub steps: usize,
    /// `(1/N) sum_{j<N} ln|G'(G^j alpha)|`.
    pub mean: F,
    /// Bound on `|mean - true average|` from the enclosure widths plus float
    /// rounding.
    pub error: F,
    /// `a_{j+1} x_j^2 <= 1` and `x_j >= 1/(a_{j+1} + 1)` held exactly at
    /// every step, i.e. `ln a <= ln|G'| <= 2 ln(a + 1)`.
    pub sandwich_holds: bool,
}

/// Enclosure of `G^j(alpha)` with relative width at most `2^-bits`.
fn orbit_enclosure(point: &OrbitPoint, bits: u32) -> Result<Interval> {
    let scale = BigRational::from_integer(BigInt::one() << bits as usize);
    let mut depth = 4;
    loop {
        let enc = evaluate_enclosure(&point.tail, depth)?;
        if enc.lo().is_zero() {
            return Err(Error::RationalSource("orbit terminates at rational"));
        }
        if enc.width() * &scale <= *enc.lo() || enc.is_point() {
            return Ok(enc);
        }
        depth *= 2;
    }
}

/// Birkhoff average of `ln|G'| = -2 ln x` along the orbit, each `x_j` from
/// an enclosure of relative width `2^-bits`.
pub fn birkhoff_log_derivative<F: Real>(cf: &ContinuedFraction, steps: usize, bits: u32) -> Result<BirkhoffEstimate<F>> {
    if steps == 0 {
        return Err(Error::invalid("steps must be >= 1"));
    }
    if cf.is_rational() {
        return Err(Error::RationalSource("orbit terminates at rational"));
    }
    let mut point = OrbitPoint::start(cf);
    let mut sum = 0f64;
    let mut err = 0f64;
    let mut sandwich = true;
    for _ in 0..steps {
        let a = point.tail.coefficient(1)?.ok_or(Error::RationalSource("orbit terminates at rational"))?;
        let enc = orbit_enclosure(&point, bits)?;
        let hi = -2.0 * ln_ratio::<f64>(enc.lo());
        let lo = -2.0 * ln_ratio::<f64>(enc.hi());
        sum += (hi + lo) / 2.0;
        err += (hi - lo) / 2.0 + 4.0 * f64::EPSILON * hi.abs().max(1.0);
        let a_r = BigRational::from_integer(a.clone());
        let upper_ok = enc.hi() * enc.hi() * &a_r <= BigRational::one();
        let lower_ok = enc.lo() * (a_r + BigRational::one()) >= BigRational::one();
        sandwich &= upper_ok && lower_ok;
        point = gauss_shift(&point)?;
    }
    let n = steps as f64;
    Ok(BirkhoffEstimate {
        steps,
        mean: F::lit(sum / n),
        error: F::lit(err / n + 4.0 * n * f64::EPSILON),
        sandwich_holds: sandwich,
    })
}
