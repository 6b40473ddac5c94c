//! The Gauss measure `dx / ((1 + x) ln 2)` and integrals against it.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::Interval;
use crate::precise::{bits_for_digits, ln2, ln_ratio as ln_ratio_precise};
use crate::scalar::{ln_ratio, Real};

/// Pseudorandom generator behind [`monte_carlo_lyapunov`].
pub const MC_GENERATOR: &str = "ChaCha8Rng";

/// The log singularity of the Lyapunov integrand is integrated analytically
/// on `[0, QUADRATURE_SPLIT]`.
pub const QUADRATURE_SPLIT: f64 = 1e-6;

const CHUNK: usize = 1 << 16;

fn check_unit(a: &BigRational, b: &BigRational) -> Result<()> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if a < &zero || b > &one || a > b {
        return Err(Error::invalid("need 0 <= a <= b <= 1"));
    }
    Ok(())
}

/// `mu_g([a, b]) = ln((1 + b)/(1 + a)) / ln 2`.
pub fn gauss_measure_interval<F: Real>(a: &BigRational, b: &BigRational) -> Result<F> {
    check_unit(a, b)?;
    let one = BigRational::one();
    let ratio = (&one + b) / (&one + a);
    Ok(ln_ratio::<F>(&ratio) / F::LN_2())
}

/// Rational enclosure of `mu_g([a, b])` good to about `10^-digits`.
pub fn gauss_measure_enclosure(a: &BigRational, b: &BigRational, digits: u32) -> Result<Interval> {
    check_unit(a, b)?;
    let one = BigRational::one();
    let bits = bits_for_digits(digits) + 8;
    let num = ln_ratio_precise(&((&one + b) / (&one + a)), bits);
    let den = ln2(bits);
    let (nl, nh) = (num.lower().max(BigRational::zero()), num.upper());
    Ok(Interval::spanning(nl / den.upper(), nh / den.lower()))
}

/// `pi^2 / (6 ln 2)`.
pub fn lambda_gauss_exact<F: Real>() -> F {
    F::PI() * F::PI() / (F::lit(6.0) * F::LN_2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<F> {
    pub value: F,
    /// Estimated absolute error.
    pub error: F,
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Real>(f: &impl Fn(F) -> F, a: F, b: F) -> (F, F) {
    let half = F::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c);
    let mut kron = fc * F::lit(WGK[7]);
    let mut gauss = fc * F::lit(WG[3]);
    for i in 0..7 {
        let x = h * F::lit(XGK[i]);
        let pair = f(c - x) + f(c + x);
        kron = kron + pair * F::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * F::lit(WG[i / 2]);
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adaptive<F: Real>(f: &impl Fn(F) -> F, a: F, b: F, tol: F, depth: u32) -> Quadrature<F> {
    let (v, e) = gk15(f, a, b);
    if e <= tol || depth == 0 {
        return Quadrature { value: v, error: e };
    }
    let m = (a + b) * F::lit(0.5);
    let half = tol * F::lit(0.5);
    let l = adaptive(f, a, m, half, depth - 1);
    let r = adaptive(f, m, b, half, depth - 1);
    Quadrature {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

/// Adaptive Gauss-Kronrod on `[a, b]`; `[a, b]` is first cut geometrically
/// so integrands with a mild singularity near `a > 0` are resolved evenly.
pub fn integrate<F: Real>(f: impl Fn(F) -> F, a: F, b: F, tol: F) -> Quadrature<F> {
    let mut cuts = vec![a];
    if a > F::zero() {
        let mut x = a;
        while x * F::lit(10.0) < b {
            x = x * F::lit(10.0);
            cuts.push(x);
        }
    }
    cuts.push(b);
    let pieces = F::from_usize(cuts.len() - 1).expect("small count");
    let mut total = Quadrature {
        value: F::zero(),
        error: F::zero(),
    };
    for w in cuts.windows(2) {
        let q = adaptive(&f, w[0], w[1], tol / pieces, 40);
        total.value = total.value + q.value;
        total.error = total.error + q.error;
    }
    total
}

/// `int_0^d 2 ln(1/x) / ((1 + x) ln 2) dx` from
/// `int_0^d x^k (-ln x) dx = d^(k+1)/(k+1) (-ln d + 1/(k+1))`, summed as
/// an alternating series.
fn singular_piece<F: Real>(d: F) -> Quadrature<F> {
    let minus_ln = -d.ln();
    let mut sum = F::zero();
    let mut power = d;
    let mut last = F::zero();
    for k in 0..64 {
        let k1 = F::from_usize(k + 1).expect("small");
        let term = power / k1 * (minus_ln + F::one() / k1);
        if k % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
        last = term;
        if term < F::epsilon() * sum.abs() * F::lit(1e-3) {
            break;
        }
        power = power * d;
    }
    let scale = F::lit(2.0) / F::LN_2();
    Quadrature {
        value: sum * scale,
        error: last * scale,
    }
}

/// `lambda_{mu_g} = int_0^1 2 ln(1/x) / ((1 + x) ln 2) dx` to within `tol`.
pub fn lambda_gauss_quadrature<F: Real>(tol: F) -> Quadrature<F> {
    let d = F::lit(QUADRATURE_SPLIT);
    let head = singular_piece(d);
    let scale = F::lit(2.0) / F::LN_2();
    let body = integrate(|x: F| -x.ln() / (F::one() + x) * scale, d, F::one(), tol * F::lit(0.5));
    Quadrature {
        value: head.value + body.value,
        error: head.error + body.error,
    }
}

/// `int_0^1 dx / ((1 + x) ln 2)`, which is 1.
pub fn gauss_density_quadrature<F: Real>(tol: F) -> Quadrature<F> {
    integrate(|x: F| F::one() / ((F::one() + x) * F::LN_2()), F::zero(), F::one(), tol)
}

// int_K^inf ln x / (x + 1)^2 dx
fn log_tail_integral(k: f64) -> f64 {
    k.ln() / (k + 1.0) + (1.0 / k).ln_1p()
}

/// `sum_{k=2}^{K} ln k mu_g(cylinder k)` plus the midpoint of a bracket on
/// the remaining tail; returns `(estimate, half-width of the bracket)`.
///
/// For `k > K` the terms lie between `(1 - 1/(2K(K+2))) ln k / (k+1)^2` and
/// `(1 + (4/3)/(K+1)^2) ln k / (k+1)^2` (over `ln 2`), and since
/// `ln x/(x+1)^2` decreases for `x >= 3` the sum of those is bracketed by
/// its integrals from `K + 1` and from `K`.
pub fn kappa_partial<F: Real>(cutoff: usize) -> (F, F) {
    assert!(cutoff >= 3, "cutoff must be >= 3");
    let mut sum = 0f64;
    let mut comp = 0f64;
    for k in (2..=cutoff).rev() {
        let kf = k as f64;
        let term = kf.ln() * (1.0 / (kf * (kf + 2.0))).ln_1p();
        // Kahan summation, smallest terms first
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let kf = cutoff as f64;
    let lower = (1.0 - 1.0 / (2.0 * kf * (kf + 2.0))) * log_tail_integral(kf + 1.0);
    let upper = (1.0 + (4.0 / 3.0) / ((kf + 1.0) * (kf + 1.0))) * log_tail_integral(kf);
    let ln2 = std::f64::consts::LN_2;
    let estimate = (sum + (lower + upper) / 2.0) / ln2;
    let half_width = (upper - lower) / 2.0 / ln2 + cutoff as f64 * f64::EPSILON * sum;
    (F::lit(estimate), F::lit(half_width))
}

/// `kappa_{mu_g} = sum_k ln k mu_g(1/(k+1), 1/k)` to within `tol` (for `tol`
/// not below about `1e-11`).
pub fn kappa_gauss<F: Real>(tol: F) -> Quadrature<F> {
    let mut cutoff = 1000;
    loop {
        let (v, e) = kappa_partial::<F>(cutoff);
        if e <= tol || cutoff >= 1 << 24 {
            return Quadrature { value: v, error: e };
        }
        cutoff *= 4;
    }
}

/// `-2 ln x` at `x = 2^u - 1`, the inverse distribution function of `mu_g`.
pub fn lyapunov_sample<F: Real>(u: F) -> F {
    let x = (u * F::LN_2()).exp_m1();
    F::lit(-2.0) * x.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult<F> {
    pub seed: u64,
    pub samples: usize,
    pub generator: &'static str,
    pub mean: F,
    pub standard_error: F,
}

// count, mean, sum of squared deviations
type Moments = (usize, f64, f64);

fn merge(a: Moments, b: Moments) -> Moments {
    if a.0 == 0 {
        return b;
    }
    if b.0 == 0 {
        return a;
    }
    let n = (a.0 + b.0) as f64;
    let delta = b.1 - a.1;
    let mean = a.1 + delta * b.0 as f64 / n;
    let m2 = a.2 + b.2 + delta * delta * a.0 as f64 * b.0 as f64 / n;
    (a.0 + b.0, mean, m2)
}

/// Monte Carlo estimate of `lambda_{mu_g}`: chunk `i` draws from the
/// generator seeded with `seed` on stream `i`, so the result does not depend
/// on thread count.
pub fn monte_carlo_lyapunov<F: Real>(samples: usize, seed: u64) -> Result<MonteCarloResult<F>> {
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let count = CHUNK.min(samples - i * CHUNK);
            let mut acc: Moments = (0, 0.0, 0.0);
            for _ in 0..count {
                // u in (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                let v = lyapunov_sample::<f64>(u);
                acc = merge(acc, (1, v, 0.0));
            }
            acc
        })
        .collect();
    let (n, mean, m2) = parts.into_iter().fold((0, 0.0, 0.0), merge);
    let variance = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    Ok(MonteCarloResult {
        seed,
        samples: n,
        generator: MC_GENERATOR,
        mean: F::lit(mean),
        standard_error: F::lit((variance / n as f64).sqrt()),
    })
}
