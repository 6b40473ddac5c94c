//! Depth-N diagnostics for bounded type, approximation speed and distance,
//! the Diophantine exponent and the Brjuno sum.
//!
//! Every report is a statement about the first `N` convergents only. The
//! arithmetic classes are tail properties and no finite truncation decides
//! them.

mod brjuno;

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::convergents::ConvergentTable;
use crate::error::{Error, Result};
use crate::exactnum::{evaluate_enclosure, ContinuedFraction, Interval};
use crate::gallery::SpeedFunction;
use crate::scalar::{ln_bigint, ln_ratio, Real};

pub use brjuno::{brjuno_partial, BrjunoReport, BrjunoTerm, BrjunoVerdict, DEFAULT_BRJUNO_DIGITS};

/// Largest number of extra convergents used to tighten an error enclosure.
pub const REFINEMENT_BUDGET: usize = 200;

/// Exponent samples are pinned to within this distance.
pub const EXPONENT_TOLERANCE: f64 = 1e-6;

fn irrational(cf: &ContinuedFraction, what: &'static str) -> Result<()> {
    if cf.is_rational() {
        Err(Error::RationalSource(what))
    } else {
        Ok(())
    }
}

/// Window `(N - w, N]` with the default `w = ceil(N/2)`.
fn window_start(depth: usize, window: Option<usize>) -> usize {
    let w = window.unwrap_or(depth.div_ceil(2)).clamp(1, depth);
    depth - w + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedType {
    pub depth: usize,
    /// Exact `max(a_1, ..., a_N)`.
    pub max_coefficient: BigInt,
    /// Smallest index attaining the maximum.
    pub argmax: usize,
    /// No new record coefficient in the trailing half of the range. A
    /// heuristic at depth N, not a proof of bounded type.
    pub bounded_flag: bool,
}

pub fn bounded_type_upto(cf: &ContinuedFraction, depth: usize) -> Result<BoundedType> {
    if depth == 0 {
        return Err(Error::invalid("depth must be >= 1"));
    }
    let start = window_start(depth, None);
    let mut best = BigInt::zero();
    let mut argmax = 0;
    for n in 1..=depth {
        let Some(a) = cf.coefficient(n)? else {
            return Err(Error::EndOfStream { index: n });
        };
        if a > best {
            best = a;
            argmax = n;
        }
    }
    Ok(BoundedType {
        depth,
        max_coefficient: best,
        argmax,
        bounded_flag: argmax < start,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessStatus {
    /// `|alpha - p/q| <= psi(q)` holds exactly.
    Certified,
    /// The error enclosure still straddles `psi(q)` after refinement.
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedWitness {
    /// Convergent index, or `None` for a non-convergent found by brute force.
    pub n: Option<usize>,
    pub p: BigInt,
    pub q: BigInt,
    pub error: Interval,
    /// Enclosure of `psi(q) - |alpha - p/q|`.
    pub margin: Interval,
    pub status: WitnessStatus,
}

/// Brute force over non-convergents covers `q` up to this bound.
pub const BRUTE_FORCE_Q: u64 = 1000;

/// All `n = 1..=N` whose convergent satisfies `|alpha - p_n/q_n| <= psi(q_n)`.
///
/// Rationals with error below `1/(2q^2)` are convergents, so when `psi`'s
/// constant is at most 1/2 the convergents are the complete list. For a
/// larger constant, non-convergents with `q <= min(1000, q_N)` are added by
/// exhaustive search.
pub fn speed_witnesses(
    cf: &ContinuedFraction,
    psi: &SpeedFunction,
    depth: usize,
) -> Result<Vec<SpeedWitness>> {
    irrational(cf, "speed test undefined for rationals")?;
    let mut table = ConvergentTable::new(cf.clone());
    let mut out = Vec::new();
    for n in 1..=depth {
        table.require(n)?;
        let c = table.get(n).expect("populated").clone();
        let mut extra = 2;
        loop {
            let err = table.certified_error(n, extra)?;
            let below = psi.compare(err.hi(), &c.q) != Ordering::Greater;
            let above = psi.compare(err.lo(), &c.q) == Ordering::Greater;
            if above {
                break;
            }
            if below || extra >= REFINEMENT_BUDGET {
                let status = if below {
                    WitnessStatus::Certified
                } else {
                    WitnessStatus::Boundary
                };
                out.push(SpeedWitness {
                    n: Some(n),
                    margin: margin(psi, &c.q, &err),
                    p: c.p,
                    q: c.q,
                    error: err,
                    status,
                });
                break;
            }
            extra = (extra * 2).min(REFINEMENT_BUDGET);
        }
    }
    if psi.coefficient() > &BigRational::new(1.into(), 2.into()) {
        let q_max = table.get(depth).expect("populated").q.clone().min(BRUTE_FORCE_Q.into());
        out.extend(brute_force_witnesses(cf, psi, &table, &q_max)?);
    }
    Ok(out)
}

fn margin(psi: &SpeedFunction, q: &BigInt, err: &Interval) -> Interval {
    let p = psi.enclosure(q);
    Interval::spanning(p.lo() - err.hi(), p.hi() - err.lo())
}

fn brute_force_witnesses(
    cf: &ContinuedFraction,
    psi: &SpeedFunction,
    table: &ConvergentTable,
    q_max: &BigInt,
) -> Result<Vec<SpeedWitness>> {
    // enclosure narrow enough that |alpha - p/q| is pinned for every q <= q_max
    let target = BigRational::new(BigInt::one(), q_max * q_max * BigInt::from(1u64 << 40));
    let mut depth = 2;
    let enc = loop {
        let enc = evaluate_enclosure(cf, depth)?;
        if enc.width() < target || depth >= 4 * REFINEMENT_BUDGET {
            break enc;
        }
        depth += 1;
    };
    let convergent = |p: &BigInt, q: &BigInt| table.entries().iter().any(|c| &c.p == p && &c.q == q);
    let mut out = Vec::new();
    let mut q = BigInt::one();
    while &q <= q_max {
        let qr = BigRational::from_integer(q.clone());
        let fl = (enc.lo() * &qr).floor().to_integer();
        for p in [fl.clone(), &fl + 1] {
            if !p.gcd(&q).is_one() || convergent(&p, &q) {
                continue;
            }
            let x = BigRational::new(p.clone(), q.clone());
            let err = enc.shift(&-x).abs();
            if psi.compare(err.lo(), &q) == Ordering::Greater {
                continue;
            }
            let status = if psi.compare(err.hi(), &q) != Ordering::Greater {
                WitnessStatus::Certified
            } else {
                WitnessStatus::Boundary
            };
            out.push(SpeedWitness {
                n: None,
                margin: margin(psi, &q, &err),
                p,
                q: q.clone(),
                error: err,
                status,
            });
        }
        q += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFloor {
    pub exponent: BigRational,
    pub depth: usize,
    /// Enclosure of `min_{n <= N} q_n^e |alpha - p_n/q_n|`.
    pub floor: Interval,
    pub argmin: usize,
    /// The same minimum over the trailing half `n > N/2`, which tracks the
    /// liminf rather than early outliers.
    pub tail_floor: Interval,
}

/// Enclosure of the infimum of `q_n^e |alpha - p_n/q_n|` over `n <= N`.
///
/// For `e = 2` this is the infimum of `q^2 |alpha - p/q|` over every
/// rational with `q < q_{N+1}`, because convergents are the best
/// approximations of the second kind.
pub fn distance_floor(cf: &ContinuedFraction, e: &BigRational, depth: usize) -> Result<DistanceFloor> {
    irrational(cf, "distance undefined for rationals")?;
    let unit = SpeedFunction::new(BigRational::one(), e.clone())?;
    let mut table = ConvergentTable::new(cf.clone());
    let start = window_start(depth.max(1), None);
    let mut floor: Option<Interval> = None;
    let mut tail: Option<Interval> = None;
    let mut argmin = 0;
    for n in 0..=depth {
        let q = table.get(n).expect("populated").q.clone();
        let inv = unit.enclosure(&q);
        let mut extra = 2;
        // err / q^-e, refined to a relative width of 2^-40
        let v = loop {
            let err = table.certified_error(n, extra)?;
            let v = Interval::spanning(err.lo() / inv.hi(), err.hi() / inv.lo());
            let tight = v.width() * BigRational::from_integer(BigInt::one() << 40usize) <= *v.lo();
            if tight || extra >= REFINEMENT_BUDGET {
                break v;
            }
            extra = (extra * 2).min(REFINEMENT_BUDGET);
        };
        let lower = |cur: &Option<Interval>| match cur {
            Some(f) => Interval::spanning(
                f.lo().clone().min(v.lo().clone()),
                f.hi().clone().min(v.hi().clone()),
            ),
            None => v.clone(),
        };
        if floor.as_ref().is_none_or(|f| v.lo() < f.lo()) {
            argmin = n;
        }
        floor = Some(lower(&floor));
        if n >= start {
            tail = Some(lower(&tail));
        }
    }
    Ok(DistanceFloor {
        exponent: e.clone(),
        depth,
        floor: floor.expect("n = 0 visited"),
        argmin,
        tail_floor: tail.expect("window nonempty"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSample<F> {
    pub n: usize,
    /// Enclosure of `mu_n = -ln|alpha - p_n/q_n| / ln q_n`, at most
    /// `2e-6` wide.
    pub lo: F,
    pub hi: F,
}

impl<F: Real> ExponentSample<F> {
    pub fn value(&self) -> F {
        (self.lo + self.hi) / F::lit(2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassFlags {
    pub bounded_type_upto: BoundedType,
    /// Same test as `bounded_type_upto.bounded_flag`: bounded, slow and
    /// badly approximable coincide.
    pub slow_candidate: bool,
    /// For each `gamma` of the grid, the `n` with `mu_n >= 2 + gamma`.
    pub fast_witnesses: Vec<(f64, Vec<usize>)>,
    /// `n` with `mu_n >= 2 + gamma` for the largest grid `gamma`.
    pub superfast_witnesses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineReport<F> {
    pub depth: usize,
    pub max_coefficient: BigInt,
    pub exponent_samples: Vec<ExponentSample<F>>,
    /// Max of the samples over the window.
    pub exponent_estimate: F,
    pub window: usize,
    pub class_flags: ClassFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineOptions {
    pub gamma_grid: Vec<f64>,
    /// Trailing window width; `None` means `ceil(N/2)`.
    pub window: Option<usize>,
}

impl Default for DiophantineOptions {
    fn default() -> Self {
        Self {
            gamma_grid: vec![0.5, 1.0, 2.0, 3.0],
            window: None,
        }
    }
}

/// `mu_n` enclosed to within [`EXPONENT_TOLERANCE`], or `None` when
/// `q_n = 1`.
pub fn exponent_sample<F: Real>(table: &mut ConvergentTable, n: usize) -> Result<Option<ExponentSample<F>>> {
    table.require(n)?;
    let q = table.get(n).expect("populated").q.clone();
    if q.is_one() {
        return Ok(None);
    }
    let ln_q: f64 = ln_bigint(&q);
    let mut extra = 2;
    loop {
        let err = table.certified_error(n, extra)?;
        let lo = -ln_ratio::<f64>(err.hi()) / ln_q;
        let hi = -ln_ratio::<f64>(err.lo()) / ln_q;
        // a few ulps for the float logarithms
        let slack = 8.0 * f64::EPSILON * hi.abs().max(1.0);
        if hi - lo <= 2.0 * EXPONENT_TOLERANCE - 2.0 * slack {
            return Ok(Some(ExponentSample {
                n,
                lo: F::lit(lo - slack),
                hi: F::lit(hi + slack),
            }));
        }
        if extra >= REFINEMENT_BUDGET {
            return Err(Error::PrecisionExhausted {
                certified_upto: Some(table.last_index()),
            });
        }
        extra = (extra * 2).min(REFINEMENT_BUDGET);
    }
}

pub fn diophantine_report<F: Real>(
    cf: &ContinuedFraction,
    depth: usize,
    options: &DiophantineOptions,
) -> Result<DiophantineReport<F>> {
    if depth < 2 {
        return Err(Error::invalid("depth must be >= 2"));
    }
    irrational(cf, "Diophantine exponent undefined for rationals")?;
    let bounded = bounded_type_upto(cf, depth)?;
    let start = window_start(depth, options.window);
    let mut table = ConvergentTable::new(cf.clone());
    let mut samples = Vec::new();
    for n in 1..=depth {
        if let Some(s) = exponent_sample::<F>(&mut table, n)? {
            samples.push(s);
        }
    }
    let estimate = samples
        .iter()
        .filter(|s| s.n >= start)
        .map(ExponentSample::value)
        .fold(F::neg_infinity(), F::max);
    let hits = |gamma: f64| -> Vec<usize> {
        samples
            .iter()
            .filter(|s| s.lo >= F::lit(2.0 + gamma))
            .map(|s| s.n)
            .collect()
    };
    let fast: Vec<(f64, Vec<usize>)> = options.gamma_grid.iter().map(|&g| (g, hits(g))).collect();
    let top = options.gamma_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let superfast = if top.is_finite() { hits(top) } else { vec![] };
    Ok(DiophantineReport {
        depth,
        max_coefficient: bounded.max_coefficient.clone(),
        exponent_samples: samples,
        exponent_estimate: estimate,
        window: depth - start + 1,
        class_flags: ClassFlags {
            slow_candidate: bounded.bounded_flag,
            bounded_type_upto: bounded,
            fast_witnesses: fast,
            superfast_witnesses: superfast,
        },
    })
}

impl<F: Real> DiophantineReport<F> {
    /// Tab-separated `n, mu_lo, mu_hi` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tmu_lo\tmu_hi\n");
        for s in &self.exponent_samples {
            writeln!(out, "{}\t{:.9}\t{:.9}", s.n, s.lo, s.hi).expect("write to string");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{euler_pattern, golden_ratio, liouville_factorial, sqrt2_minus_1};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bounded_type_examples() {
        let g = bounded_type_upto(&golden_ratio(), 1000).unwrap();
        assert_eq!(g.max_coefficient, BigInt::one());
        assert!(g.bounded_flag);
        let e = bounded_type_upto(&euler_pattern(), 14).unwrap();
        assert_eq!(e.max_coefficient, BigInt::from(10));
        assert!(!e.bounded_flag);
        let l = bounded_type_upto(&liouville_factorial(10).unwrap(), 3).unwrap();
        assert_eq!(l.max_coefficient, num_traits::pow(BigInt::from(10), 6));
    }

    #[test]
    fn speed_witness_examples() {
        let third = SpeedFunction::new(r(1, 3), r(2, 1)).unwrap();
        assert!(speed_witnesses(&golden_ratio(), &third, 50).unwrap().is_empty());

        let quartic = SpeedFunction::power(4).unwrap();
        let l = speed_witnesses(&liouville_factorial(10).unwrap(), &quartic, 4).unwrap();
        let ns: Vec<_> = l.iter().map(|w| w.n).collect();
        // n = 2 misses: a_3 = 10^6 < q_2^2 = 1001^2, and q_2 q_3 < q_2^4
        assert_eq!(ns, vec![Some(1), Some(3), Some(4)]);
        assert!(l.iter().all(|w| w.status == WitnessStatus::Certified && w.margin.lo() > &BigRational::zero()));

        let square = SpeedFunction::power(2).unwrap();
        for cf in [golden_ratio(), euler_pattern(), sqrt2_minus_1()] {
            let w = speed_witnesses(&cf, &square, 20).unwrap();
            let convergent_ns: Vec<_> = w.iter().filter_map(|w| w.n).collect();
            assert_eq!(convergent_ns, (1..=20).collect::<Vec<_>>());
        }
    }

    #[test]
    fn brute_force_finds_non_convergents() {
        let psi = SpeedFunction::new(r(1, 1), r(2, 1)).unwrap();
        let w = speed_witnesses(&golden_ratio(), &psi, 12).unwrap();
        for x in w.iter().filter(|w| w.n.is_none()) {
            assert!(x.q <= BigInt::from(BRUTE_FORCE_Q));
            assert!(x.status == WitnessStatus::Certified || x.status == WitnessStatus::Boundary);
        }
        // every non-convergent has error >= 1/(2q^2)
        for x in w.iter().filter(|w| w.n.is_none()) {
            assert!(x.error.hi() * BigRational::from_integer(&x.q * &x.q * 2) >= BigRational::one());
        }
    }

    #[test]
    fn distance_floor_examples() {
        let g = distance_floor(&golden_ratio(), &r(2, 1), 40).unwrap();
        let inv_sqrt5 = 1.0 / 5f64.sqrt();
        let t = crate::scalar::ratio_to_real::<f64>(&g.tail_floor.midpoint());
        assert!((t - inv_sqrt5).abs() < 1e-6, "{t}");
        // q = 1, p = 2 gives the global infimum 2 - phi
        let f = crate::scalar::ratio_to_real::<f64>(&g.floor.midpoint());
        assert!((f - (2.0 - 1.618033988749895)).abs() < 1e-9);
        assert_eq!(g.argmin, 1);

        let s = distance_floor(&sqrt2_minus_1(), &r(2, 1), 40).unwrap();
        let t = crate::scalar::ratio_to_real::<f64>(&s.tail_floor.midpoint());
        assert!((t - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-6, "{t}");

        let l = distance_floor(&liouville_factorial(10).unwrap(), &r(2, 1), 4).unwrap();
        assert!(l.floor.hi() < &r(1, 1_000_000));
    }

    #[test]
    fn diophantine_examples() {
        let opts = DiophantineOptions::default();
        let g = diophantine_report::<f64>(&golden_ratio(), 400, &opts).unwrap();
        assert!((g.exponent_estimate - 2.0).abs() < 0.01, "{}", g.exponent_estimate);
        for s in &g.exponent_samples {
            assert!(s.hi - s.lo <= 2.0 * EXPONENT_TOLERANCE);
            assert!(s.lo > 2.0);
        }
        let l = diophantine_report::<f64>(&liouville_factorial(10).unwrap(), 4, &opts).unwrap();
        assert!(l.exponent_estimate > 5.0);
        assert!(!l.class_flags.superfast_witnesses.is_empty());
        let e = diophantine_report::<f64>(&euler_pattern(), 60, &opts).unwrap();
        assert!(e.exponent_estimate < 2.2, "{}", e.exponent_estimate);
        assert!(e.class_flags.superfast_witnesses.is_empty());
        let e32 = diophantine_report::<f32>(&euler_pattern(), 60, &opts).unwrap();
        assert!((e32.exponent_estimate as f64 - e.exponent_estimate).abs() < 1e-5);
    }

    #[test]
    fn rationals_are_rejected() {
        let x = crate::exactnum::cf_from_rational(&r(355, 113));
        assert!(matches!(
            diophantine_report::<f64>(&x, 5, &DiophantineOptions::default()),
            Err(Error::RationalSource(_))
        ));
        assert!(distance_floor(&x, &r(2, 1), 2).is_err());
    }

    #[test]
    fn tsv_has_header_and_rows() {
        let g = diophantine_report::<f64>(&golden_ratio(), 10, &DiophantineOptions::default()).unwrap();
        let tsv = g.to_tsv();
        assert!(tsv.starts_with("n\tmu_lo\tmu_hi\n"));
        assert_eq!(tsv.lines().count(), 1 + g.exponent_samples.len());
    }
}
