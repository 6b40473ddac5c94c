//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! measured values, then asserts.

use std::sync::Arc;
use std::time::Instant;

use diophantine::classifier::{brjuno_partial, diophantine_report, distance_floor, BrjunoVerdict, DiophantineOptions};
use diophantine::convergents::ConvergentTable;
use diophantine::dynamics::{
    birkhoff_log_derivative, for_each_s, lambda_gauss_exact, lambda_gauss_quadrature, lyapunov_report,
    monte_carlo_lyapunov,
};
use diophantine::exactnum::{
    evaluate_enclosure, ArithmeticRule, ContinuedFraction, RandomRule, SqrtEnclosure, DEFAULT_MAX_REFINEMENTS,
};
use diophantine::gallery::{
    construct_at_speed, euler_pattern, golden_ratio, liouville_factorial, sqrt2_minus_1, SpeedFunction, SpeedStrategy,
};
use diophantine::scalar::ratio_to_real;
use diophantine::{BigInt, BigRational};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id} ({name}): {} : {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn int(x: u64) -> BigInt {
    BigInt::from(x)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

// log-uniform in [1, max]
fn coefficient(rng: &mut ChaCha8Rng, max: u64) -> BigInt {
    let e = rng.random::<f64>() * (max as f64).log10();
    int((10f64.powf(e) as u64).clamp(1, max))
}

/// 500 streams: periodic, seeded random rule, arithmetic, shifted e, and
/// certified square roots, coefficients up to 10^6.
fn corpus() -> Vec<ContinuedFraction> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut out = Vec::with_capacity(500);
    for i in 0..500 {
        let a0 = BigInt::from(rng.random_range(-5i64..=5));
        let cf = match i % 5 {
            0 => {
                let pre: Vec<_> = (0..rng.random_range(0..5)).map(|_| coefficient(&mut rng, 1_000_000)).collect();
                let per: Vec<_> = (0..rng.random_range(1..6)).map(|_| coefficient(&mut rng, 1_000_000)).collect();
                ContinuedFraction::periodic(a0, pre, per).unwrap()
            }
            1 => {
                let max = coefficient(&mut rng, 1_000_000).to_string().parse().unwrap();
                ContinuedFraction::from_rule(a0, Arc::new(RandomRule::new(rng.random(), max).unwrap()))
            }
            2 => {
                let rule = ArithmeticRule::new(int(rng.random_range(1..=1000)), int(rng.random_range(0..=1000))).unwrap();
                ContinuedFraction::from_rule(a0, Arc::new(rule))
            }
            3 => {
                let j = rng.random_range(0..20);
                let e = euler_pattern().shifted(j);
                e.with_a0(a0)
            }
            _ => {
                let n = loop {
                    let n: u64 = rng.random_range(2..=1_000_000);
                    let r = (n as f64).sqrt() as u64;
                    if r * r != n && (r + 1) * (r + 1) != n {
                        break n;
                    }
                };
                ContinuedFraction::from_enclosure(Arc::new(SqrtEnclosure::new(int(n)).unwrap()), DEFAULT_MAX_REFINEMENTS)
                    .unwrap()
            }
        };
        out.push(cf);
    }
    out
}

#[test]
fn criterion_01_determinant_identity() {
    let start = Instant::now();
    let mut failures = 0;
    let mut checked = 0;
    for cf in corpus() {
        let mut t = ConvergentTable::new(cf);
        t.require(60).unwrap();
        for n in 0..=60 {
            let want = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            if t.determinant_check(n).unwrap() != want {
                failures += 1;
            }
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures == 0 && secs < 10.0;
    report(1, "determinant", pass, &format!("{checked} checks, {failures} mismatches, {secs:.2}s (limit 10s)"));
}

#[test]
fn criterion_02_error_sandwiches() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (i, cf) in corpus().into_iter().enumerate() {
        let mut t = ConvergentTable::new(cf);
        for n in 1..=40 {
            let (lo, hi) = t.error_bounds(n).unwrap();
            let (slo, shi) = t.coefficient_sandwich(n).unwrap();
            // tighten until the enclosure sits strictly inside the sandwich or the
            // refinement budget runs out
            let mut extra = 2;
            let err = loop {
                let err = t.certified_error(n, extra).unwrap();
                if err.strictly_inside(&slo, &shi) || extra >= 64 {
                    break err;
                }
                extra *= 2;
            };
            let closed = err.lo() >= &lo && err.hi() <= &hi;
            let strict = err.strictly_inside(&slo, &shi);
            if !(closed && strict) {
                bad.push((i, n));
            }
            checked += 1;
        }
    }
    report(
        2,
        "error sandwiches",
        bad.is_empty(),
        &format!("{checked} (stream, n) pairs, violations {:?}", &bad[..bad.len().min(10)]),
    );
}

fn legendre_violations(cf: &ContinuedFraction, qmax: u64) -> (usize, Vec<(BigInt, BigInt)>) {
    let mut table = ConvergentTable::new(cf.clone());
    table.extend(40).unwrap();
    // |alpha - x| pinned to far below 1/(2 qmax^2)
    let enc = evaluate_enclosure(cf, 60).unwrap();
    assert!(enc.width() * BigRational::from_integer(int(qmax * qmax) << 64usize) < BigRational::one());
    let mut hits = 0;
    let mut bad = Vec::new();
    for q in 1..=qmax {
        let qb = int(q);
        let center = (enc.lo() * BigRational::from_integer(qb.clone())).floor().to_integer();
        for p in [&center - 1, center.clone(), &center + 1, &center + 2] {
            let x = BigRational::new(p.clone(), qb.clone());
            let err = enc.shift(&x).abs();
            let limit = BigRational::new(BigInt::one(), &qb * &qb * 2);
            // decide err < limit exactly; the enclosure is narrow enough that the
            // two endpoints always agree here
            let below_hi = err.hi() < &limit;
            let below_lo = err.lo() < &limit;
            assert_eq!(below_hi, below_lo, "undecided at {p}/{q}");
            if below_hi {
                hits += 1;
                let g = p.gcd(&qb);
                let (pr, qr) = (&p / &g, &qb / &g);
                let is_conv = table.entries().iter().any(|c| c.p == pr && c.q == qr);
                if !is_conv {
                    bad.push((p, qb.clone()));
                }
            }
        }
    }
    (hits, bad)
}

#[test]
fn criterion_03_legendre_completeness() {
    let mut all_ok = true;
    let mut detail = Vec::new();
    for (name, cf) in [("golden", golden_ratio()), ("sqrt2-1", sqrt2_minus_1()), ("e", euler_pattern())] {
        let (hits, bad) = legendre_violations(&cf, 200);
        all_ok &= bad.is_empty();
        detail.push(format!("{name}: {hits} fractions below 1/(2q^2), {} non-convergents", bad.len()));
    }
    report(3, "Legendre completeness", all_ok, &detail.join("; "));
}

#[test]
fn criterion_04_gauss_lyapunov_constant() {
    let start = Instant::now();
    let exact = lambda_gauss_exact::<f64>();
    let q = lambda_gauss_quadrature::<f64>(1e-8);
    let mc = monte_carlo_lyapunov::<f64>(1_000_000, 42).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let quad_ok = (q.value - exact).abs() <= 1e-8;
    let z = (mc.mean - q.value).abs() / mc.standard_error;
    let pass = quad_ok && z <= 4.0 && secs < 30.0;
    report(
        4,
        "Gauss-measure Lyapunov constant",
        pass,
        &format!(
            "quadrature {:.12} vs pi^2/(6 ln 2) {:.12} (diff {:.2e}); Monte Carlo {:.6} +- {:.2e} ({z:.2} s.e., {} seed {}); {secs:.2}s",
            q.value,
            exact,
            (q.value - exact).abs(),
            mc.mean,
            mc.standard_error,
            mc.generator,
            mc.seed
        ),
    );
}

#[test]
fn criterion_05_quadratic_surd_lyapunov() {
    let golden = 2.0 * ((5f64.sqrt() + 1.0) / 2.0).ln();
    let silver = 2.0 * (1.0 + 2f64.sqrt()).ln();
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, cf, target) in [("golden", golden_ratio(), golden), ("[0; 2, 2, ...]", sqrt2_minus_1(), silver)] {
        let rep = lyapunov_report::<f64>(&cf, 200, None).unwrap();
        let b = birkhoff_log_derivative::<f64>(&cf, 200, 64).unwrap();
        let up = (rep.lambda_upper_estimate - target).abs();
        let lo = (rep.lambda_lower_estimate - target).abs();
        let cross = (b.mean - rep.s_n(200)).abs();
        pass &= up <= 1e-3 && lo <= 1e-3 && cross <= 1e-2;
        detail.push(format!(
            "{name}: target {target:.6}, upper {:.6} (off {up:.2e}), lower {:.6} (off {lo:.2e}), Birkhoff {:.6} vs s_200 {:.6} (diff {cross:.2e})",
            rep.lambda_upper_estimate,
            rep.lambda_lower_estimate,
            b.mean,
            rep.s_n(200)
        ));
    }
    report(5, "quadratic-surd Lyapunov", pass, &detail.join("; "));
}

#[test]
fn criterion_06_golden_series_bounds() {
    let mut t = ConvergentTable::new(golden_ratio());
    t.require(60).unwrap();
    let sum: BigRational = t.entries()[..=60].iter().map(|c| BigRational::new(BigInt::one(), c.q.clone())).sum();
    // (3 + sqrt 5)/2 < x  <=>  2x - 3 > 0 and (2x - 3)^2 > 5
    let below_bound = |x: &BigRational| {
        let y = x * rat(2, 1) - rat(3, 1);
        y.is_negative() || &y * &y < rat(5, 1)
    };
    let sum_ok = below_bound(&sum);
    let from_one: BigRational = &sum - BigRational::one();
    let rep = brjuno_partial(&golden_ratio(), 30, 64, None).unwrap();
    let tail = rep.tail_bound.clone();
    let tail_ok = tail.as_ref().is_some_and(|t| t < &rat(1, 1000)) && rep.verdict == BrjunoVerdict::CertifiedFiniteAtDepth;
    report(
        6,
        "golden series bounds",
        sum_ok && tail_ok,
        &format!(
            "sum_(n=0..60) 1/q_n = {:.10} vs (3+sqrt5)/2 = {:.10} ({}); sum_(n=1..60) = {:.10}; Brjuno N=30 partial {:.10}, tail bound {}",
            ratio_to_real::<f64>(&sum),
            (3.0 + 5f64.sqrt()) / 2.0,
            if sum_ok { "below" } else { "NOT below" },
            ratio_to_real::<f64>(&from_one),
            rep.partial_sum.to_f64(),
            tail.map_or("none".to_string(), |t| format!("{:.3e}", ratio_to_real::<f64>(&t))),
        ),
    );
}

#[test]
fn criterion_07_e_divergence() {
    let k_max = 10_000usize;
    let n_max = 3 * k_max + 2;
    let mut first_above_3 = None;
    let mut running = f64::NEG_INFINITY;
    let mut running_dropped = false;
    let mut s_values = Vec::with_capacity(k_max + 1);
    for_each_s::<f64>(&euler_pattern(), n_max, |n, s| {
        if n % 3 == 2 {
            let k = (n - 2) / 3;
            let next = running.max(s);
            running_dropped |= next < running;
            running = next;
            if s > 3.0 && first_above_3.is_none() {
                first_above_3 = Some(k);
            }
            s_values.push(s);
        }
    })
    .unwrap();
    // exact form of the lower bound: q_{3k+2} >= 2^k (k+1)!
    let mut bound = BigInt::one();
    let mut violations = 0;
    let mut k = 0usize;
    let mut table_q = (BigInt::zero(), BigInt::one());
    let e = euler_pattern();
    for n in 1..=n_max {
        let a = e.coefficient(n).unwrap().unwrap();
        let q = &a * &table_q.1 + &table_q.0;
        table_q = (std::mem::replace(&mut table_q.1, q.clone()), q.clone());
        if n % 3 == 2 {
            if k > 0 {
                bound *= 2 * (k + 1);
            }
            if q < bound {
                violations += 1;
            }
            k += 1;
        }
    }
    let pass = first_above_3.is_some() && !running_dropped && violations == 0;
    report(
        7,
        "e divergence",
        pass,
        &format!(
            "first k with s_(3k+2) > 3: {:?}; s at k = 10^4: {:.6}; running max nondecreasing: {}; lower-bound violations over {} k: {violations}",
            first_above_3,
            s_values.last().copied().unwrap_or(f64::NAN),
            !running_dropped,
            s_values.len()
        ),
    );
}

#[test]
fn criterion_08_e_diophantine() {
    let rep = diophantine_report::<f64>(&euler_pattern(), 60, &DiophantineOptions::default()).unwrap();
    let mut t = ConvergentTable::new(euler_pattern());
    let mut failures = Vec::new();
    // gamma = 1: (2 q_n^3)^-1 < |e - p_n/q_n| for 2 <= n <= 60
    for n in 2..=60 {
        let q = t.get(n).map(|c| c.q.clone());
        let err = t.certified_error(n, 4).unwrap();
        let q = q.unwrap_or_else(|| t.get(n).unwrap().q.clone());
        let limit = BigRational::new(BigInt::one(), &q * &q * &q * 2);
        if err.lo() <= &limit {
            failures.push(n);
        }
    }
    let pass = rep.exponent_estimate <= 2.2 && failures.is_empty();
    report(
        8,
        "e Diophantine diagnostic",
        pass,
        &format!(
            "exponent_estimate {:.6} (limit 2.2), inequality failures at n = {failures:?}",
            rep.exponent_estimate
        ),
    );
}

#[test]
fn criterion_09_liouville() {
    let cf = liouville_factorial(10).unwrap();
    let rep = diophantine_report::<f64>(&cf, 4, &DiophantineOptions::default()).unwrap();
    let b = brjuno_partial(&cf, 5, 64, None).unwrap();
    let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 100));
    let mut over = Vec::new();
    for t in &b.terms[3..] {
        if t.upper >= tiny {
            over.push(format!("n={} term ~ {:.3e}", t.n, t.value.to_f64()));
        }
    }
    let pass = rep.exponent_estimate > 5.0 && over.is_empty();
    report(
        9,
        "Liouville behavior",
        pass,
        &format!(
            "exponent_estimate at depth 4: {:.4}; Brjuno terms n >= 3 not below 1e-100: [{}]; verdict {:?}",
            rep.exponent_estimate,
            over.join(", "),
            b.verdict
        ),
    );
}

#[test]
fn criterion_10_prescribed_speed() {
    let prefix = ContinuedFraction::finite(BigInt::zero(), vec![BigInt::one()]).unwrap();
    let psi = SpeedFunction::power(3).unwrap();
    let cf = construct_at_speed(&prefix, &psi, SpeedStrategy::Minimal).unwrap();
    let mut t = ConvergentTable::new(cf);
    let mut failures = Vec::new();
    for n in 0..=10 {
        let mut extra = 2;
        let ok = loop {
            let err = t.certified_error(n, extra).unwrap();
            let q = &t.get(n).unwrap().q;
            let bound = BigRational::new(BigInt::one(), q * q * q);
            if err.hi() < &bound {
                break true;
            }
            if err.lo() >= &bound || extra >= 16 {
                break false;
            }
            extra *= 2;
        };
        if !ok {
            failures.push(n);
        }
        if n >= 1 {
            // the chain |alpha - p_n/q_n| < 1/(a_{n+1} q_n^2) <= psi(q_n)
            let (_, up) = t.coefficient_sandwich(n).unwrap();
            let q = &t.get(n).unwrap().q;
            if up > BigRational::new(BigInt::one(), q * q * q) {
                failures.push(n);
            }
        }
    }
    let coeffs: Vec<String> = t.entries()[..8].iter().map(|c| t.coefficient(c.n).unwrap().to_string()).collect();
    report(
        10,
        "prescribed speed",
        failures.is_empty(),
        &format!("a_0..a_7 = {}; failures at n = {failures:?}", coeffs.join(" ")),
    );
}

#[test]
fn criterion_11_bounded_type_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let two = rat(2, 1);
    let mut bounded_bad = Vec::new();
    let mut worst_ratio = f64::INFINITY;
    for i in 0..200 {
        let m: u64 = rng.random_range(1..=50);
        let cf = if i % 2 == 0 {
            let pre: Vec<_> = (0..rng.random_range(0..6)).map(|_| int(rng.random_range(1..=m))).collect();
            let per: Vec<_> = (0..rng.random_range(1..8)).map(|_| int(rng.random_range(1..=m))).collect();
            ContinuedFraction::periodic(BigInt::from(rng.random_range(-3i64..=3)), pre, per).unwrap()
        } else {
            ContinuedFraction::from_rule(BigInt::zero(), Arc::new(RandomRule::new(rng.random(), m).unwrap()))
        };
        let f = distance_floor(&cf, &two, 40).unwrap();
        let limit = BigRational::new(BigInt::one(), int(3 * (m + 1)));
        let ratio = ratio_to_real::<f64>(&(f.floor.lo() / &limit));
        worst_ratio = worst_ratio.min(ratio);
        if f.floor.lo() < &limit {
            bounded_bad.push(i);
        }
    }
    let mut planted_bad = Vec::new();
    let mut worst_planted = 0f64;
    for i in 0..50 {
        let m: u64 = rng.random_range(1..=50);
        let mut pre: Vec<_> = (0..40).map(|_| int(rng.random_range(1..=m))).collect();
        let at = rng.random_range(1..40);
        pre[at] = int(rng.random_range(10_000..=1_000_000));
        let per: Vec<_> = (0..rng.random_range(1..5)).map(|_| int(rng.random_range(1..=m))).collect();
        let cf = ContinuedFraction::periodic(BigInt::zero(), pre, per).unwrap();
        let f = distance_floor(&cf, &two, 40).unwrap();
        worst_planted = worst_planted.max(ratio_to_real::<f64>(f.floor.hi()));
        if f.floor.hi() >= &rat(1, 1000) {
            planted_bad.push(i);
        }
    }
    let pass = bounded_bad.is_empty() && planted_bad.is_empty();
    report(
        11,
        "bounded-type distance floor",
        pass,
        &format!(
            "bounded: {} violations, min floor/(1/(3(M+1))) = {worst_ratio:.3}; planted: {} not below 1e-3, max floor {worst_planted:.3e}",
            bounded_bad.len(),
            planted_bad.len()
        ),
    );
}
