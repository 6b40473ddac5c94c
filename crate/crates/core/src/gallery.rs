//! Named numbers and the prescribed-speed construction.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactnum::{
    ArithmeticRule, CoefficientRule, ContinuedFraction, EulerRule, Interval, LiouvilleRule,
};

/// Power-law speed `psi(q) = c * q^(-e)` with `c > 0`, `e >= 2` rational.
///
/// Also used for distance functions `phi(q) = eps * q^(-(2 + gamma))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpeedFunction {
    c: BigRational,
    e: BigRational,
}

impl SpeedFunction {
    pub fn new(c: BigRational, e: BigRational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::invalid("speed coefficient must be positive"));
        }
        if e < BigRational::from_integer(2.into()) {
            return Err(Error::invalid("speed exponent must be >= 2"));
        }
        if e.denom() > &BigInt::from(u32::MAX) {
            return Err(Error::invalid("speed exponent denominator too large"));
        }
        Ok(Self { c, e })
    }

    /// `q^(-e)`.
    pub fn power(e: i64) -> Result<Self> {
        Self::new(BigRational::one(), BigRational::from_integer(e.into()))
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.c
    }

    pub fn exponent(&self) -> &BigRational {
        &self.e
    }

    fn exponent_parts(&self, minus_two: bool) -> (usize, u32) {
        let e = if minus_two {
            &self.e - BigRational::from_integer(2.into())
        } else {
            self.e.clone()
        };
        (
            e.numer().to_usize().expect("exponent numerator fits usize"),
            e.denom().to_u32().expect("checked at construction"),
        )
    }

    /// Exact comparison of a non-negative `err` with `psi(q)`.
    pub fn compare(&self, err: &BigRational, q: &BigInt) -> Ordering {
        let (a, b) = self.exponent_parts(false);
        // err vs c q^(-a/b)  <=>  (err/c)^b q^a vs 1
        let lhs = num_traits::pow(err / &self.c, b as usize)
            * BigRational::from_integer(num_traits::pow(q.clone(), a));
        lhs.cmp(&BigRational::one())
    }

    /// Rational enclosure of `psi(q)`, relative width about `2^-64`; a point
    /// when `q^e` is an integer.
    pub fn enclosure(&self, q: &BigInt) -> Interval {
        self.enclosure_bits(q, 64)
    }

    /// As [`Self::enclosure`], with the root taken on a `2^-bits` grid.
    pub fn enclosure_bits(&self, q: &BigInt, bits: u32) -> Interval {
        let (a, b) = self.exponent_parts(false);
        let qa = num_traits::pow(q.clone(), a);
        let exact = qa.nth_root(b);
        if num_traits::pow(exact.clone(), b as usize) == qa {
            return Interval::point(&self.c / BigRational::from_integer(exact));
        }
        // (q^a)^(1/b) lies in [r, r + 1] / 2^bits
        let scaled = &qa << (bits as usize * b as usize);
        let r = scaled.nth_root(b);
        let den = BigInt::one() << bits as usize;
        Interval::spanning(
            &self.c * BigRational::new(den.clone(), &r + 1),
            &self.c * BigRational::new(den, r),
        )
    }

    /// `ceil(1 / (q^2 psi(q)))` clamped to at least 1: the smallest partial
    /// quotient `a_{n+1}` that forces `|alpha - p_n/q_n| < psi(q_n)`.
    pub fn threshold(&self, q: &BigInt) -> BigInt {
        let (a, b) = self.exponent_parts(true);
        // smallest m with (m c)^b >= q^a
        let qa = BigRational::from_integer(num_traits::pow(q.clone(), a));
        let ok = |m: &BigInt| {
            num_traits::pow(BigRational::from_integer(m.clone()) * &self.c, b as usize) >= qa
        };
        let target = (&qa / num_traits::pow(self.c.clone(), b as usize)).ceil().to_integer();
        let mut m = target.nth_root(b).max(BigInt::one());
        while !ok(&m) {
            m += 1;
        }
        while m > BigInt::one() && ok(&(&m - 1)) {
            m -= 1;
        }
        m
    }
}

impl fmt::Display for SpeedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.c, self.e)
    }
}

pub fn golden_ratio() -> ContinuedFraction {
    ContinuedFraction::periodic(BigInt::one(), vec![], vec![BigInt::one()])
        .expect("valid periodic expansion")
}

/// `sqrt(2) - 1 = [0; 2, 2, 2, ...]`.
pub fn sqrt2_minus_1() -> ContinuedFraction {
    ContinuedFraction::periodic(BigInt::zero(), vec![], vec![BigInt::from(2)])
        .expect("valid periodic expansion")
}

/// `[2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`.
pub fn euler_pattern() -> ContinuedFraction {
    ContinuedFraction::from_rule(BigInt::from(2), Arc::new(EulerRule))
}

/// `[0; base^1!, base^2!, base^3!, ...]`.
pub fn liouville_factorial(base: i64) -> Result<ContinuedFraction> {
    let rule = LiouvilleRule::new(BigInt::from(base))?;
    Ok(ContinuedFraction::from_rule(BigInt::zero(), Arc::new(rule)))
}

/// `[0; 1, 2, 3, 4, ...]`.
pub fn naturals() -> ContinuedFraction {
    let rule = ArithmeticRule::new(BigInt::one(), BigInt::one()).expect("valid rule");
    ContinuedFraction::from_rule(BigInt::zero(), Arc::new(rule))
}

/// Continued fraction of `(p + sqrt(d)) / q`.
///
/// Runs the standard surd recurrence on states `(P, Q)`:
/// `a = floor((P + sqrt D)/Q)`, `P' = aQ - P`, `Q' = (D - P'^2)/Q`.
/// The recurrence stays integral only when `Q | D - P^2`; otherwise the
/// number is rewritten as `(P|Q| + sqrt(D Q^2)) / (Q|Q|)`, which fixes it.
/// The state space is finite, so a repeated state marks the period.
pub fn quadratic_surd(p: &BigInt, d: &BigInt, q: &BigInt) -> Result<ContinuedFraction> {
    if !d.is_positive() {
        return Err(Error::invalid("surd radicand must be positive"));
    }
    if q.is_zero() {
        return Err(Error::invalid("surd denominator must be nonzero"));
    }
    let root = d.sqrt();
    if &root * &root == *d {
        return Err(Error::NotIrrational(format!("{d} is a perfect square")));
    }
    let (mut pp, mut dd, mut qq) = (p.clone(), d.clone(), q.clone());
    if !(&dd - &pp * &pp).is_multiple_of(&qq) {
        let aq = qq.abs();
        pp *= &aq;
        dd *= &qq * &qq;
        qq *= &aq;
    }
    let s = dd.sqrt();
    let step = |pp: &BigInt, qq: &BigInt| -> BigInt {
        if qq.is_positive() {
            (pp + &s).div_floor(qq)
        } else {
            (pp + &s + BigInt::one()).div_floor(qq)
        }
    };

    let a0 = step(&pp, &qq);
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut a = a0.clone();
    loop {
        let np = &a * &qq - &pp;
        let nq = (&dd - &np * &np) / &qq;
        pp = np;
        qq = nq;
        let idx = coeffs.len();
        if let Some(&start) = seen.get(&(pp.clone(), qq.clone())) {
            let period = coeffs.split_off(start);
            return ContinuedFraction::periodic(a0, coeffs, period);
        }
        seen.insert((pp.clone(), qq.clone()), idx);
        a = step(&pp, &qq);
        coeffs.push(a.clone());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedStrategy {
    /// `a_{n+1}` equal to the threshold.
    Minimal,
    /// Threshold plus a seeded offset in `0..=RANDOM_OFFSET_MAX`.
    Randomized { seed: u64 },
}

pub const RANDOM_OFFSET_MAX: u64 = 1000;

/// Coefficients of a number approximated at a prescribed speed.
#[derive(Debug, Clone)]
pub struct SpeedRule {
    prefix_a0: BigInt,
    prefix: Vec<BigInt>,
    psi: SpeedFunction,
    strategy: SpeedStrategy,
}

impl SpeedRule {
    pub fn psi(&self) -> &SpeedFunction {
        &self.psi
    }

    pub fn strategy(&self) -> SpeedStrategy {
        self.strategy
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }
}

impl CoefficientRule for SpeedRule {
    fn name(&self) -> &str {
        "speed"
    }

    fn params(&self) -> Vec<String> {
        let mut v = vec![
            self.psi.c.to_string(),
            self.psi.e.to_string(),
            match self.strategy {
                SpeedStrategy::Minimal => "min".to_string(),
                SpeedStrategy::Randomized { seed } => format!("seed={seed}"),
            },
            self.prefix_a0.to_string(),
        ];
        v.extend(self.prefix.iter().map(|a| a.to_string()));
        v
    }

    fn default_a0(&self) -> BigInt {
        self.prefix_a0.clone()
    }

    fn coefficient(&self, n: usize, history: &[BigInt]) -> BigInt {
        if n <= self.prefix.len() {
            return self.prefix[n - 1].clone();
        }
        // q_{n-1} from a_1 .. a_{n-1}
        let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
        for a in history {
            let next = a * &q + &q_prev;
            q_prev = std::mem::replace(&mut q, next);
        }
        let base = self.psi.threshold(&q);
        match self.strategy {
            SpeedStrategy::Minimal => base,
            SpeedStrategy::Randomized { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(n as u64);
                base + BigInt::from(rng.random_range(0..=RANDOM_OFFSET_MAX))
            }
        }
    }
}

/// Extends a rational prefix `[a_0; a_1, ..., a_k]` with
/// `a_{n+1} >= 1/(q_n^2 psi(q_n))` for every `n >= k`, so that
/// `|alpha - p_n/q_n| < 1/(a_{n+1} q_n^2) <= psi(q_n)`.
pub fn construct_at_speed(
    prefix: &ContinuedFraction,
    psi: &SpeedFunction,
    strategy: SpeedStrategy,
) -> Result<ContinuedFraction> {
    if !prefix.is_rational() {
        return Err(Error::invalid("prefix must be a finite expansion"));
    }
    let coeffs = prefix.coefficients(usize::MAX - 1)?;
    let rule = SpeedRule {
        prefix_a0: coeffs[0].clone(),
        prefix: coeffs[1..].to_vec(),
        psi: psi.clone(),
        strategy,
    };
    Ok(ContinuedFraction::from_rule(coeffs[0].clone(), Arc::new(rule)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergents::ConvergentTable;
    use crate::exactnum::{cf_from_rational, evaluate_enclosure, DEFAULT_MAX_REFINEMENTS};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_examples() {
        let g = golden_ratio();
        assert_eq!(g.coefficient(100).unwrap(), Some(BigInt::one()));
        let mut t = ConvergentTable::new(g.clone());
        t.extend(10).unwrap();
        // Fibonacci oracle
        let (mut a, mut b) = (0u64, 1u64);
        for _ in 0..11 {
            (a, b) = (b, a + b);
        }
        assert_eq!(a, 89);
        assert_eq!(t.get(10).unwrap().q, BigInt::from(a));
        let w = evaluate_enclosure(&g, 30).unwrap().width();
        assert!(w < BigRational::new(1.into(), BigInt::from(10).pow(12)));
    }

    #[test]
    fn euler_examples() {
        let e = euler_pattern();
        assert_eq!(e.coefficients(9).unwrap(), ints(&[2, 1, 2, 1, 1, 4, 1, 1, 6, 1]));
        assert_eq!(e.coefficient(14).unwrap(), Some(BigInt::from(10)));
        let listed = ints(&[2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8, 1, 1, 10, 1, 1, 12, 1]);
        assert_eq!(e.coefficients(18).unwrap(), listed);
        // e from its Taylor series, sum 1/k! for k <= 30, error < 1e-30
        let mut sum = BigRational::zero();
        let mut fact = BigInt::one();
        for k in 0..=30u32 {
            if k > 0 {
                fact *= k;
            }
            sum += BigRational::new(BigInt::one(), fact.clone());
        }
        let enc = evaluate_enclosure(&e, 20).unwrap();
        let tol = BigRational::new(1.into(), BigInt::from(10).pow(9));
        assert!(enc.lo() - &tol <= sum && sum <= enc.hi() + &tol);
        let approx = BigRational::new(2718281828i64.into(), 1_000_000_000i64.into());
        assert!(enc.lo() > &(&approx - &tol) && enc.hi() < &(&approx + &tol * BigRational::from_integer(2.into())));
    }

    #[test]
    fn liouville_examples() {
        let l = liouville_factorial(10).unwrap();
        assert_eq!(l.coefficient(2).unwrap(), Some(BigInt::from(100)));
        assert_eq!(l.coefficient(4).unwrap(), Some(BigInt::from(10).pow(24)));
        let mut t = ConvergentTable::new(l);
        t.extend(3).unwrap();
        assert!(t.get(3).unwrap().q.to_string().len() > 6);
        assert!(liouville_factorial(1).is_err());
    }

    #[test]
    fn surd_examples() {
        let s2 = quadratic_surd(&0.into(), &2.into(), &1.into()).unwrap();
        assert_eq!(s2.coefficients(6).unwrap(), ints(&[1, 2, 2, 2, 2, 2, 2]));
        match s2.stream() {
            crate::exactnum::CoefficientStream::EventuallyPeriodic { preperiod, period } => {
                assert!(preperiod.is_empty());
                assert_eq!(period, &ints(&[2]));
            }
            other => panic!("unexpected stream {other:?}"),
        }
        let g = quadratic_surd(&1.into(), &5.into(), &2.into()).unwrap();
        assert_eq!(g.coefficients(20).unwrap(), golden_ratio().coefficients(20).unwrap());
        assert!(matches!(
            quadratic_surd(&0.into(), &9.into(), &1.into()),
            Err(Error::NotIrrational(_))
        ));
    }

    #[test]
    fn surd_needing_normalization() {
        // (1 + sqrt 3)/3: 3 does not divide 3 - 1
        let s = quadratic_surd(&1.into(), &3.into(), &3.into()).unwrap();
        let sqrt3 = crate::exactnum::SqrtEnclosure::new(3.into()).unwrap();
        let x = ContinuedFraction::from_enclosure(Arc::new(sqrt3), DEFAULT_MAX_REFINEMENTS).unwrap();
        let enc = evaluate_enclosure(&x, 40).unwrap();
        let shift = |v: &BigRational| (v + BigRational::one()) / BigRational::from_integer(3.into());
        let a = cf_from_rational(&shift(enc.lo())).coefficients(20).unwrap();
        let b = cf_from_rational(&shift(enc.hi())).coefficients(20).unwrap();
        let common = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
        assert!(common >= 10, "{common}");
        let got = s.coefficients(common - 2).unwrap();
        assert_eq!(&a[..common - 1], &got[..]);
        // negative denominator
        let neg = quadratic_surd(&(-1).into(), &5.into(), &(-2).into()).unwrap();
        // (-1 + sqrt5)/(-2) = (1 - sqrt 5)/2 ~ -0.618
        assert_eq!(neg.coefficients(5).unwrap(), ints(&[-1, 2, 1, 1, 1, 1]));
    }

    #[test]
    fn speed_function_comparisons() {
        let psi = SpeedFunction::new(BigRational::one(), BigRational::new(5.into(), 2.into())).unwrap();
        // psi(4) = 4^(-5/2) = 1/32
        assert_eq!(psi.compare(&BigRational::new(1.into(), 32.into()), &4.into()), Ordering::Equal);
        assert_eq!(psi.enclosure(&4.into()), Interval::point(BigRational::new(1.into(), 32.into())));
        // psi(2) = 2^(-5/2) ~ 0.17678
        let enc = psi.enclosure(&2.into());
        assert!(enc.lo() > &BigRational::new(17677.into(), 100000.into()));
        assert!(enc.hi() < &BigRational::new(17678.into(), 100000.into()));
        assert_eq!(psi.compare(&BigRational::new(17677.into(), 100000.into()), &2.into()), Ordering::Less);
        assert_eq!(psi.compare(&BigRational::new(17678.into(), 100000.into()), &2.into()), Ordering::Greater);
        // threshold = ceil(q^(1/2)): q = 10 -> 4
        assert_eq!(psi.threshold(&10.into()), BigInt::from(4));
        assert_eq!(psi.threshold(&9.into()), BigInt::from(3));
        assert!(SpeedFunction::power(1).is_err());
    }

    #[test]
    fn construct_minimal_cubic_speed() {
        let prefix = ContinuedFraction::finite(0.into(), ints(&[1])).unwrap();
        let psi = SpeedFunction::power(3).unwrap();
        let x = construct_at_speed(&prefix, &psi, SpeedStrategy::Minimal).unwrap();
        let mut t = ConvergentTable::new(x.clone());
        t.extend(12).unwrap();
        for n in 1..=10 {
            assert_eq!(t.coefficient(n + 1).unwrap(), &t.get(n).unwrap().q);
            let (_, upper) = t.error_bounds(n).unwrap();
            assert_eq!(psi.compare(&upper, &t.get(n).unwrap().q), Ordering::Less);
        }
    }

    #[test]
    fn construct_quadratic_speed_is_all_ones() {
        let prefix = ContinuedFraction::finite(0.into(), ints(&[1])).unwrap();
        let x = construct_at_speed(&prefix, &SpeedFunction::power(2).unwrap(), SpeedStrategy::Minimal).unwrap();
        assert!(x.coefficients(30).unwrap()[1..].iter().all(|a| a.is_one()));
    }

    #[test]
    fn seeds_give_distinct_numbers() {
        let prefix = ContinuedFraction::finite(0.into(), ints(&[1])).unwrap();
        let psi = SpeedFunction::power(3).unwrap();
        let a = construct_at_speed(&prefix, &psi, SpeedStrategy::Randomized { seed: 1 }).unwrap();
        let b = construct_at_speed(&prefix, &psi, SpeedStrategy::Randomized { seed: 2 }).unwrap();
        assert_ne!(a.coefficients(8).unwrap(), b.coefficients(8).unwrap());
        for x in [a, b] {
            let mut t = ConvergentTable::new(x);
            for n in 1..=8 {
                let (_, upper) = t.error_bounds(n).unwrap();
                assert_eq!(psi.compare(&upper, &t.get(n).unwrap().q.clone()), Ordering::Less);
            }
        }
    }
}
