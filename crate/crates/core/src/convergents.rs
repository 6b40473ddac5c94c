//! Convergent tables `p_n / q_n` and the exact approximation-error bounds.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{evaluate_enclosure, ContinuedFraction, Interval};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// Append-only table of convergents, seeded with `(p_{-1}, q_{-1}) = (1, 0)`.
#[derive(Debug, Clone)]
pub struct ConvergentTable {
    source: ContinuedFraction,
    coefficients: Vec<BigInt>,
    entries: Vec<Convergent>,
    terminated: bool,
}

const RATIONAL_BOUNDS: &str = "bounds undefined for terminating expansion";

impl ConvergentTable {
    /// Table holding the single entry `(a_0, 1)`.
    pub fn new(source: ContinuedFraction) -> Self {
        let a0 = source.a0().clone();
        Self {
            source,
            entries: vec![Convergent {
                n: 0,
                p: a0.clone(),
                q: BigInt::one(),
            }],
            coefficients: vec![a0],
            terminated: false,
        }
    }

    pub fn source(&self) -> &ContinuedFraction {
        &self.source
    }

    pub fn entries(&self) -> &[Convergent] {
        &self.entries
    }

    pub fn last_index(&self) -> usize {
        self.entries.len() - 1
    }

    /// True once a terminating expansion has been read to its end.
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn get(&self, n: usize) -> Option<&Convergent> {
        self.entries.get(n)
    }

    /// `a_n`, if already read.
    pub fn coefficient(&self, n: usize) -> Option<&BigInt> {
        self.coefficients.get(n)
    }

    /// Populates entries `0 ..= upto`; stops quietly at the end of a
    /// terminating expansion.
    pub fn extend(&mut self, upto: usize) -> Result<&mut Self> {
        while self.last_index() < upto && !self.terminated {
            let n = self.entries.len();
            let Some(a) = self.source.coefficient(n)? else {
                self.terminated = true;
                break;
            };
            let (p1, q1) = self.pair(n - 1);
            let (p2, q2) = self.pair_before(n - 1);
            let p = &a * p1 + p2;
            let q = &a * q1 + q2;
            self.coefficients.push(a);
            self.entries.push(Convergent { n, p, q });
        }
        Ok(self)
    }

    /// Extends through `n`, failing if the expansion ends first.
    pub fn require(&mut self, n: usize) -> Result<()> {
        self.extend(n)?;
        if self.last_index() < n {
            return Err(Error::EndOfStream {
                index: self.last_index() + 1,
            });
        }
        Ok(())
    }

    fn pair(&self, n: usize) -> (&BigInt, &BigInt) {
        let c = &self.entries[n];
        (&c.p, &c.q)
    }

    // entry n - 1, or the seeded pair when n == 0
    fn pair_before(&self, n: usize) -> (BigInt, BigInt) {
        match n.checked_sub(1) {
            Some(m) => (self.entries[m].p.clone(), self.entries[m].q.clone()),
            None => (BigInt::one(), BigInt::zero()),
        }
    }

    /// `q_n p_{n-1} - p_n q_{n-1}`, which always equals `(-1)^n`.
    pub fn determinant_check(&self, n: usize) -> Result<BigInt> {
        if n > self.last_index() {
            return Err(Error::IndexOutOfRange {
                index: n,
                populated: Some(self.last_index()),
            });
        }
        let (p, q) = self.pair(n);
        let (pp, qp) = self.pair_before(n);
        Ok(q * pp - p * qp)
    }

    fn require_irrational(&mut self, n: usize) -> Result<()> {
        if self.source.is_rational() {
            return Err(Error::RationalSource(RATIONAL_BOUNDS));
        }
        self.extend(n)?;
        if self.last_index() < n {
            return Err(Error::RationalSource(RATIONAL_BOUNDS));
        }
        Ok(())
    }

    /// `(1/(q_n (q_n + q_{n+1})), 1/(q_n q_{n+1}))`, the closed bounds on
    /// `|alpha - p_n/q_n|`.
    pub fn error_bounds(&mut self, n: usize) -> Result<(BigRational, BigRational)> {
        self.require_irrational(n + 1)?;
        let q = &self.entries[n].q;
        let q1 = &self.entries[n + 1].q;
        Ok((
            BigRational::new(BigInt::one(), q * (q + q1)),
            BigRational::new(BigInt::one(), q * q1),
        ))
    }

    /// `((1/3)/(a_{n+1} q_n^2), 1/(a_{n+1} q_n^2))`; the error lies strictly
    /// inside for `n >= 1`.
    pub fn coefficient_sandwich(&mut self, n: usize) -> Result<(BigRational, BigRational)> {
        self.require_irrational(n + 1)?;
        let q = &self.entries[n].q;
        let a = &self.coefficients[n + 1];
        let base = a * q * q;
        Ok((
            BigRational::new(BigInt::one(), &base * 3),
            BigRational::new(BigInt::one(), base),
        ))
    }

    /// Enclosure of `|alpha - p_n/q_n|` read off the convergents of order
    /// `n + extra - 1` and `n + extra` (`extra >= 2`), which both lie on the
    /// same side of `p_n/q_n` as `alpha`.
    pub fn certified_error(&mut self, n: usize, extra: usize) -> Result<Interval> {
        if extra < 2 {
            return Err(Error::invalid("certified_error needs extra >= 2"));
        }
        self.require_irrational(n + extra)?;
        let c = self.entries[n].value();
        let a = self.entries[n + extra - 1].value() - &c;
        let b = self.entries[n + extra].value() - &c;
        Ok(Interval::spanning(a.abs(), b.abs()))
    }

    /// Tab-separated `n, a_n, p_n, q_n` rows in full decimal.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (c, a) in self.entries.iter().zip(&self.coefficients) {
            writeln!(out, "{}\t{}\t{}\t{}", c.n, a, c.p, c.q).expect("write to string");
        }
        out
    }
}

/// Enclosure of `min_p |alpha - p/q|` from the enclosure at `depth`.
///
/// The distance to the grid `Z/q` is a tent function; its range over the
/// enclosure is read from the endpoints unless a grid point or a midpoint
/// between grid points falls inside.
pub fn best_approx_error(cf: &ContinuedFraction, q: &BigInt, depth: usize) -> Result<Interval> {
    if q < &BigInt::one() {
        return Err(Error::invalid("denominator must be >= 1"));
    }
    let enc = evaluate_enclosure(cf, depth)?;
    let q2 = q * q;
    if enc.width() * BigRational::from_integer(q2 * 2) >= BigRational::one() {
        return Err(Error::EnclosureTooWide { q: q.clone() });
    }
    let qr = BigRational::from_integer(q.clone());
    let dist = |x: &BigRational| -> BigRational {
        let xq = x * &qr;
        let p = xq.round();
        ((xq - p) / &qr).abs()
    };
    let (dl, dh) = (dist(enc.lo()), dist(enc.hi()));
    let mut lo = if dl <= dh { dl.clone() } else { dh.clone() };
    let mut hi = if dl >= dh { dl } else { dh };
    let lo_q = enc.lo() * &qr;
    let hi_q = enc.hi() * &qr;
    // grid point k with lo*q <= k <= hi*q
    if lo_q.ceil() <= hi_q {
        lo = BigRational::zero();
    }
    // midpoint k + 1/2 inside
    let half = BigRational::new(1.into(), 2.into());
    if (&lo_q - &half).ceil() <= &hi_q - &half {
        hi = BigRational::new(BigInt::one(), q * 2);
    }
    Ok(Interval::spanning(lo, hi))
}

/// Streams `(n, a_n, q_n)` without keeping earlier convergents.
pub struct Denominators<'a> {
    source: &'a ContinuedFraction,
    n: usize,
    q_prev: BigInt,
    q: BigInt,
    done: bool,
}

impl<'a> Denominators<'a> {
    pub fn new(source: &'a ContinuedFraction) -> Self {
        Self {
            source,
            n: 0,
            q_prev: BigInt::zero(),
            q: BigInt::one(),
            done: false,
        }
    }
}

impl Iterator for Denominators<'_> {
    type Item = Result<(usize, BigInt, BigInt)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.n == 0 {
            self.n = 1;
            return Some(Ok((0, self.source.a0().clone(), BigInt::one())));
        }
        let n = self.n;
        match self.source.coefficient(n) {
            Ok(Some(a)) => {
                let q = &a * &self.q + &self.q_prev;
                self.q_prev = std::mem::replace(&mut self.q, q.clone());
                self.n += 1;
                Some(Ok((n, a, q)))
            }
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// `gcd(p, q) == 1`, used by tests and the brute-force searches.
pub fn is_reduced(p: &BigInt, q: &BigInt) -> bool {
    p.gcd(q).is_one()
}
