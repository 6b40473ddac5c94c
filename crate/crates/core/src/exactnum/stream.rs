use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enclosure::{certified_prefix, EnclosureOracle};
use crate::error::{Error, Result};

/// Refinements attempted per coefficient request before giving up.
pub const DEFAULT_MAX_REFINEMENTS: u32 = 64;

/// A named closed-form (or recursively defined) rule `n -> a_n`.
pub trait CoefficientRule: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Parameters as they appear inside `rule:<name>(...)`.
    fn params(&self) -> Vec<String>;

    /// `a_n` for `n >= 1`. `history` holds `a_1 .. a_{n-1}`.
    fn coefficient(&self, n: usize, history: &[BigInt]) -> BigInt;

    /// Integer part of the number this rule names.
    fn default_a0(&self) -> BigInt {
        BigInt::zero()
    }

    /// A verified bound on `a_m` for every `m > n`, when one exists.
    fn bound_beyond(&self, _n: usize) -> Option<BigInt> {
        None
    }
}

/// `e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`: `a_{3k+2} = 2(k+1)`, otherwise 1.
#[derive(Debug, Clone, Copy)]
pub struct EulerRule;

impl CoefficientRule for EulerRule {
    fn name(&self) -> &str {
        "euler"
    }

    fn params(&self) -> Vec<String> {
        Vec::new()
    }

    fn default_a0(&self) -> BigInt {
        BigInt::from(2)
    }

    fn coefficient(&self, n: usize, _history: &[BigInt]) -> BigInt {
        if n % 3 == 2 {
            BigInt::from(2 * ((n - 2) / 3 + 1))
        } else {
            BigInt::one()
        }
    }
}

/// `a_n = base^(n!)`.
#[derive(Debug, Clone)]
pub struct LiouvilleRule {
    base: BigInt,
}

impl LiouvilleRule {
    pub fn new(base: BigInt) -> Result<Self> {
        if base < BigInt::from(2) {
            return Err(Error::invalid("liouville base must be >= 2"));
        }
        Ok(Self { base })
    }
}

impl CoefficientRule for LiouvilleRule {
    fn name(&self) -> &str {
        "liouville"
    }

    fn params(&self) -> Vec<String> {
        vec![self.base.to_string()]
    }

    fn coefficient(&self, n: usize, _history: &[BigInt]) -> BigInt {
        let fact: usize = (1..=n).product();
        num_traits::pow(self.base.clone(), fact)
    }
}

/// `a_n = first + (n - 1) * step`.
#[derive(Debug, Clone)]
pub struct ArithmeticRule {
    first: BigInt,
    step: BigInt,
}

impl ArithmeticRule {
    pub fn new(first: BigInt, step: BigInt) -> Result<Self> {
        if first < BigInt::one() || step.is_negative() {
            return Err(Error::invalid(
                "arithmetic rule needs first >= 1 and step >= 0",
            ));
        }
        Ok(Self { first, step })
    }
}

impl CoefficientRule for ArithmeticRule {
    fn name(&self) -> &str {
        "arith"
    }

    fn params(&self) -> Vec<String> {
        vec![self.first.to_string(), self.step.to_string()]
    }

    fn coefficient(&self, n: usize, _history: &[BigInt]) -> BigInt {
        &self.first + &self.step * BigInt::from(n - 1)
    }

    fn bound_beyond(&self, _n: usize) -> Option<BigInt> {
        (self.step == BigInt::from(0)).then(|| self.first.clone())
    }
}

/// Pseudo-random coefficients uniform on `1..=max`, a pure function of
/// `(seed, n)`.
#[derive(Debug, Clone, Copy)]
pub struct RandomRule {
    seed: u64,
    max: u64,
}

impl RandomRule {
    pub fn new(seed: u64, max: u64) -> Result<Self> {
        if max == 0 {
            return Err(Error::invalid("random rule needs max >= 1"));
        }
        Ok(Self { seed, max })
    }
}

impl CoefficientRule for RandomRule {
    fn name(&self) -> &str {
        "random"
    }

    fn params(&self) -> Vec<String> {
        vec![self.seed.to_string(), self.max.to_string()]
    }

    fn coefficient(&self, n: usize, _history: &[BigInt]) -> BigInt {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n as u64);
        BigInt::from(rng.random_range(1..=self.max))
    }

    fn bound_beyond(&self, _n: usize) -> Option<BigInt> {
        Some(BigInt::from(self.max))
    }
}

/// Lazy source of partial quotients `a_1, a_2, ...`.
///
/// Index 0 of the stream is unused for every variant except
/// `CertifiedReal`, whose enclosure also determines the integer part.
pub enum CoefficientStream {
    Finite(Vec<BigInt>),
    EventuallyPeriodic {
        preperiod: Vec<BigInt>,
        period: Vec<BigInt>,
    },
    Rule(RuleStream),
    CertifiedReal(CertifiedStream),
}

pub struct RuleStream {
    rule: Arc<dyn CoefficientRule>,
    // memo[i] = a_{i+1}
    memo: Mutex<Vec<BigInt>>,
}

pub struct CertifiedStream {
    oracle: Arc<dyn EnclosureOracle>,
    max_refinements: u32,
    state: Mutex<CertifiedState>,
}

struct CertifiedState {
    level: u32,
    // coefficients a_0, a_1, ... certified so far
    certified: Vec<BigInt>,
    stalled: bool,
}

impl RuleStream {
    pub fn rule(&self) -> &Arc<dyn CoefficientRule> {
        &self.rule
    }

    fn get(&self, n: usize) -> Result<BigInt> {
        debug_assert!(n >= 1);
        let mut memo = self.memo.lock().expect("memo lock poisoned");
        while memo.len() < n {
            let idx = memo.len() + 1;
            let a = self.rule.coefficient(idx, &memo);
            if a < BigInt::one() {
                return Err(Error::InvalidCoefficient { index: idx, value: a });
            }
            memo.push(a);
        }
        Ok(memo[n - 1].clone())
    }
}

impl CertifiedStream {
    pub fn oracle(&self) -> &Arc<dyn EnclosureOracle> {
        &self.oracle
    }

    /// Deepest certified index so far, if any.
    pub fn certified_upto(&self) -> Option<usize> {
        let st = self.state.lock().expect("state lock poisoned");
        st.certified.len().checked_sub(1)
    }

    fn get(&self, n: usize) -> Result<BigInt> {
        let mut st = self.state.lock().expect("state lock poisoned");
        if n < st.certified.len() {
            return Ok(st.certified[n].clone());
        }
        // certified already holds everything the current level determines
        let mut width = self.oracle.enclosure(st.level).width();
        for _ in 0..self.max_refinements {
            if st.stalled {
                break;
            }
            // roughly double the precision each time, so the prefix is
            // recomputed O(log) times overall
            let next = st.level.saturating_add(st.level.clamp(1, 1 << 12));
            let enc = self.oracle.enclosure(next);
            let w = enc.width();
            if w.is_zero() {
                // exact point: the number is rational and expands completely
                st.certified = certified_prefix(&enc, usize::MAX);
                st.level = next;
                break;
            }
            if &w + &w > width {
                st.stalled = true;
                break;
            }
            width = w;
            st.level = next;
            let prefix = certified_prefix(&enc, usize::MAX);
            if prefix.len() > st.certified.len() {
                st.certified = prefix;
            }
            if n < st.certified.len() {
                return Ok(st.certified[n].clone());
            }
        }
        if n < st.certified.len() {
            return Ok(st.certified[n].clone());
        }
        Err(Error::PrecisionExhausted {
            certified_upto: st.certified.len().checked_sub(1),
        })
    }
}

impl CoefficientStream {
    pub fn finite(coefficients: Vec<BigInt>) -> Result<Self> {
        validate(&coefficients, 1)?;
        Ok(Self::Finite(coefficients))
    }

    pub fn periodic(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("period must be nonempty"));
        }
        validate(&preperiod, 1)?;
        validate(&period, preperiod.len() + 1)?;
        Ok(Self::EventuallyPeriodic { preperiod, period })
    }

    pub fn rule(rule: Arc<dyn CoefficientRule>) -> Self {
        Self::Rule(RuleStream {
            rule,
            memo: Mutex::new(Vec::new()),
        })
    }

    pub fn certified(oracle: Arc<dyn EnclosureOracle>, max_refinements: u32) -> Self {
        let initial = certified_prefix(&oracle.enclosure(0), usize::MAX);
        Self::CertifiedReal(CertifiedStream {
            oracle,
            max_refinements,
            state: Mutex::new(CertifiedState {
                level: 0,
                certified: initial,
                stalled: false,
            }),
        })
    }

    /// `a_n`, or `None` past the end of a finite stream.
    ///
    /// For every variant except `CertifiedReal`, `n` must be at least 1.
    pub fn get(&self, n: usize) -> Result<Option<BigInt>> {
        match self {
            Self::Finite(c) => Ok(n.checked_sub(1).and_then(|i| c.get(i)).cloned()),
            Self::EventuallyPeriodic { preperiod, period } => {
                let i = n - 1;
                Ok(Some(if i < preperiod.len() {
                    preperiod[i].clone()
                } else {
                    period[(i - preperiod.len()) % period.len()].clone()
                }))
            }
            Self::Rule(r) => r.get(n).map(Some),
            Self::CertifiedReal(c) => match c.get(n) {
                Ok(v) => Ok(Some(v)),
                Err(e) => {
                    // a rational point enclosure terminates instead of exhausting
                    if c.is_complete() {
                        Ok(None)
                    } else {
                        Err(e)
                    }
                }
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Verified bound on every `a_m`, `m > n`.
    pub fn bound_beyond(&self, n: usize) -> Option<BigInt> {
        match self {
            Self::Finite(c) => Some(c.iter().skip(n).max().cloned().unwrap_or_else(BigInt::one)),
            Self::EventuallyPeriodic { preperiod, period } => {
                preperiod.iter().skip(n).chain(period.iter()).max().cloned()
            }
            Self::Rule(r) => r.rule.bound_beyond(n),
            Self::CertifiedReal(_) => None,
        }
    }
}

impl CertifiedStream {
    fn is_complete(&self) -> bool {
        let st = self.state.lock().expect("state lock poisoned");
        self.oracle.enclosure(st.level).is_point()
    }
}

impl fmt::Debug for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(c) => f.debug_tuple("Finite").field(c).finish(),
            Self::EventuallyPeriodic { preperiod, period } => f
                .debug_struct("EventuallyPeriodic")
                .field("preperiod", preperiod)
                .field("period", period)
                .finish(),
            Self::Rule(r) => f.debug_tuple("Rule").field(&r.rule).finish(),
            Self::CertifiedReal(c) => f.debug_tuple("CertifiedReal").field(&c.oracle).finish(),
        }
    }
}

fn validate(coefficients: &[BigInt], first_index: usize) -> Result<()> {
    for (i, a) in coefficients.iter().enumerate() {
        if a < &BigInt::one() {
            return Err(Error::InvalidCoefficient {
                index: first_index + i,
                value: a.clone(),
            });
        }
    }
    Ok(())
}
