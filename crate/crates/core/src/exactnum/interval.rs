use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    /// Builds the interval spanned by two endpoints in either order.
    pub fn spanning(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when `self` is contained in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// True when `self` lies in the open interval `(lo, hi)`.
    pub fn strictly_inside(&self, lo: &BigRational, hi: &BigRational) -> bool {
        lo < &self.lo && &self.hi < hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        })
    }

    /// Image of the interval under `x -> x - c`.
    pub fn shift(&self, c: &BigRational) -> Interval {
        Interval {
            lo: &self.lo - c,
            hi: &self.hi - c,
        }
    }

    /// Exact image under `x -> |x|`.
    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Interval {
                lo: -&self.hi,
                hi: -&self.lo,
            }
        } else {
            let hi = if -&self.lo > self.hi {
                -&self.lo
            } else {
                self.hi.clone()
            };
            Interval {
                lo: BigRational::zero(),
                hi,
            }
        }
    }

    /// Multiplication by a non-negative interval, for non-negative `self`.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        Interval::spanning(&self.lo * c, &self.hi * c)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
