use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{ilog2_rat, rat_to_f64, round_down, round_up, Rational, RationalJson};

/// Certified rational enclosure `[lo, hi]` of a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "RatInterval requires lo <= hi");
        RatInterval { lo, hi }
    }

    /// Builds the enclosure of two bracketing values given in either order.
    pub fn spanning(a: Rational, b: Rational) -> Self {
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection of two enclosures of the same value; refinement only shrinks.
    pub fn intersect(&self, other: &RatInterval) -> Option<RatInterval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| RatInterval::new(lo.clone(), hi.clone()))
    }

    /// Ordering of the enclosed value against `x`, or `None` when `x` lies in
    /// the enclosure and the sign cannot be certified.
    pub fn cmp_rational(&self, x: &Rational) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified ordering between two enclosed values.
    pub fn cmp_interval(&self, other: &RatInterval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }

    pub fn scale(&self, k: &Rational) -> RatInterval {
        RatInterval::spanning(&self.lo * k, &self.hi * k)
    }

    pub fn shift(&self, k: &Rational) -> RatInterval {
        RatInterval::new(&self.lo + k, &self.hi + k)
    }

    /// Quotient; `None` if the divisor enclosure touches zero.
    pub fn div(&self, other: &RatInterval) -> Option<RatInterval> {
        if other.lo <= Rational::zero() && other.hi >= Rational::zero() {
            return None;
        }
        let c = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Some(RatInterval::new(lo, hi))
    }

    /// Rounds the endpoints outward onto a dyadic grid carrying about
    /// `rel_bits` significant bits of the larger endpoint. Keeps long products
    /// of enclosures from growing unbounded denominators.
    pub fn round_outward(&self, rel_bits: u64) -> RatInterval {
        let mag = if self.lo.abs() > self.hi.abs() { self.lo.abs() } else { self.hi.abs() };
        if mag.is_zero() {
            return self.clone();
        }
        let frac_bits = rel_bits as i64 - ilog2_rat(&mag);
        RatInterval {
            lo: round_down(&self.lo, frac_bits),
            hi: round_up(&self.hi, frac_bits),
        }
    }

    pub fn to_f64_mid(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatIntervalJson {
    pub lo: RationalJson,
    pub hi: RationalJson,
}

impl From<&RatInterval> for RatIntervalJson {
    fn from(iv: &RatInterval) -> Self {
        RatIntervalJson {
            lo: iv.lo().into(),
            hi: iv.hi().into(),
        }
    }
}

impl RatIntervalJson {
    pub fn to_interval(&self) -> Option<RatInterval> {
        let lo = self.lo.to_rational()?;
        let hi = self.hi.to_rational()?;
        (lo <= hi).then(|| RatInterval::new(lo, hi))
    }
}
