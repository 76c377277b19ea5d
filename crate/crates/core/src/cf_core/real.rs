use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use super::interval::RatInterval;
use super::quadratic::QuadraticReal;
use super::rational::{pow2_neg, rat_to_f64, Rational};

/// Relative precision used when an exact quadratic value must be mixed with an
/// enclosure, or with a value from a different quadratic field.
pub const MIXING_BITS: u64 = 256;

/// A real number known either exactly (quadratic field element) or through a
/// certified rational enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(QuadraticReal),
    Approx(RatInterval),
}

impl Real {
    pub fn rational(x: Rational) -> Real {
        Real::Exact(QuadraticReal::from_rational(&x))
    }

    pub fn zero() -> Real {
        Real::rational(Rational::zero())
    }

    pub fn one() -> Real {
        Real::rational(Rational::from_integer(1.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&QuadraticReal> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    /// Enclosure of absolute width at most `2^-abs_bits` for exact values; an
    /// approximate value returns its stored enclosure.
    pub fn enclose(&self, abs_bits: u64) -> RatInterval {
        match self {
            Real::Exact(q) => q.enclose(abs_bits),
            Real::Approx(iv) => iv.clone(),
        }
    }

    pub fn enclose_rel(&self, rel_bits: u64) -> RatInterval {
        match self {
            Real::Exact(q) => q.enclose_rel(rel_bits),
            Real::Approx(iv) => iv.clone(),
        }
    }

    /// Width of the uncertainty; zero for exact values.
    pub fn width(&self) -> Rational {
        match self {
            Real::Exact(_) => Rational::zero(),
            Real::Approx(iv) => iv.width(),
        }
    }

    /// Certified lower bound.
    pub fn lower(&self) -> Rational {
        self.enclose_rel(MIXING_BITS).lo().clone()
    }

    /// Certified upper bound.
    pub fn upper(&self) -> Rational {
        self.enclose_rel(MIXING_BITS).hi().clone()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(iv) => rat_to_f64(&iv.midpoint()),
        }
    }

    /// Certified ordering against a rational; `None` when an enclosure
    /// contains `x`.
    pub fn cmp_rational(&self, x: &Rational) -> Option<Ordering> {
        match self {
            Real::Exact(q) => Some(q.cmp_rational(x)),
            Real::Approx(iv) => iv.cmp_rational(x),
        }
    }

    /// Certified ordering between two reals; `None` when enclosures overlap.
    pub fn cmp_real(&self, other: &Real) -> Option<Ordering> {
        if let (Real::Exact(a), Real::Exact(b)) = (self, other) {
            if let Some(o) = a.checked_cmp(b) {
                return Some(o);
            }
        }
        let mut bits = 64;
        loop {
            let a = self.enclose_rel(bits);
            let b = other.enclose_rel(bits);
            if let Some(o) = a.cmp_interval(&b) {
                return Some(o);
            }
            // only exact operands can be refined further
            if bits >= 4096 || (!self.is_exact() && !other.is_exact()) {
                return None;
            }
            bits *= 4;
        }
    }

    fn binary(
        &self,
        other: &Real,
        exact: impl Fn(&QuadraticReal, &QuadraticReal) -> Option<QuadraticReal>,
        approx: impl Fn(&RatInterval, &RatInterval) -> Option<RatInterval>,
    ) -> Option<Real> {
        if let (Real::Exact(a), Real::Exact(b)) = (self, other) {
            if let Some(v) = exact(a, b) {
                return Some(Real::Exact(v));
            }
        }
        let a = self.enclose_rel(MIXING_BITS);
        let b = other.enclose_rel(MIXING_BITS);
        approx(&a, &b).map(Real::Approx)
    }

    pub fn add(&self, other: &Real) -> Real {
        self.binary(other, |a, b| a.checked_add(b), |a, b| Some(a.add(b))).unwrap()
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.binary(other, |a, b| a.checked_add(&-b), |a, b| Some(a.sub(b))).unwrap()
    }

    pub fn mul(&self, other: &Real) -> Real {
        self.binary(other, |a, b| a.checked_mul(b), |a, b| Some(a.mul(b))).unwrap()
    }

    /// Quotient; `None` if the divisor is zero or its enclosure touches zero.
    pub fn div(&self, other: &Real) -> Option<Real> {
        self.binary(other, |a, b| a.checked_div(b), |a, b| a.div(b))
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(iv) => Real::Approx(iv.neg()),
        }
    }

    pub fn mul_rational(&self, k: &Rational) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.mul_rational(k)),
            Real::Approx(iv) => Real::Approx(iv.scale(k)),
        }
    }

    pub fn add_rational(&self, k: &Rational) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.add_rational(k)),
            Real::Approx(iv) => Real::Approx(iv.shift(k)),
        }
    }

    /// Outward-rounds an enclosure to about `rel_bits` significant bits.
    /// Exact values are unchanged.
    pub fn rounded(self, rel_bits: u64) -> Real {
        match self {
            Real::Approx(iv) => Real::Approx(iv.round_outward(rel_bits)),
            exact => exact,
        }
    }

    /// Whether an approximate value's enclosure is no wider than `2^-bits`
    /// times its magnitude. Exact values always qualify.
    pub fn is_tight(&self, rel_bits: u64) -> bool {
        match self {
            Real::Exact(_) => true,
            Real::Approx(iv) => {
                let mag = if iv.lo().is_zero() { iv.hi().clone() } else { iv.lo().clone() };
                let mag = if mag < Rational::zero() { -mag } else { mag };
                iv.width() <= mag * pow2_neg(rel_bits)
            }
        }
    }
}

impl From<QuadraticReal> for Real {
    fn from(q: QuadraticReal) -> Real {
        Real::Exact(q)
    }
}

impl From<RatInterval> for Real {
    fn from(iv: RatInterval) -> Real {
        if iv.is_point() {
            Real::rational(iv.lo().clone())
        } else {
            Real::Approx(iv)
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(iv) => write!(f, "~{:.17e} ± {:.1e}", iv.to_f64_mid(), rat_to_f64(&iv.width()) / 2.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::rational::rat;

    #[test]
    fn exact_stays_exact() {
        let s2 = Real::Exact(QuadraticReal::sqrt_int(2));
        let x = s2.mul(&s2).sub(&Real::rational(rat(2, 1)));
        assert_eq!(x, Real::zero());
        assert!(x.is_exact());
    }

    #[test]
    fn mixed_fields_fall_back_to_enclosures() {
        let s2 = Real::Exact(QuadraticReal::sqrt_int(2));
        let s3 = Real::Exact(QuadraticReal::sqrt_int(3));
        let sum = s2.add(&s3);
        assert!(!sum.is_exact());
        assert_eq!(sum.cmp_rational(&rat(3146, 1000)), Some(Ordering::Greater));
        assert_eq!(sum.cmp_rational(&rat(3147, 1000)), Some(Ordering::Less));
        assert_eq!(s2.cmp_real(&s3), Some(Ordering::Less));
    }

    #[test]
    fn approx_comparisons_can_be_ambiguous() {
        let a = Real::Approx(RatInterval::new(rat(1, 3), rat(1, 2)));
        assert_eq!(a.cmp_rational(&rat(2, 5)), None);
        assert_eq!(a.cmp_rational(&rat(1, 4)), Some(Ordering::Greater));
    }
}
