//! Exact arithmetic in a real quadratic field: values `(p + q√d) / r`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::RatInterval;
use super::rational::{ilog2_rat, Rational};

/// `(p + q√d) / r` in canonical form: `r > 0`, `gcd(p, q, r) = 1`, and `d`
/// square-free and non-square whenever `q != 0`. Rational values carry
/// `q = 0, d = 0` so they combine with any field.
///
/// Square factors of `d` are removed by trial division over primes below
/// 2^16 followed by a perfect-square test of the cofactor, which is complete
/// for every discriminant produced by continued fractions with moderate digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticReal {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: BigInt,
}

const TRIAL_LIMIT: u32 = 1 << 16;

/// Splits `n > 0` into `(s, f)` with `n = s^2 f` and `f` free of small squares.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut p = 2u32;
    while p < TRIAL_LIMIT {
        let pp = BigInt::from(p) * BigInt::from(p);
        if pp > rest {
            break;
        }
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        s *= &root;
        rest = BigInt::one();
    }
    (s, rest)
}

impl QuadraticReal {
    pub fn from_rational(x: &Rational) -> Self {
        QuadraticReal {
            p: x.numer().clone(),
            q: BigInt::zero(),
            r: x.denom().clone(),
            d: BigInt::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// Builds `(p + q√d) / r`, reducing `d` and the coefficients.
    pub fn new(p: BigInt, q: BigInt, r: BigInt, d: BigInt) -> Self {
        assert!(!r.is_zero(), "zero denominator");
        assert!(!d.is_negative(), "negative radicand");
        let (s, f) = if d.is_zero() { (BigInt::zero(), BigInt::zero()) } else { square_part(&d) };
        let (q, d) = if q.is_zero() || d.is_zero() {
            (BigInt::zero(), BigInt::zero())
        } else if f.is_one() {
            // perfect square: q√d = q s is rational
            return Self::canonical(p + q * s, BigInt::zero(), r, BigInt::zero());
        } else {
            (q * s, f)
        };
        Self::canonical(p, q, r, d)
    }

    fn canonical(mut p: BigInt, mut q: BigInt, mut r: BigInt, d: BigInt) -> Self {
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        let d = if q.is_zero() { BigInt::zero() } else { d };
        QuadraticReal { p, q, r, d }
    }

    /// `√n` for a non-negative integer `n`.
    pub fn sqrt_int(n: i64) -> Self {
        Self::new(BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::from(n))
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| Rational::new(self.p.clone(), self.r.clone()))
    }

    fn common_field(&self, other: &Self) -> Option<BigInt> {
        match (self.d.is_zero(), other.d.is_zero()) {
            (true, _) => Some(other.d.clone()),
            (_, true) => Some(self.d.clone()),
            _ if self.d == other.d => Some(self.d.clone()),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let d = self.common_field(other)?;
        Some(Self::canonical(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            &self.r * &other.r,
            d,
        ))
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let d = self.common_field(other)?;
        Some(Self::canonical(
            &self.p * &other.p + &self.q * &other.q * &d,
            &self.p * &other.q + &self.q * &other.p,
            &self.r * &other.r,
            d,
        ))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // r / (p + q√d) = r (p - q√d) / (p^2 - q^2 d)
        let norm = &self.p * &self.p - &self.q * &self.q * &self.d;
        Some(Self::canonical(&self.r * &self.p, -(&self.r * &self.q), norm, self.d.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn mul_rational(&self, k: &Rational) -> Self {
        Self::canonical(&self.p * k.numer(), &self.q * k.numer(), &self.r * k.denom(), self.d.clone())
    }

    pub fn add_rational(&self, k: &Rational) -> Self {
        Self::canonical(
            &self.p * k.denom() + k.numer() * &self.r,
            &self.q * k.denom(),
            &self.r * k.denom(),
            self.d.clone(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> Sign {
        // r > 0, so the sign is that of p + q√d
        let sp = self.p.sign();
        let sq = self.q.sign();
        match (sp, sq) {
            (Sign::NoSign, s) | (s, Sign::NoSign) => s,
            (a, b) if a == b => a,
            _ => {
                let p2 = &self.p * &self.p;
                let q2d = &self.q * &self.q * &self.d;
                match p2.cmp(&q2d) {
                    Ordering::Greater => sp,
                    Ordering::Less => sq,
                    Ordering::Equal => Sign::NoSign,
                }
            }
        }
    }

    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        sign_to_ordering(self.add_rational(&-x).signum())
    }

    /// Exact comparison; `None` only for values from different fields.
    pub fn checked_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(sign_to_ordering(self.checked_add(&-other)?.signum()))
    }

    pub fn floor(&self) -> BigInt {
        if let Some(x) = self.as_rational() {
            return x.numer().div_floor(x.denom());
        }
        let est = self.enclose(8);
        let mut k = est.lo().numer().div_floor(est.lo().denom());
        while self.cmp_rational(&Rational::from_integer(&k + 1)) != Ordering::Less {
            k += 1;
        }
        while self.cmp_rational(&Rational::from_integer(k.clone())) == Ordering::Less {
            k -= 1;
        }
        k
    }

    /// Fractional part `x mod 1`.
    pub fn fract(&self) -> Self {
        self.add_rational(&Rational::from_integer(-self.floor()))
    }

    /// Rational enclosure of absolute width at most `2^-abs_bits`.
    pub fn enclose(&self, abs_bits: u64) -> RatInterval {
        if let Some(x) = self.as_rational() {
            return RatInterval::point(x);
        }
        // width = |q| / (r 2^k)
        let extra = self.q.bits() as i64 - self.r.bits() as i64 + 1;
        let k = (abs_bits as i64 + extra).max(0) as u64;
        let scaled = &self.d << (2 * k);
        let s = scaled.sqrt();
        let one_k = BigInt::one() << k;
        let lo_root = Rational::new(s.clone(), one_k.clone());
        let hi_root = Rational::new(s + 1, one_k);
        let p = Rational::from_integer(self.p.clone());
        let q = Rational::from_integer(self.q.clone());
        let r = Rational::from_integer(self.r.clone());
        let a = (&p + &q * &lo_root) / &r;
        let b = (&p + &q * &hi_root) / &r;
        RatInterval::spanning(a, b)
    }

    /// Rational enclosure whose width is at most `2^-rel_bits` times the
    /// magnitude of the value.
    pub fn enclose_rel(&self, rel_bits: u64) -> RatInterval {
        if self.is_rational() {
            return self.enclose(0);
        }
        let mut abs_bits = rel_bits + 4;
        loop {
            let iv = self.enclose(abs_bits);
            let lo = iv.lo().abs();
            let hi = iv.hi().abs();
            let mag = if lo < hi { lo } else { hi };
            if iv.cmp_rational(&Rational::zero()).is_some() && !mag.is_zero() {
                let need = rel_bits as i64 - ilog2_rat(&mag) + 1;
                if need <= abs_bits as i64 {
                    return iv;
                }
                abs_bits = need as u64;
            } else {
                abs_bits *= 2;
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose_rel(60).to_f64_mid()
    }
}

fn sign_to_ordering(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl PartialOrd for QuadraticReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_cmp(other)
    }
}

impl Neg for &QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        QuadraticReal {
            p: -&self.p,
            q: -&self.q,
            r: self.r.clone(),
            d: self.d.clone(),
        }
    }
}

impl Neg for QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        -&self
    }
}

// Operators panic on values from different quadratic fields; use the
// `checked_*` forms where the fields are not known to agree.
impl Add for &QuadraticReal {
    type Output = QuadraticReal;
    fn add(self, rhs: &QuadraticReal) -> QuadraticReal {
        self.checked_add(rhs).expect("quadratic field mismatch")
    }
}

impl Sub for &QuadraticReal {
    type Output = QuadraticReal;
    fn sub(self, rhs: &QuadraticReal) -> QuadraticReal {
        self.checked_add(&-rhs).expect("quadratic field mismatch")
    }
}

impl Mul for &QuadraticReal {
    type Output = QuadraticReal;
    fn mul(self, rhs: &QuadraticReal) -> QuadraticReal {
        self.checked_mul(rhs).expect("quadratic field mismatch")
    }
}

impl Div for &QuadraticReal {
    type Output = QuadraticReal;
    fn div(self, rhs: &QuadraticReal) -> QuadraticReal {
        self.checked_div(rhs).expect("quadratic field mismatch or division by zero")
    }
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            if self.r.is_one() {
                return write!(f, "{}", self.p);
            }
            return write!(f, "{}/{}", self.p, self.r);
        }
        let q = match self.q.to_i64() {
            Some(1) => String::new(),
            Some(-1) => "-".to_string(),
            _ => self.q.to_string(),
        };
        let body = if self.p.is_zero() {
            format!("{q}√{}", self.d)
        } else {
            let sep = if self.q.is_negative() { " - " } else { " + " };
            let qa = match self.q.abs().to_i64() {
                Some(1) => String::new(),
                _ => self.q.abs().to_string(),
            };
            format!("{}{sep}{qa}√{}", self.p, self.d)
        };
        if self.r.is_one() {
            write!(f, "{body}")
        } else if self.p.is_zero() {
            write!(f, "{body}/{}", self.r)
        } else {
            write!(f, "({body})/{}", self.r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::rational::rat;

    fn qr(p: i64, q: i64, r: i64, d: i64) -> QuadraticReal {
        QuadraticReal::new(p.into(), q.into(), r.into(), d.into())
    }

    #[test]
    fn canonical_form() {
        // (2 + 2√8)/4 = (1 + 2√2)/2
        let x = qr(2, 2, 4, 8);
        assert_eq!(x, qr(1, 2, 2, 2));
        assert_eq!(x.d(), &BigInt::from(2));
        // √9 collapses to a rational
        assert_eq!(QuadraticReal::sqrt_int(9), QuadraticReal::from_int(3));
        assert_eq!(qr(1, 1, -2, 5), qr(-1, -1, 2, 5));
    }

    #[test]
    fn field_operations() {
        let s2 = QuadraticReal::sqrt_int(2);
        let one = QuadraticReal::from_int(1);
        let a = &s2 - &one; // √2 - 1
        let b = &s2 + &one;
        assert_eq!(&a * &b, one);
        assert_eq!(a.recip().unwrap(), b);
        // (3 - 2√2)(3 + 2√2) = 1
        let c = &QuadraticReal::from_int(3) - &(&s2 * &QuadraticReal::from_int(2));
        assert_eq!(&c * &(&QuadraticReal::from_int(6) - &c), one);
        assert!(s2.checked_add(&QuadraticReal::sqrt_int(3)).is_none());
    }

    #[test]
    fn exact_sign_and_compare() {
        let s2 = QuadraticReal::sqrt_int(2);
        assert_eq!(s2.cmp_rational(&rat(141421, 100000)), Ordering::Greater);
        assert_eq!(s2.cmp_rational(&rat(141422, 100000)), Ordering::Less);
        let a = &s2 - &QuadraticReal::from_int(1);
        assert_eq!(a.cmp_rational(&rat(1, 2)), Ordering::Less);
        assert_eq!(a.cmp_rational(&rat(2, 5)), Ordering::Greater);
        assert_eq!(qr(3, -2, 1, 2).signum(), Sign::Plus);
        assert_eq!(qr(-3, 2, 1, 2).signum(), Sign::Minus);
        assert_eq!(s2.floor(), BigInt::from(1));
        assert_eq!((-&s2).floor(), BigInt::from(-2));
    }

    #[test]
    fn enclosures_contain_value() {
        let x = qr(1, 1, 3, 5);
        for bits in [0u64, 10, 100, 400] {
            let iv = x.enclose(bits);
            assert!(iv.width() <= crate::cf_core::rational::pow2_neg(bits));
            assert_eq!(x.cmp_rational(iv.lo()), Ordering::Greater);
            assert_eq!(x.cmp_rational(iv.hi()), Ordering::Less);
        }
        let tiny = x.mul_rational(&crate::cf_core::rational::pow2_neg(500));
        let iv = tiny.enclose_rel(30);
        assert!(iv.lo() > &Rational::zero());
        assert!(iv.width() * Rational::from_integer(BigInt::one() << 30u32) <= iv.lo().clone());
    }

    #[test]
    fn display() {
        assert_eq!(qr(0, 1, 1, 2).to_string(), "√2");
        assert_eq!(qr(3, -2, 1, 2).to_string(), "3 - 2√2");
        assert_eq!(qr(1, 1, 2, 5).to_string(), "(1 + √5)/2");
    }
}
