//! Exact rationals and the small amount of big-number glue the crate needs.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational with an arbitrary-precision numerator and a positive,
/// reduced denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_big(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

pub fn floor_rat(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_rat(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Largest `k` with `2^k <= |x|`, for nonzero `x`.
pub fn ilog2_rat(x: &Rational) -> i64 {
    debug_assert!(!x.is_zero());
    let n = x.numer().abs();
    let d = x.denom();
    let mut k = n.bits() as i64 - d.bits() as i64;
    // n / d in [2^(k-1), 2^(k+1)); fix up by one comparison
    let (a, b) = if k >= 0 {
        (n.clone(), d.clone() << (k as u64))
    } else {
        (n.clone() << ((-k) as u64), d.clone())
    };
    if a < b {
        k -= 1;
    }
    k
}

/// Rounds `x` down onto the dyadic grid `2^-frac_bits`.
pub fn round_down(x: &Rational, frac_bits: i64) -> Rational {
    scale_round(x, frac_bits, false)
}

/// Rounds `x` up onto the dyadic grid `2^-frac_bits`.
pub fn round_up(x: &Rational, frac_bits: i64) -> Rational {
    scale_round(x, frac_bits, true)
}

fn scale_round(x: &Rational, frac_bits: i64, up: bool) -> Rational {
    if frac_bits >= 0 {
        let s = BigInt::one() << (frac_bits as u64);
        let scaled = x * Rational::from_integer(s.clone());
        let k = if up { ceil_rat(&scaled) } else { floor_rat(&scaled) };
        Rational::new(k, s)
    } else {
        let s = BigInt::one() << ((-frac_bits) as u64);
        let scaled = x / Rational::from_integer(s.clone());
        let k = if up { ceil_rat(&scaled) } else { floor_rat(&scaled) };
        Rational::from_integer(k * s)
    }
}

/// Natural logarithm of a big unsigned integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.sign() == Sign::Plus, "log of non-positive integer");
    ln_biguint(x.magnitude())
}

/// Natural logarithm of a positive rational.
pub fn ln_rat(x: &Rational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// Nearest-ish f64 of a rational, valid far outside the f64 exponent range
/// of numerator and denominator individually.
pub fn rat_to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let ax = x.abs();
    let e = ilog2_rat(&ax);
    // mantissa in [1, 2) scaled by 2^60 before the integer division
    let m = if e >= 0 {
        (ax.numer() << 60u32) / (ax.denom() << (e as u64))
    } else {
        (ax.numer() << ((60 - e) as u64)) / ax.denom()
    };
    let m = m.to_f64().unwrap_or(f64::NAN) / (1u64 << 60) as f64;
    sign * m * 2f64.powi(e.clamp(-1100, 1100) as i32)
}

/// Exact rational for a decimal, scientific or fraction literal such as
/// `0.25`, `-3`, `1e-9`, `9/10`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((m, e)) = s.split_once(['e', 'E']).filter(|_| !s.contains('/')) {
        let m = parse_rational(m)?;
        let e: i32 = e.trim().parse().ok()?;
        let p = Rational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        return Some(if e >= 0 { m * p } else { m / p });
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(n, d);
    Some(if neg { -r } else { r })
}

/// Decimal scientific notation with `sig` significant digits, rounded
/// toward +∞ when `up` and toward −∞ otherwise, so the printed value is a
/// certified bound on `x`. The exponent is unbounded.
pub fn to_sci(x: &Rational, sig: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_negative() {
        let s = to_sci(&-x, sig, !up);
        return format!("-{s}");
    }
    let sig = sig.max(1);
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rational {
        let p = Rational::from_integer(num_traits::pow(ten.clone(), k.unsigned_abs() as usize));
        if k >= 0 {
            p
        } else {
            p.recip()
        }
    };
    // estimate of floor(log10 x), corrected below
    let mut e = (ilog2_rat(x) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        let lo = pow10(e);
        if x < &lo {
            e -= 1;
        } else if x >= &(&lo * Rational::from_integer(ten.clone())) {
            e += 1;
        } else {
            break;
        }
    }
    let scaled = x * pow10(sig as i64 - 1 - e);
    let mut m = if up { ceil_rat(&scaled) } else { floor_rat(&scaled) };
    // ceil may carry into an extra digit
    if m == num_traits::pow(ten.clone(), sig) {
        m = num_traits::pow(ten.clone(), sig - 1);
        e += 1;
    }
    let digits = m.to_string();
    let (head, tail) = digits.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        format!("{head}e{e}")
    } else {
        format!("{head}.{tail}e{e}")
    }
}

/// `{"num": "...", "den": "..."}` wire form of an exact rational. Digits are
/// strings so arbitrarily large values survive JSON round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl RationalJson {
    pub fn to_rational(&self) -> Option<Rational> {
        let n: BigInt = self.num.parse().ok()?;
        let d: BigInt = self.den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    }
}
