//! Textual θ descriptors.
//!
//! ```text
//! [a1,a2,...]              finite expansion (rational θ)
//! [a1,...;(p1,...,pk)]     eventually periodic; "[;(2)]" and "[(2)]" are purely periodic
//! p/q                      rational in (0,1)
//! factorial_interleaved | e_minus_2 | arith(s,t) | target_d(d)    optionally prefixed "rule:"
//! random(seed,bits)        uniform θ at the given bit precision
//! inv_pi(bits)             1/π to the given bit precision
//! ```

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::error::CfError;
use super::rational::{parse_rational, Rational};
use super::stream::{ContinuedFraction, Rule};

impl std::str::FromStr for ContinuedFraction {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, CfError> {
        parse_theta(s)
    }
}

fn err(literal: &str, reason: impl Into<String>) -> CfError {
    CfError::Parse { literal: literal.to_string(), reason: reason.into() }
}

fn digit_list(literal: &str, s: &str) -> Result<Vec<BigUint>, CfError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let d: BigUint = t.parse().map_err(|_| err(literal, format!("bad digit {t:?}")))?;
            if d.is_zero() {
                return Err(err(literal, "partial quotients must be positive"));
            }
            Ok(d)
        })
        .collect()
}

/// Splits `name(a,b)` into `("name", ["a","b"])`.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let inner = s.strip_suffix(')')?.get(open + 1..)?;
    Some((s[..open].trim(), inner.split(',').map(str::trim).collect()))
}

pub fn parse_theta(literal: &str) -> Result<ContinuedFraction, CfError> {
    let s = literal.trim();
    if let Some(body) = s.strip_prefix('[') {
        let body = body.strip_suffix(']').ok_or_else(|| err(literal, "missing ']'"))?;
        return parse_bracket(literal, body);
    }
    let s = s.strip_prefix("rule:").unwrap_or(s);
    match s {
        "factorial_interleaved" => return ContinuedFraction::rule(Rule::FactorialInterleaved),
        "e_minus_2" => return ContinuedFraction::rule(Rule::EMinus2),
        _ => {}
    }
    if let Some((name, args)) = call(s) {
        let int = |t: &str| -> Result<BigUint, CfError> {
            t.parse().map_err(|_| err(literal, format!("bad integer {t:?}")))
        };
        let small = |t: &str| -> Result<u64, CfError> {
            t.parse().map_err(|_| err(literal, format!("bad integer {t:?}")))
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(literal, format!("{name} takes {n} argument(s)")))
            }
        };
        return match name {
            "arith" => {
                arity(2)?;
                ContinuedFraction::rule(Rule::Arith { start: int(args[0])?, step: int(args[1])? })
            }
            "target_d" => {
                arity(1)?;
                let d = parse_rational(args[0]).ok_or_else(|| err(literal, "bad dimension"))?;
                crate::dimension::theta_for_dimension(&d).map_err(|e| err(literal, e.to_string()))
            }
            "random" => {
                arity(2)?;
                ContinuedFraction::random(small(args[0])?, small(args[1])?)
            }
            "inv_pi" => {
                arity(1)?;
                let bits = small(args[0])?;
                ContinuedFraction::dyadic(inv_pi_numerator(bits), bits)
            }
            _ => Err(err(literal, format!("unknown rule {name:?}"))),
        };
    }
    if s.contains('/') {
        let x = parse_rational(s).ok_or_else(|| err(literal, "bad rational"))?;
        if x <= Rational::zero() || x >= Rational::one() {
            return Err(err(literal, "rational θ must lie in (0,1)"));
        }
        let (n, d) = (x.numer().to_biguint().unwrap(), x.denom().to_biguint().unwrap());
        return ContinuedFraction::rational_big(n, d);
    }
    Err(err(literal, "unrecognized θ descriptor"))
}

fn parse_bracket(literal: &str, body: &str) -> Result<ContinuedFraction, CfError> {
    let (pre, per) = match body.split_once(';') {
        Some((pre, per)) => (pre, Some(per)),
        None if body.trim_start().starts_with('(') => ("", Some(body)),
        None => (body, None),
    };
    let pre = digit_list(literal, pre)?;
    match per {
        None => {
            if pre.is_empty() {
                return Err(err(literal, "empty expansion"));
            }
            let (p, q) = super::stream::convergent(pre.iter().cloned());
            let cf = ContinuedFraction::rational_big(p, q)?;
            Ok(cf)
        }
        Some(per) => {
            let per = per.trim();
            let inner = per
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| err(literal, "period must be written (p1,...,pk)"))?;
            let period = digit_list(literal, inner)?;
            if period.is_empty() {
                return Err(err(literal, "empty period"));
            }
            ContinuedFraction::periodic_big(pre, period)
        }
    }
}

/// `floor(2^bits / π)`, so 1/π lies in `[N/2^bits, (N+1)/2^bits]`.
pub fn inv_pi_numerator(bits: u64) -> BigUint {
    // π·2^w by Machin's formula with guard bits
    let guard = 64;
    let w = bits + guard;
    let one = BigUint::one() << w;
    let arctan_inv = |x: u64| -> BigUint {
        // arctan(1/x)·2^w, alternating series truncated once terms vanish
        let x2 = BigUint::from(x * x);
        let mut term = &one / BigUint::from(x);
        let mut sum_pos = BigUint::zero();
        let mut sum_neg = BigUint::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            let t = &term / BigUint::from(2 * k + 1);
            if k % 2 == 0 {
                sum_pos += t;
            } else {
                sum_neg += t;
            }
            term /= &x2;
            k += 1;
        }
        sum_pos - sum_neg
    };
    let pi = (arctan_inv(5) * 16u32) - (arctan_inv(239) * 4u32);
    // 2^bits / π = 2^(bits + w) / (π·2^w)
    (BigUint::one() << (bits + w)) / pi
}
