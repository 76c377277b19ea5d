//! Invariant checks shared by the property suite and the acceptance target.
#![allow(dead_code)]

use std::cmp::Ordering;

use heavy_core::cf_core::rational::rat;
use heavy_core::cf_core::{ContinuedFraction, QuadraticReal, Rational};
use heavy_core::heavy_set::build_levels;
use heavy_core::oracle::{birkhoff, Point};
use heavy_core::renorm::{trajectory, Branch};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Eventually periodic θ with small digits.
pub fn periodic() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (prop::collection::vec(1u64..7, 0..3), prop::collection::vec(1u64..7, 1..4))
}

pub fn theta(pre: &[u64], per: &[u64]) -> ContinuedFraction {
    ContinuedFraction::periodic(pre, per).unwrap()
}

/// `(p, q)` with `0 <= p < q`.
pub fn unit_rational() -> impl Strategy<Value = (i64, i64)> {
    (2i64..2000).prop_flat_map(|q| (0..q, Just(q)))
}

pub fn cocycle(t: &ContinuedFraction, x: Rational, m: u64, n: u64) -> Check {
    let p = Point::rational(x);
    let whole = birkhoff(&p, t, m + n).map_err(|e| e.to_string())?.sums;
    let s_m = if m == 0 { 0 } else { whole[m as usize - 1] };
    let shifted = p.rotated(m, t).map_err(|e| e.to_string())?;
    let tail = birkhoff(&shifted, t, n).map_err(|e| e.to_string())?.sums;
    let s_n = tail.last().copied().unwrap_or(0);
    let s_mn = whole.last().copied().unwrap_or(0);
    ensure(s_mn == s_m + s_n, || format!("S_{{m+n}} = {s_mn} but S_m + S_n = {s_m} + {s_n}"))
}

pub fn unit_steps(t: &ContinuedFraction, x: Rational, n: u64) -> Check {
    let sums = birkhoff(&Point::rational(x), t, n).map_err(|e| e.to_string())?.sums;
    let mut prev = 0;
    for (i, s) in sums.iter().enumerate() {
        ensure((s - prev).abs() == 1, || format!("step {i}: {prev} -> {s}"))?;
        prev = *s;
    }
    Ok(())
}

/// Odd convergents lie above θ, even ones below, each within `1/(q_k q_{k+1})`.
pub fn bracketing(t: &ContinuedFraction, k: usize) -> Check {
    let digits = t.digits(k + 1).map_err(|e| e.to_string())?;
    let (mut p0, mut q0, mut p1, mut q1) = (BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::one());
    for (i, a) in digits.iter().enumerate().take(k) {
        let p = a * &p1 + &p0;
        let q = a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let c = Rational::new(BigInt::from(p1.clone()), BigInt::from(q1.clone()));
        let ord = t.compare(&c).map_err(|e| e.to_string())?;
        let want = if i % 2 == 0 { Ordering::Less } else { Ordering::Greater };
        ensure(ord == want, || format!("convergent {} on the wrong side", i + 1))?;
        let q_next = &digits[i + 1] * &q1 + &q0;
        let w = Rational::new(BigInt::one(), BigInt::from(&q1 * &q_next));
        let gap = if i % 2 == 0 { &c - &w } else { &c + &w };
        let ord = t.compare(&gap).map_err(|e| e.to_string())?;
        ensure(ord == want.reverse(), || format!("convergent {} too far from θ", i + 1))?;
    }
    Ok(())
}

/// `p_i` counts Flip steps before `i`, mod 2.
pub fn parity(t: &ContinuedFraction, depth: usize) -> Check {
    let tr = trajectory(t, depth);
    let mut flips = 0u8;
    for (i, s) in tr.steps.iter().enumerate() {
        ensure(s.p == flips % 2 && tr.parity(i) == s.p, || format!("parity mismatch at step {i}"))?;
        if s.branch == Branch::Flip {
            flips += 1;
        }
    }
    ensure(tr.parity(tr.len()) == flips % 2, || "final parity mismatch".into())
}

/// Children nest in parents, counts multiply by `f2`, lengths are
/// `Δ_i / 2`, and each level is sorted with positive gaps.
pub fn levels(t: &ContinuedFraction, depth: usize) -> Check {
    let lv = build_levels(t, depth).map_err(|e| e.to_string())?;
    for i in 1..lv.levels.len() {
        let (up, here) = (&lv.levels[i - 1], &lv.levels[i]);
        let f2 = lv.trajectory.steps[i - 1].f2.to_usize().unwrap();
        ensure(here.intervals.len() == up.intervals.len() * f2, || format!("level {i} has {} intervals", here.intervals.len()))?;
        let half_len = lv.trajectory.big_delta[i].mul_rational(&rat(1, 2));
        ensure(here.length.cmp_real(&half_len).map_or(true, |o| o == Ordering::Equal) , || format!("level {i} length"))?;
        let want = half_len.enclose_rel(64);
        for (k, iv) in here.intervals.iter().enumerate() {
            let len = iv.right.sub(&iv.left).enclose_rel(64);
            ensure(len.intersects(&want), || format!("level {i} interval {k} has the wrong length"))?;
            let parent = up.intervals[iv.parent].hull(160);
            let hull = iv.hull(160);
            ensure(parent.lo() <= hull.lo() && hull.hi() <= parent.hi(), || format!("level {i} interval {k} escapes its parent"))?;
            if k > 0 {
                let prev = here.intervals[k - 1].hull(160);
                ensure(prev.hi() < hull.lo(), || format!("level {i} intervals {} and {k} touch", k - 1))?;
            }
        }
    }
    Ok(())
}

/// Gauss map on the exact quadratic value reproduces the digit stream.
pub fn quadratic_round_trip(t: &ContinuedFraction, k: usize) -> Check {
    let mut x: QuadraticReal = t.value_quadratic().map_err(|e| e.to_string())?;
    let digits = t.digits(k).map_err(|e| e.to_string())?;
    for (i, d) in digits.iter().enumerate() {
        let y = x.recip().ok_or("zero remainder")?;
        let a = y.floor();
        ensure(a == BigInt::from(d.clone()), || format!("digit {} is {a}, stream says {d}", i + 1))?;
        x = y.add_rational(&-Rational::from_integer(a));
    }
    Ok(())
}
