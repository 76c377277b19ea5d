//! Brute-force Birkhoff sums of `f = χ[0,1/2] − χ(1/2,1)` under rotation by
//! θ, and empirical checks of the structural claims against them.
//!
//! Orbits are walked in 128-bit fixed point with certified enclosures. A step
//! whose enclosure touches a cut point is decided exactly: affine points
//! `c0 + c1·θ` reduce to comparing θ with a rational, and quadratic points use
//! field arithmetic. Nothing is decided by a floating-point tolerance.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cf_core::rational::{floor_rat, half, pow2_neg, Rational};
use crate::cf_core::{CfError, ContinuedFraction, QuadraticReal, RatInterval, RatIntervalJson, RationalJson, Real};
use crate::heavy_set::{self, Cover};
use crate::renorm::{self, Branch};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error("orbit point {step} cannot be separated from a cut point at available precision")]
    Ambiguous { step: u64 },
    #[error("{0}")]
    Precondition(String),
}

/// A point of the circle, `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// `c0 + c1·θ` with rational coefficients, compared exactly.
    Affine { c0: Rational, c1: Rational },
    /// Exact quadratic or an enclosure.
    Value(Real),
}

impl Point {
    pub fn rational(x: Rational) -> Point {
        Point::Affine { c0: x, c1: Rational::zero() }
    }

    pub fn from_real(x: Real) -> Point {
        match x.as_exact().and_then(QuadraticReal::as_rational) {
            Some(r) => Point::rational(r),
            None => Point::Value(x),
        }
    }

    fn enclosure(&self, theta: &RatInterval) -> RatInterval {
        match self {
            Point::Affine { c0, c1 } => theta.scale(c1).shift(c0),
            Point::Value(v) => v.enclose_rel(crate::cf_core::MIXING_BITS),
        }
    }

    /// `{x + kθ}` as a point.
    pub fn rotated(&self, k: u64, theta: &ContinuedFraction) -> Result<Point, OracleError> {
        let kr = Rational::from_integer(k.into());
        match self {
            Point::Affine { c0, c1 } => {
                let c1 = c1 + &kr;
                let m = floor_affine(c0, &c1, theta)?;
                Ok(Point::Affine { c0: c0 - Rational::from_integer(m), c1 })
            }
            Point::Value(v) => {
                let tv = theta_value(theta)?;
                let y = v.add(&tv.mul_rational(&kr));
                match &y {
                    Real::Exact(q) => {
                        let m = q.floor();
                        Ok(Point::Value(Real::Exact(q.add_rational(&-Rational::from_integer(m)))))
                    }
                    Real::Approx(iv) => {
                        let m = floor_rat(iv.lo());
                        if m != floor_rat(iv.hi()) {
                            return Err(OracleError::Ambiguous { step: k });
                        }
                        Ok(Point::Value(Real::Approx(iv.shift(&-Rational::from_integer(m)))))
                    }
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Point::Affine { c0, c1 } if c1.is_zero() => serde_json::to_value(RationalJson::from(c0)).unwrap(),
            Point::Affine { c0, c1 } => serde_json::json!({
                "c0": RationalJson::from(c0),
                "c1_theta": RationalJson::from(c1),
            }),
            Point::Value(Real::Exact(q)) => serde_json::json!({ "exact": q.to_string() }),
            Point::Value(Real::Approx(iv)) => serde_json::to_value(RatIntervalJson::from(iv)).unwrap(),
        }
    }
}

fn theta_value(theta: &ContinuedFraction) -> Result<Real, CfError> {
    theta.value(256)
}

/// Sign of `a + bθ`, exact.
fn sign_affine(a: &Rational, b: &Rational, theta: &ContinuedFraction) -> Result<Ordering, CfError> {
    if b.is_zero() {
        return Ok(a.cmp(&Rational::zero()));
    }
    // a + bθ = b(θ - r)
    let r = -(a / b);
    let ord = theta.compare(&r)?;
    Ok(if b.is_negative() { ord.reverse() } else { ord })
}

/// `floor(c0 + c1·θ)`, exact.
fn floor_affine(c0: &Rational, c1: &Rational, theta: &ContinuedFraction) -> Result<BigInt, CfError> {
    let (enc, _) = theta.enclose_best(&pow2_neg(64))?;
    let v = enc.scale(c1).shift(c0);
    let mut m = floor_rat(v.hi());
    let lo = floor_rat(v.lo());
    while m > lo && sign_affine(&(c0 - Rational::from_integer(m.clone())), c1, theta)? == Ordering::Less {
        m -= 1;
    }
    Ok(m)
}

/// Cut point `c0 + c1·θ` in `(0, 1)`. A point equal to the cut belongs to
/// the region below it when `closed_below`.
#[derive(Clone, Debug)]
pub struct Cut {
    pub c0: Rational,
    pub c1: Rational,
    pub closed_below: bool,
}

impl Cut {
    /// `1/2`, the boundary of `f`'s support (closed on the left).
    pub fn half() -> Cut {
        Cut { c0: half(), c1: Rational::zero(), closed_below: true }
    }
}

struct FixedCut {
    lo: u128,
    hi: u128,
}

const HALF_WRAP: u128 = 1u128 << 127;

fn fixed_floor(x: &Rational) -> u128 {
    let s = x * Rational::from_integer(BigInt::one() << 128u32);
    wrap(floor_rat(&s))
}

fn fixed_ceil(x: &Rational) -> u128 {
    let s = x * Rational::from_integer(BigInt::one() << 128u32);
    wrap(crate::cf_core::rational::ceil_rat(&s))
}

fn wrap(v: BigInt) -> u128 {
    let m = BigInt::one() << 128u32;
    v.mod_floor(&m).to_u128().unwrap()
}

/// Walks `x, x + θ, x + 2θ, ...` reporting which region between cuts each
/// point falls in (0 = below every cut).
pub struct Orbit<'a> {
    theta: &'a ContinuedFraction,
    theta_enc: RatInterval,
    theta_exact: Option<QuadraticReal>,
    x: Point,
    cuts: Vec<Cut>,
    fixed: Vec<FixedCut>,
    t_lo: u128,
    t_hi: u128,
    pos_lo: u128,
    pos_hi: u128,
    /// Fixed-point width of the current position; `None` once too wide.
    width: Option<u128>,
    t_width: u128,
    k: u64,
}

impl<'a> Orbit<'a> {
    pub fn new(theta: &'a ContinuedFraction, x: Point, cuts: Vec<Cut>) -> Result<Self, OracleError> {
        let (theta_enc, _) = theta.enclose_best(&pow2_neg(140))?;
        let theta_exact = theta_value(theta)?.as_exact().cloned();
        let xe = x.enclosure(&theta_enc);
        let fixed = cuts
            .iter()
            .map(|c| {
                let e = theta_enc.scale(&c.c1).shift(&c.c0);
                FixedCut { lo: fixed_floor(e.lo()), hi: fixed_ceil(e.hi()) }
            })
            .collect();
        let t_lo = fixed_floor(theta_enc.lo());
        let t_hi = fixed_ceil(theta_enc.hi());
        let x_lo = fixed_floor(xe.lo());
        let x_hi = fixed_ceil(xe.hi());
        let width_big = (floor_rat(&(xe.width() * Rational::from_integer(BigInt::one() << 128u32))) + 2u32).to_u128();
        Ok(Orbit {
            theta,
            theta_enc,
            theta_exact,
            x,
            cuts,
            fixed,
            t_lo,
            t_hi,
            pos_lo: x_lo,
            pos_hi: x_hi,
            width: width_big.filter(|w| *w < HALF_WRAP),
            t_width: t_hi.wrapping_sub(t_lo),
            k: 0,
        })
    }

    /// Index of the point about to be classified.
    pub fn step(&self) -> u64 {
        self.k
    }

    /// Region of `x + kθ` for the current `k`, then advances.
    pub fn next_region(&mut self) -> Result<usize, OracleError> {
        let region = match self.fast_region() {
            Some(r) => r,
            None => self.exact_region()?,
        };
        self.k += 1;
        self.pos_lo = self.pos_lo.wrapping_add(self.t_lo);
        self.pos_hi = self.pos_hi.wrapping_add(self.t_hi);
        self.width = self.width.and_then(|w| w.checked_add(self.t_width)).filter(|w| *w < HALF_WRAP);
        Ok(region)
    }

    fn fast_region(&self) -> Option<usize> {
        self.width?;
        if self.pos_lo > self.pos_hi {
            return None;
        }
        let mut region = 0;
        for c in &self.fixed {
            if self.pos_lo > c.hi {
                region += 1;
            } else if self.pos_hi >= c.lo {
                return None;
            }
        }
        Some(region)
    }

    fn exact_region(&self) -> Result<usize, OracleError> {
        let k = Rational::from_integer(self.k.into());
        let mut region = 0;
        match &self.x {
            Point::Affine { c0, c1 } => {
                let b = c1 + &k;
                let m = Rational::from_integer(floor_affine(c0, &b, self.theta)?);
                for c in &self.cuts {
                    let ord = sign_affine(&(c0 - &m - &c.c0), &(&b - &c.c1), self.theta)?;
                    region += counts(ord, c.closed_below);
                }
            }
            Point::Value(v) => {
                if let (Real::Exact(xq), Some(tq)) = (v, &self.theta_exact) {
                    if let Some(y) = xq.checked_add(&tq.mul_rational(&k)) {
                        let frac = y.add_rational(&-Rational::from_integer(y.floor()));
                        for c in &self.cuts {
                            let cut = tq.mul_rational(&c.c1).add_rational(&c.c0);
                            if let Some(ord) = frac.checked_cmp(&cut) {
                                region += counts(ord, c.closed_below);
                                continue;
                            }
                            return Err(OracleError::Ambiguous { step: self.k });
                        }
                        return Ok(region);
                    }
                }
                // enclosure arithmetic at the best θ precision available
                let (te, _) = self.theta.enclose_best(&pow2_neg(4096))?;
                let te = te.intersect(&self.theta_enc).unwrap_or(te);
                let y = v.enclose_rel(crate::cf_core::MIXING_BITS).add(&te.scale(&k));
                let m = floor_rat(y.lo());
                if m != floor_rat(y.hi()) {
                    return Err(OracleError::Ambiguous { step: self.k });
                }
                let frac = y.shift(&-Rational::from_integer(m));
                for c in &self.cuts {
                    let cut = te.scale(&c.c1).shift(&c.c0);
                    match frac.cmp_interval(&cut) {
                        Some(ord) => region += counts(ord, c.closed_below),
                        None => return Err(OracleError::Ambiguous { step: self.k }),
                    }
                }
            }
        }
        Ok(region)
    }
}

fn counts(ord: Ordering, closed_below: bool) -> usize {
    match ord {
        Ordering::Greater => 1,
        Ordering::Equal => usize::from(!closed_below),
        Ordering::Less => 0,
    }
}

/// Birkhoff sums `S_1, ..., S_N` at `x`.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSum {
    pub x: serde_json::Value,
    pub theta: String,
    pub n: u64,
    pub sums: Vec<i64>,
    pub min_prefix: i64,
}

/// `S_n(x) = Σ_{i<n} f(x + iθ)` for `n = 1..=N`.
pub fn birkhoff(x: &Point, theta: &ContinuedFraction, n: u64) -> Result<OrbitSum, OracleError> {
    let mut orbit = Orbit::new(theta, x.clone(), vec![Cut::half()])?;
    let mut s = 0i64;
    let mut sums = Vec::with_capacity(n as usize);
    for _ in 0..n {
        s += if orbit.next_region()? == 0 { 1 } else { -1 };
        sums.push(s);
    }
    let min_prefix = sums.iter().copied().min().unwrap_or(0);
    Ok(OrbitSum { x: x.to_json(), theta: theta.descriptor(), n, sums, min_prefix })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HeavyVerdict {
    /// `S_n >= 0` for all `n <= horizon`.
    Heavy { horizon: u64, min_prefix: i64 },
    /// First `n` with `S_n < 0`.
    Fails { first_failure_n: u64 },
}

impl HeavyVerdict {
    pub fn is_heavy(&self) -> bool {
        matches!(self, HeavyVerdict::Heavy { .. })
    }
}

/// Streams `S_n(x)` until it drops below `threshold` or `n = N`.
pub fn heavy_up_to_threshold(x: &Point, theta: &ContinuedFraction, n: u64, threshold: i64) -> Result<HeavyVerdict, OracleError> {
    let mut orbit = Orbit::new(theta, x.clone(), vec![Cut::half()])?;
    let mut s = 0i64;
    let mut min = i64::MAX;
    for i in 1..=n {
        s += if orbit.next_region()? == 0 { 1 } else { -1 };
        min = min.min(s);
        if s < threshold {
            return Ok(HeavyVerdict::Fails { first_failure_n: i });
        }
    }
    Ok(HeavyVerdict::Heavy { horizon: n, min_prefix: if n == 0 { 0 } else { min } })
}

pub fn heavy_up_to(x: &Point, theta: &ContinuedFraction, n: u64) -> Result<HeavyVerdict, OracleError> {
    heavy_up_to_threshold(x, theta, n, 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub x: serde_json::Value,
    pub n: Option<u64>,
    pub detail: String,
}

/// Outcome counts of an empirical check. `passed + failed + ambiguous +
/// inconclusive = checked`; an inconclusive case is one the horizon was too
/// short to decide and is never counted as a pass.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: BTreeMap<String, String>,
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub ambiguous: u64,
    pub inconclusive: u64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug)]
enum Outcome {
    Pass,
    Fail(Counterexample),
    Ambiguous,
    Inconclusive,
}

impl VerificationReport {
    fn new(claim: &str, params: BTreeMap<String, String>) -> Self {
        VerificationReport {
            claim: claim.into(),
            params,
            checked: 0,
            passed: 0,
            failed: 0,
            ambiguous: 0,
            inconclusive: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, outcome: Outcome) {
        self.checked += 1;
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Ambiguous => self.ambiguous += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
            Outcome::Fail(c) => {
                self.failed += 1;
                if self.counterexample.is_none() {
                    self.counterexample = Some(c);
                }
            }
        }
    }

    fn record_all(&mut self, outcomes: Vec<Outcome>) {
        for o in outcomes {
            self.record(o);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.ambiguous == 0 && self.inconclusive == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn ambiguous_or<T>(r: Result<T, OracleError>, f: impl FnOnce(T) -> Outcome) -> Outcome {
    match r {
        Ok(v) => f(v),
        Err(OracleError::Ambiguous { .. }) => Outcome::Ambiguous,
        Err(e) => Outcome::Fail(Counterexample { x: serde_json::Value::Null, n: None, detail: e.to_string() }),
    }
}

/// Checks the first-return structure on `I' = [0, δ)` for a grid of
/// `samples` rational points: sums stay `>= 1` and return to `1` from
/// `[0, δ/2]`, stay `>= -1` and return to `-1` from `(δ/2, δ)`, and the
/// return map is rotation by `g(θ)·δ` modulo `δ`.
pub fn verify_renormalization(theta: &ContinuedFraction, samples: u64, n: u64) -> Result<VerificationReport, OracleError> {
    let a1 = theta.a(1)?;
    if a1.is_one() {
        return Err(OracleError::Precondition("renormalization check needs a1 != 1 (θ < 1/2)".into()));
    }
    let n_half = Rational::from_integer(BigInt::from(&a1 >> 1u32));
    let two_n = &n_half * Rational::from_integer(2.into());
    let delta = renorm::delta(theta)?;
    let g = renorm::g_step(theta)?.next;
    let width = pow2_neg(200);
    let gd = Real::from(g.enclose_best(&width)?.0).mul(&delta);
    let delta_lo = delta.lower();
    let mut report = VerificationReport::new(
        "first-return map on [0, δ)",
        params(&[("theta", theta.descriptor()), ("samples", samples.to_string()), ("N", n.to_string())]),
    );
    let xs: Vec<Rational> = (0..samples).map(|j| &delta_lo * Rational::new(j.into(), samples.into())).collect();
    let outcomes: Vec<Outcome> = xs
        .par_iter()
        .map(|x| ambiguous_or(return_check(theta, x, &two_n, &gd, &delta, n), |o| o))
        .collect();
    report.record_all(outcomes);
    Ok(report)
}

fn return_check(theta: &ContinuedFraction, x: &Rational, two_n: &Rational, gd: &Real, delta: &Real, n: u64) -> Result<Outcome, OracleError> {
    // x ≤ δ/2 = 1/2 - nθ  ⟺  x - 1/2 + nθ ≤ 0
    let low_half = sign_affine(&(x - half()), &(two_n / Rational::from_integer(2.into())), theta)? != Ordering::Greater;
    let point = Point::rational(x.clone());
    let cuts = vec![Cut::half(), Cut { c0: Rational::one(), c1: -two_n.clone(), closed_below: false }];
    let mut orbit = Orbit::new(theta, point.clone(), cuts)?;
    let mut s = 0i64;
    let fail = |n: u64, detail: String| Outcome::Fail(Counterexample { x: point.to_json(), n: Some(n), detail });
    let (floor_bound, target) = if low_half { (1, 1) } else { (-1, -1) };
    for i in 1..=n {
        // region of T^{i-1} x: 0 = [0, δ), 1 = [δ, 1/2], 2 = (1/2, 1)
        let region = orbit.next_region()?;
        s += if region <= 1 { 1 } else { -1 };
        if s < floor_bound {
            return Ok(fail(i, format!("S_{i} = {s} below {floor_bound} before the return")));
        }
        // region of T^i x decides the return
        let back = orbit_point_in(&point, i, theta, two_n)?;
        if back {
            if s != target {
                return Ok(fail(i, format!("S at return time {i} is {s}, expected {target}")));
            }
            // T^i x - x = iθ - m must equal g(θ)δ or g(θ)δ - δ
            let y = point.rotated(i, theta)?;
            let tv = theta_value(theta)?;
            let disp = match &y {
                Point::Affine { c0, c1 } => Real::rational(c0 - x).add(&tv.mul_rational(c1)),
                Point::Value(v) => v.sub(&Real::rational(x.clone())),
            };
            let d0 = disp.sub(gd);
            let d1 = d0.add(delta);
            let zero = Rational::zero();
            let ok = d0.enclose_rel(64).contains(&zero) || d1.enclose_rel(64).contains(&zero) || d0.cmp_rational(&zero) == Some(Ordering::Equal);
            return Ok(if ok { Outcome::Pass } else { fail(i, "return displacement is not rotation by g(θ)δ".into()) });
        }
    }
    Ok(Outcome::Inconclusive)
}

/// Whether `{x + iθ} ∈ [0, δ)` with `δ = 1 - 2nθ`, decided exactly.
fn orbit_point_in(x: &Point, i: u64, theta: &ContinuedFraction, two_n: &Rational) -> Result<bool, OracleError> {
    let Point::Affine { c0, c1 } = x.rotated(i, theta)? else {
        unreachable!("rational start stays affine")
    };
    // c0 + c1θ < 1 - 2nθ
    Ok(sign_affine(&(c0 - Rational::one()), &(c1 + two_n), theta)? == Ordering::Less)
}

/// Smallest `k >= 1` with `{kθ} ∈ [0, δ) ∪ (1 - δ, 1)`, for θ with `a1 ≠ 1`.
pub fn min_return(theta: &ContinuedFraction, cap: u64) -> Result<Option<u64>, OracleError> {
    let a1 = theta.a(1)?;
    let two_n = Rational::from_integer(BigInt::from(&a1 >> 1u32) * 2);
    let cuts = vec![
        Cut { c0: Rational::one(), c1: -two_n.clone(), closed_below: false },
        Cut { c0: Rational::zero(), c1: two_n, closed_below: true },
    ];
    let mut orbit = Orbit::new(theta, Point::rational(Rational::zero()), cuts)?;
    orbit.next_region()?;
    for k in 1..=cap {
        if orbit.next_region()? != 1 {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Steps every point of `E_depth` is guaranteed to survive:
/// the product of minimal return times over the non-Flip steps.
pub fn survival_horizon(theta: &ContinuedFraction, depth: usize, cap: u64) -> Result<u64, OracleError> {
    let traj = renorm::trajectory(theta, depth);
    if let Some(e) = traj.stopped {
        return Err(e.into());
    }
    let mut r: u64 = 1;
    for step in traj.steps.iter().filter(|s| s.branch != Branch::Flip) {
        let k = min_return(&step.theta, cap)?.unwrap_or(cap);
        r = r.saturating_mul(k).min(cap);
    }
    Ok(r)
}

/// Default horizon `10·q_{2·depth}`, capped.
pub fn default_horizon(theta: &ContinuedFraction, depth: usize, cap: u64) -> Result<u64, CfError> {
    let digits = theta.digits((2 * depth).max(1))?;
    let (_, q) = crate::cf_core::convergent(digits.into_iter());
    Ok(q.to_u64().map_or(cap, |q| q.saturating_mul(10).min(cap)))
}

pub const HORIZON_CAP: u64 = 1_000_000;

/// Compares a cover against brute-force sums: interior grid points of the
/// deepest level stay heavy through the survival horizon (capped by `N`),
/// midpoints of removed gaps and of the zone `(δ/2 + θ, 1)` fail by `N`,
/// isolated points stay heavy through `N`.
pub fn verify_levels(
    theta: &ContinuedFraction,
    cover: &Cover,
    n: Option<u64>,
    grid_density: u64,
) -> Result<VerificationReport, OracleError> {
    let depth = cover.depth;
    let n = match n {
        Some(n) => n,
        None => default_horizon(theta, depth, HORIZON_CAP)?,
    };
    let survive = survival_horizon(theta, depth, n)?.min(n);
    let mut report = VerificationReport::new(
        "cover E_depth and isolated points match brute-force heaviness",
        params(&[
            ("theta", theta.descriptor()),
            ("depth", depth.to_string()),
            ("N", n.to_string()),
            ("interior_horizon", survive.to_string()),
            ("grid_density", grid_density.to_string()),
        ]),
    );

    let deepest = &cover.levels[depth];
    let interior: Vec<Rational> = deepest
        .intervals
        .iter()
        .flat_map(|iv| {
            let w = iv.hull.width();
            (0..grid_density).map(move |j| {
                iv.hull.lo() + &w * Rational::new((2 * j + 1).into(), (2 * grid_density).into())
            })
        })
        .collect();
    let outcomes: Vec<Outcome> = interior
        .par_iter()
        .map(|x| {
            let p = Point::rational(x.clone());
            ambiguous_or(heavy_up_to(&p, theta, survive), |v| match v {
                HeavyVerdict::Heavy { .. } => Outcome::Pass,
                HeavyVerdict::Fails { first_failure_n } => Outcome::Fail(Counterexample {
                    x: p.to_json(),
                    n: Some(first_failure_n),
                    detail: "interior point of the cover fails before the survival horizon".into(),
                }),
            })
        })
        .collect();
    report.record_all(outcomes);

    let mut excluded: Vec<Rational> = (1..=depth).flat_map(|i| cover.gaps(i)).map(|g| g.midpoint()).collect();
    if !theta.a(1)?.is_one() {
        // (δ/2 + θ, 1) with δ/2 + θ = 1/2 - (n - 1)θ
        let n_half = Rational::from_integer(BigInt::from(&theta.a(1)? >> 1u32));
        let (te, _) = theta.enclose_best(&pow2_neg(128))?;
        let edge = te.scale(&(Rational::one() - n_half)).shift(&half());
        excluded.push((edge.hi() + Rational::one()) / Rational::from_integer(2.into()));
    }
    let outcomes: Vec<Outcome> = excluded
        .par_iter()
        .map(|x| {
            let p = Point::rational(x.clone());
            ambiguous_or(heavy_up_to(&p, theta, n), |v| match v {
                HeavyVerdict::Fails { .. } => Outcome::Pass,
                HeavyVerdict::Heavy { .. } => Outcome::Inconclusive,
            })
        })
        .collect();
    report.record_all(outcomes);

    let outcomes: Vec<Outcome> = cover
        .isolated
        .par_iter()
        .map(|pt| {
            let p = Point::from_real(Real::from(pt.enclosure.clone()));
            ambiguous_or(heavy_up_to(&p, theta, n), |v| match v {
                HeavyVerdict::Heavy { .. } => Outcome::Pass,
                HeavyVerdict::Fails { first_failure_n } => Outcome::Fail(Counterexample {
                    x: p.to_json(),
                    n: Some(first_failure_n),
                    detail: format!("isolated point born at depth {} is not heavy", pt.birth),
                }),
            })
        })
        .collect();
    report.record_all(outcomes);
    Ok(report)
}

/// Builds the cover in process and verifies it.
pub fn verify_levels_for(theta: &ContinuedFraction, depth: usize, n: Option<u64>, grid_density: u64) -> Result<VerificationReport, OracleError> {
    let levels = heavy_set::build_levels(theta, depth).map_err(|e| match e {
        heavy_set::HeavyError::Cf(c) => OracleError::Cf(c),
        other => OracleError::Precondition(other.to_string()),
    })?;
    let pts = heavy_set::isolated_points(&levels, &pow2_neg(100))?;
    let cover = levels.to_cover(&pts, heavy_set::EXPORT_BITS);
    verify_levels(theta, &cover, n, grid_density)
}

/// For `a1(θ) = 1`: `x` is heavy for θ exactly when `1/2 - x` is heavy for
/// `g(θ) = 1 - θ`. Compares the first failure times on a grid of `[0, 1/2]`.
pub fn verify_reversal(theta: &ContinuedFraction, n: u64, grid: u64) -> Result<VerificationReport, OracleError> {
    if !theta.a(1)?.is_one() {
        return Err(OracleError::Precondition("reversal needs a1 = 1".into()));
    }
    let g = renorm::g_step(theta)?.next;
    let mut report = VerificationReport::new(
        "H_θ = 1/2 - H_g(θ)",
        params(&[("theta", theta.descriptor()), ("N", n.to_string()), ("grid", grid.to_string())]),
    );
    let xs: Vec<Rational> = (0..grid).map(|j| Rational::new(j.into(), (2 * grid).into())).collect();
    let outcomes: Vec<Outcome> = xs
        .par_iter()
        .map(|x| {
            let p = Point::rational(x.clone());
            let q = Point::rational(half() - x);
            let a = heavy_up_to(&p, theta, n);
            let b = heavy_up_to(&q, &g, n);
            match (a, b) {
                (Ok(a), Ok(b)) if a == b => Outcome::Pass,
                (Ok(a), Ok(b)) => Outcome::Fail(Counterexample {
                    x: p.to_json(),
                    n: None,
                    detail: format!("θ verdict {a:?} differs from g(θ) verdict {b:?} at 1/2 - x"),
                }),
                (Err(OracleError::Ambiguous { .. }), _) | (_, Err(OracleError::Ambiguous { .. })) => Outcome::Ambiguous,
                (Err(e), _) | (_, Err(e)) => Outcome::Fail(Counterexample { x: p.to_json(), n: None, detail: e.to_string() }),
            }
        })
        .collect();
    report.record_all(outcomes);
    Ok(report)
}

/// Finds `count` times `N_i` with `S_{N_i}(h*) = 1` and checks each
/// translate `h* + N_i·θ` is heavy through `N`.
pub fn verify_always_infinite(theta: &ContinuedFraction, count: usize, n: u64) -> Result<VerificationReport, OracleError> {
    let h = heavy_set::strictly_heavy(theta, &pow2_neg(120))?;
    let start = Point::from_real(h.value());
    let mut report = VerificationReport::new(
        "H_θ is infinite: heavy translates of h*",
        params(&[("theta", theta.descriptor()), ("count", count.to_string()), ("N", n.to_string())]),
    );
    let mut orbit = Orbit::new(theta, start.clone(), vec![Cut::half()])?;
    let mut s = 0i64;
    let mut times = Vec::new();
    for i in 1..=n {
        match orbit.next_region() {
            Ok(r) => s += if r == 0 { 1 } else { -1 },
            Err(OracleError::Ambiguous { .. }) => break,
            Err(e) => return Err(e),
        }
        if s == 1 {
            times.push(i);
            if times.len() == count {
                break;
            }
        }
    }
    let outcomes: Vec<Outcome> = times
        .par_iter()
        .map(|&t| {
            let shifted = start.rotated(t, theta);
            ambiguous_or(shifted.and_then(|p| heavy_up_to(&p, theta, n).map(|v| (p, v))), |(p, v)| match v {
                HeavyVerdict::Heavy { .. } => Outcome::Pass,
                HeavyVerdict::Fails { first_failure_n } => Outcome::Fail(Counterexample {
                    x: p.to_json(),
                    n: Some(first_failure_n),
                    detail: format!("translate by {t}θ is not heavy"),
                }),
            })
        })
        .collect();
    report.record_all(outcomes);
    for _ in times.len()..count {
        report.record(Outcome::Inconclusive);
    }
    Ok(report)
}

/// Sign helper exposed for tests: whether `{x + kθ} <= 1/2`.
pub fn indicator(x: &Point, theta: &ContinuedFraction, k: u64) -> Result<i64, OracleError> {
    let y = x.rotated(k, theta)?;
    let mut o = Orbit::new(theta, y, vec![Cut::half()])?;
    Ok(if o.next_region()? == 0 { 1 } else { -1 })
}
