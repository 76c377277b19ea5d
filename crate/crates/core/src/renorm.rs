//! The renormalization map `g`, return lengths `δ`, dimension weights and
//! parity bookkeeping along `θ_i = g^i(θ)`.

use std::fmt;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::cf_core::rational::{to_sci, Rational};
use crate::cf_core::{CfError, ContinuedFraction, QuadraticReal, RatInterval, Real};

/// Relative precision targeted for `δ` enclosures of non-quadratic θ.
pub const DELTA_BITS: u64 = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// `a1 = 1`: `θ -> 1 - θ = [a2 + 1, a3, ...]`
    Flip,
    /// `a1` odd, not 1: `θ -> [1, a2, a3, ...]`
    OddFold,
    /// `a1` even: `θ -> [a3, a4, ...]`
    EvenDrop,
}

impl Branch {
    pub fn of(a1: &BigUint) -> Branch {
        if a1.is_one() {
            Branch::Flip
        } else if a1.is_odd() {
            Branch::OddFold
        } else {
            Branch::EvenDrop
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Flip => "flip",
            Branch::OddFold => "odd_fold",
            Branch::EvenDrop => "even_drop",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One application of `g`.
#[derive(Clone, Debug)]
pub struct GStep {
    pub next: ContinuedFraction,
    pub branch: Branch,
    pub a1: BigUint,
    /// Read whenever the branch needs it (Flip and EvenDrop).
    pub a2: Option<BigUint>,
}

pub fn g_step(cf: &ContinuedFraction) -> Result<GStep, CfError> {
    let a1 = cf.a(1)?;
    let branch = Branch::of(&a1);
    let (next, a2) = match branch {
        Branch::Flip => {
            let a2 = cf.a(2)?;
            (cf.drop_front(1)?.increment_leading()?, Some(a2))
        }
        Branch::OddFold => {
            // θ must be irrational past a1
            cf.a(2)?;
            (cf.drop_front(1)?.prepend(BigUint::one()), None)
        }
        Branch::EvenDrop => {
            let a2 = cf.a(2)?;
            cf.a(3)?;
            (cf.drop_front(2)?, Some(a2))
        }
    };
    Ok(GStep { next, branch, a1, a2 })
}

/// `δ = 1 - 2⌊a1/2⌋θ`: exact for quadratic and rational θ, otherwise an
/// enclosure of relative width about `2^-DELTA_BITS`.
pub fn delta(cf: &ContinuedFraction) -> Result<Real, CfError> {
    delta_with_bits(cf, DELTA_BITS)
}

pub fn delta_with_bits(cf: &ContinuedFraction, rel_bits: u64) -> Result<Real, CfError> {
    let a1 = cf.a(1)?;
    if a1.is_one() {
        return Ok(Real::one());
    }
    let n: BigUint = &a1 >> 1u32;
    let two_n = Rational::from_integer(BigInt::from(&n << 1u32));
    if cf.is_periodic() {
        let theta = cf.value_quadratic()?;
        return Ok(Real::Exact(theta.mul_rational(&-two_n).add_rational(&Rational::one())));
    }
    if cf.finite_len().is_some() {
        let theta = cf.value_rational()?;
        return Ok(Real::rational(Rational::one() - two_n * theta));
    }
    // θ = 1/(a1 + γ); δ is increasing in γ on both branches:
    //   even: γ/(2n + γ)      odd: (1 + γ)/(2n + 1 + γ)
    let gamma = cf.gauss()?;
    let a2 = gamma.a(1)?;
    let width = crate::cf_core::rational::pow2_neg(rel_bits + 2)
        / Rational::from_integer(BigInt::from(a2 + 1u32));
    let (g, _) = gamma.enclose_best(&width)?;
    let c = Rational::from_integer(BigInt::from(a1.clone()));
    let h = |x: &Rational| -> Rational {
        if a1.is_even() {
            x / (&c + x)
        } else {
            (Rational::one() + x) / (&c + x)
        }
    };
    let iv = RatInterval::new(h(g.lo()), h(g.hi()));
    Ok(Real::from(iv).rounded(rel_bits + 8))
}

/// `(f1, f2)` with `f1 = δ` and `f2 = 1` for odd `a1`, `a2 + 1` for even `a1`.
pub fn weights(cf: &ContinuedFraction) -> Result<(Real, BigUint), CfError> {
    let f1 = delta(cf)?;
    let a1 = cf.a(1)?;
    let f2 = if a1.is_even() { cf.a(2)? + 1u32 } else { BigUint::one() };
    Ok((f1, f2))
}

/// `θ_i` before `g` is applied, with everything the constructions need.
#[derive(Clone, Debug)]
pub struct RenormStep {
    pub index: usize,
    pub theta: ContinuedFraction,
    pub a1: BigUint,
    pub a2: Option<BigUint>,
    /// Present for EvenDrop steps; `a3 = 1` marks an isolated-point step.
    pub a3: Option<BigUint>,
    pub branch: Branch,
    pub delta: Real,
    pub f2: BigUint,
    /// Parity `p_i` of Flip steps before `i`.
    pub p: u8,
}

impl RenormStep {
    pub fn f1(&self) -> &Real {
        &self.delta
    }

    /// Whether the step contributes isolated points to the heavy set.
    pub fn spawns_isolated(&self) -> bool {
        match self.branch {
            Branch::Flip => false,
            Branch::OddFold => true,
            Branch::EvenDrop => self.a3.as_ref().is_some_and(|a| a.is_one()),
        }
    }

    /// Certified `(lower, upper)` bounds on `-log δ` from the digits alone:
    /// `1/((2n+1)(m+1)) < δ < 1/(2nm)` when `a1 = 2n`, `a2 = m`, and
    /// `1/(2n+1) < δ < 1/(n+1)` when `a1 = 2n+1 ≠ 1`.
    pub fn neg_log_f1_bounds(&self) -> (f64, f64) {
        match self.branch {
            Branch::Flip => (0.0, 0.0),
            Branch::OddFold => {
                let n = &self.a1 >> 1u32;
                (ln_u(&(&n + 1u32)), ln_u(&self.a1))
            }
            Branch::EvenDrop => {
                let m = self.a2.as_ref().expect("even step has a2");
                (ln_u(&(&self.a1 * m)), ln_u(&((&self.a1 + 1u32) * (m + 1u32))))
            }
        }
    }
}

fn ln_u(x: &BigUint) -> f64 {
    crate::cf_core::rational::ln_biguint(x)
}

/// `θ_0, θ_1, ...` with `δ_i`, parities and `Δ_i = δ_0 ⋯ δ_{i-1}`.
#[derive(Clone, Debug)]
pub struct RenormTrajectory {
    pub steps: Vec<RenormStep>,
    /// `Δ_0 = 1, ..., Δ_len`; one more entry than `steps`.
    pub big_delta: Vec<Real>,
    /// `θ_len`, the stream after the last recorded step.
    pub tail: Option<ContinuedFraction>,
    /// Why the trajectory stopped short of the requested depth.
    pub stopped: Option<CfError>,
}

impl RenormTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_partial(&self) -> bool {
        self.stopped.is_some()
    }

    /// `p_i` for `0 <= i <= len`.
    pub fn parity(&self, i: usize) -> u8 {
        if i < self.steps.len() {
            self.steps[i].p
        } else {
            let last = self.steps.last().map_or(0, |s| s.p ^ (s.branch == Branch::Flip) as u8);
            if i == self.steps.len() {
                last
            } else {
                panic!("parity index {i} beyond trajectory")
            }
        }
    }

    pub fn f2_sequence(&self) -> Vec<BigUint> {
        self.steps.iter().map(|s| s.f2.clone()).collect()
    }

    /// CSV with columns `i,a1,a2,branch,p,delta_lo,delta_hi,f2,Delta_lo,Delta_hi`.
    /// Bounds are decimal with directed rounding, so they stay certified.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,a1,a2,branch,p,delta_lo,delta_hi,f2,Delta_lo,Delta_hi")?;
        for (s, big) in self.steps.iter().zip(&self.big_delta) {
            let d = s.delta.enclose_rel(crate::cf_core::MIXING_BITS);
            let b = big.enclose_rel(crate::cf_core::MIXING_BITS);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                s.index,
                s.a1,
                s.a2.as_ref().map(|a| a.to_string()).unwrap_or_default(),
                s.branch,
                s.p,
                to_sci(d.lo(), 17, false),
                to_sci(d.hi(), 17, true),
                s.f2,
                to_sci(b.lo(), 17, false),
                to_sci(b.hi(), 17, true),
            )?;
        }
        Ok(())
    }
}

impl RenormTrajectory {
    /// Same columns as the CSV, with exact rational bounds.
    pub fn to_json(&self) -> serde_json::Value {
        let bits = crate::cf_core::MIXING_BITS;
        let steps: Vec<serde_json::Value> = self
            .steps
            .iter()
            .zip(&self.big_delta)
            .map(|(s, big)| {
                serde_json::json!({
                    "i": s.index,
                    "a1": s.a1.to_string(),
                    "a2": s.a2.as_ref().map(|a| a.to_string()),
                    "branch": s.branch.name(),
                    "p": s.p,
                    "delta": crate::cf_core::RatIntervalJson::from(&s.delta.enclose_rel(bits).round_outward(bits)),
                    "f2": s.f2.to_string(),
                    "Delta": crate::cf_core::RatIntervalJson::from(&big.enclose_rel(bits).round_outward(bits)),
                })
            })
            .collect();
        serde_json::json!({
            "steps": steps,
            "stopped": self.stopped.as_ref().map(|e| e.to_string()),
        })
    }
}

/// Runs `g` for `depth` steps. Digit exhaustion truncates the trajectory and
/// records the error in `stopped`.
pub fn trajectory(cf: &ContinuedFraction, depth: usize) -> RenormTrajectory {
    let mut t = RenormTrajectory::start(cf);
    t.extend_to(depth);
    t
}

impl RenormTrajectory {
    /// Empty trajectory positioned at `θ_0 = θ`.
    pub fn start(cf: &ContinuedFraction) -> Self {
        RenormTrajectory { steps: Vec::new(), big_delta: vec![Real::one()], tail: Some(cf.clone()), stopped: None }
    }

    /// Applies `g` until `depth` steps are recorded or digits run out.
    /// Returns whether the depth was reached.
    pub fn extend_to(&mut self, depth: usize) -> bool {
        while self.steps.len() < depth {
            let Some(theta) = self.tail.take() else {
                return false;
            };
            let index = self.steps.len();
            let p = self.parity(index);
            match Self::step(&theta, index, p) {
                Ok((step, next)) => {
                    let prod = self.big_delta.last().unwrap().mul(&step.delta).rounded(DELTA_BITS);
                    self.big_delta.push(prod);
                    self.steps.push(step);
                    self.tail = Some(next);
                }
                Err(e) => {
                    self.stopped = Some(e);
                    return false;
                }
            }
        }
        true
    }

    fn step(theta: &ContinuedFraction, index: usize, p: u8) -> Result<(RenormStep, ContinuedFraction), CfError> {
        let g = g_step(theta)?;
        let d = delta(theta)?;
        let a3 = match g.branch {
            Branch::EvenDrop => Some(theta.a(3)?),
            _ => None,
        };
        let f2 = match g.branch {
            Branch::EvenDrop => g.a2.clone().unwrap() + 1u32,
            _ => BigUint::one(),
        };
        let step = RenormStep { index, theta: theta.clone(), a1: g.a1, a2: g.a2, a3, branch: g.branch, delta: d, f2, p };
        Ok((step, g.next))
    }
}

/// Where a periodic trajectory starts repeating: `θ_start = θ_{start + len}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub start: usize,
    pub len: usize,
}

/// First repeat among the canonical periodic forms of the recorded `θ_i`.
pub fn find_cycle(traj: &RenormTrajectory) -> Option<Cycle> {
    let mut seen = std::collections::HashMap::new();
    for s in &traj.steps {
        let form = s.theta.periodic_form()?;
        if let Some(&start) = seen.get(&form) {
            return Some(Cycle { start, len: s.index - start });
        }
        seen.insert(form, s.index);
    }
    None
}

/// Checks one step of `g` against its arithmetic form:
/// `1 - θ`, `1/(1 + γ(θ))` and `γ²(θ)` respectively. Returns the two
/// enclosures, which must intersect.
pub fn conjugacy_enclosures(cf: &ContinuedFraction, width: &Rational) -> Result<(RatInterval, RatInterval), CfError> {
    let g = g_step(cf)?;
    let (from_digits, _) = g.next.enclose_best(width)?;
    let arithmetic = match g.branch {
        Branch::Flip => {
            let (t, _) = cf.enclose_best(width)?;
            t.neg().shift(&Rational::one())
        }
        Branch::OddFold => {
            let (gamma, _) = cf.gauss()?.enclose_best(width)?;
            let one = RatInterval::point(Rational::one());
            one.div(&one.add(&gamma)).expect("1 + γ > 0")
        }
        Branch::EvenDrop => cf.gauss()?.gauss()?.enclose_best(width)?.0,
    };
    Ok((from_digits, arithmetic))
}

/// Exact `δ` of a periodic step as a quadratic, when available.
pub fn delta_exact(cf: &ContinuedFraction) -> Option<QuadraticReal> {
    delta(cf).ok()?.as_exact().cloned()
}

/// `Δ_{2k} <= 2^-k` check helper: `Δ` upper bound as f64 log2.
pub fn log2_upper(x: &Real) -> f64 {
    let hi = x.upper();
    if hi <= Rational::from_integer(0.into()) {
        return f64::NEG_INFINITY;
    }
    crate::cf_core::rational::ln_rat(&hi) / std::f64::consts::LN_2
}

/// Small integer view of a digit, saturating.
pub fn small(x: &BigUint) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}
