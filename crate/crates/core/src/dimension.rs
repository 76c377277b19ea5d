//! Truncated dimension estimates for heavy sets, Monte Carlo estimation of the
//! almost-sure constant `c`, and θ with prescribed dimension.
//!
//! The dimension of `H_θ` is `liminf Σ log f2 / −Σ log f1` along the
//! renormalization trajectory. No finite computation sees a liminf, so the
//! estimates here report the truncated ratios, certified lower/upper versions
//! from the digit bounds on δ, and a running infimum after a burn-in.

use std::io::Write;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cf_core::rational::{ln_biguint, ln_rat};
use crate::cf_core::{CfError, ContinuedFraction, Rational, Rule};
use crate::renorm::{self, Branch, RenormStep, RenormTrajectory};

/// Steps skipped before the running infimum starts.
pub const RUNNING_INF_BURNIN: usize = 10;
/// Parameters of the irregularity verdict attached to a [`DimEstimate`].
pub const IRREGULAR_EPSILON: f64 = 0.5;
pub const IRREGULAR_FROM: usize = 10;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

// outward nudge covering f64 rounding in logs and sums
const NUDGE: f64 = 1e-12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DimError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error("trajectory stopped after {reached} of {depth} steps: {cause}")]
    PartialTrajectory { reached: usize, depth: usize, cause: CfError },
    #[error("{0}")]
    Invalid(String),
}

impl DimError {
    pub fn is_budget(&self) -> bool {
        match self {
            DimError::Cf(e) => e.is_budget(),
            DimError::PartialTrajectory { cause, .. } => cause.is_budget(),
            DimError::Invalid(_) => false,
        }
    }
}

/// θ whose heavy set has dimension `d`: factorial-interleaved for `d = 0`,
/// otherwise `[2n_0, m_0, 2n_1, m_1, ...]`.
pub fn theta_for_dimension(d: &Rational) -> Result<ContinuedFraction, CfError> {
    if d < &Rational::zero() || d > &Rational::one() {
        return Err(CfError::Invalid(format!("dimension {d} outside [0,1]")));
    }
    if d.is_zero() {
        return ContinuedFraction::rule(Rule::FactorialInterleaved);
    }
    ContinuedFraction::rule(Rule::TargetD { d: d.clone() })
}

/// `log(m_i + 1) / (log(2n_i) + log(m_i + 1))` for the `target_d(d)` digits.
pub fn target_ratio(d: &Rational, i: usize) -> Result<f64, CfError> {
    let cf = theta_for_dimension(d)?;
    let a = cf.a(2 * i + 1)?;
    let m = cf.a(2 * i + 2)?;
    let lm = ln_biguint(&(m + 1u32));
    Ok(lm / (ln_biguint(&a) + lm))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Irregularity {
    /// `m_k < (∏_{i<k} m_i)^ε` for every `k` from `N` through `checked`.
    Holds { checked: usize },
    ViolatedAt { k: usize },
}

impl Irregularity {
    pub fn holds(&self) -> bool {
        matches!(self, Irregularity::Holds { .. })
    }
}

/// Growth condition on branching counts, 0-indexed, compared in log space.
pub fn irregularity_check(m: &[BigUint], epsilon: f64, n: usize) -> Irregularity {
    let mut log_prod = 0.0;
    for (k, mk) in m.iter().enumerate() {
        let lk = ln_biguint(mk);
        if k >= n && lk >= epsilon * log_prod {
            return Irregularity::ViolatedAt { k };
        }
        log_prod += lk;
    }
    Irregularity::Holds { checked: m.len().saturating_sub(1) }
}

/// Truncated dimension ratios along a trajectory. Entry `n - 1` of each
/// sequence uses steps `0..n`.
#[derive(Clone, Debug, Serialize)]
pub struct DimEstimate {
    pub theta: String,
    pub depth: usize,
    pub ratio_sequence: Vec<f64>,
    pub lower_sequence: Vec<f64>,
    pub upper_sequence: Vec<f64>,
    /// Infimum of `ratio_sequence` past the burn-in.
    pub running_inf: Option<f64>,
    /// Limit of the ratio when the trajectory is eventually periodic.
    pub periodic_limit: Option<f64>,
    pub irregularity: Irregularity,
    pub irregular: bool,
    /// Set when digits ran out and the caller accepted a partial estimate.
    pub partial: Option<String>,
}

impl DimEstimate {
    pub fn final_ratio(&self) -> Option<f64> {
        self.ratio_sequence.last().copied()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,lower,ratio,upper")?;
        for (i, ((l, r), u)) in self.lower_sequence.iter().zip(&self.ratio_sequence).zip(&self.upper_sequence).enumerate() {
            writeln!(out, "{},{l:e},{r:e},{u:e}", i + 1)?;
        }
        Ok(())
    }
}

/// `−log δ` from the step's enclosure (midpoint; Flip steps contribute 0).
pub fn neg_log_f1(step: &RenormStep) -> f64 {
    match step.branch {
        Branch::Flip => 0.0,
        _ => -ln_rat(&step.delta.enclose_rel(64).midpoint()),
    }
}

pub fn log_f2(step: &RenormStep) -> f64 {
    ln_biguint(&step.f2)
}

fn quotient(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn dim_estimate(cf: &ContinuedFraction, depth: usize, allow_partial: bool) -> Result<DimEstimate, DimError> {
    if depth < 2 {
        return Err(DimError::Invalid("dim_estimate needs depth >= 2".into()));
    }
    let traj = renorm::trajectory(cf, depth);
    let partial = match &traj.stopped {
        Some(e) if !allow_partial => {
            return Err(DimError::PartialTrajectory { reached: traj.len(), depth, cause: e.clone() })
        }
        Some(e) => Some(e.to_string()),
        None => None,
    };
    Ok(estimate_from(cf, &traj, depth, partial))
}

fn estimate_from(cf: &ContinuedFraction, traj: &RenormTrajectory, depth: usize, partial: Option<String>) -> DimEstimate {
    let (mut num, mut den, mut den_lo, mut den_hi) = (0.0, 0.0, 0.0, 0.0);
    let mut ratio = Vec::with_capacity(traj.len());
    let mut lower = Vec::with_capacity(traj.len());
    let mut upper = Vec::with_capacity(traj.len());
    for step in &traj.steps {
        let (lo, hi) = step.neg_log_f1_bounds();
        num += log_f2(step);
        den += neg_log_f1(step);
        den_lo += lo;
        den_hi += hi;
        ratio.push(quotient(num, den));
        lower.push(quotient(num * (1.0 - NUDGE), den_hi * (1.0 + NUDGE)));
        upper.push(quotient(num * (1.0 + NUDGE), den_lo * (1.0 - NUDGE)));
    }
    let running_inf = ratio.iter().skip(RUNNING_INF_BURNIN).copied().reduce(f64::min);
    let periodic_limit = renorm::find_cycle(traj).map(|c| {
        let steps = &traj.steps[c.start..c.start + c.len];
        quotient(steps.iter().map(log_f2).sum(), steps.iter().map(neg_log_f1).sum())
    });
    let irregularity = irregularity_check(&traj.f2_sequence(), IRREGULAR_EPSILON, IRREGULAR_FROM);
    DimEstimate {
        theta: cf.descriptor(),
        depth,
        ratio_sequence: ratio,
        lower_sequence: lower,
        upper_sequence: upper,
        running_inf,
        irregular: !irregularity.holds(),
        irregularity,
        periodic_limit,
        partial,
    }
}

/// Monte Carlo estimate of `c = ∫ log f2 dμ_g / −∫ log f1 dμ_g`.
#[derive(Clone, Debug, Serialize)]
pub struct CEstimate {
    pub mean: f64,
    pub half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub used: usize,
    pub dropped: usize,
    pub burnin: usize,
    pub length: usize,
    pub bits: u64,
    pub seed: u64,
}

impl CEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("estimate serializes")
    }
}

/// Seed of sample `k`, a function of `(seed, k)` only.
pub fn sample_seed(seed: u64, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng.next_u64()
}

pub fn estimate_c(samples: usize, burnin: usize, length: usize, bits: u64, seed: u64) -> Result<CEstimate, DimError> {
    if length == 0 || samples == 0 {
        return Err(DimError::Invalid("samples and length must be positive".into()));
    }
    let sums: Vec<Option<(f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let theta = ContinuedFraction::random(sample_seed(seed, k), bits).ok()?;
            let traj = renorm::trajectory(&theta, burnin + length);
            if traj.stopped.is_some() {
                return None;
            }
            let steps = &traj.steps[burnin..];
            Some((steps.iter().map(log_f2).sum(), steps.iter().map(neg_log_f1).sum()))
        })
        .collect();
    let kept: Vec<(f64, f64)> = sums.iter().flatten().copied().collect();
    let n = kept.len();
    if n < 2 {
        return Err(DimError::Invalid(format!("only {n} samples survived the digit budget")));
    }
    let (sa, sb) = kept.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let c = sa / sb;
    // delta method for a ratio of means
    let mean_b = sb / n as f64;
    let var = kept.iter().map(|(a, b)| (a - c * b).powi(2)).sum::<f64>() / (n - 1) as f64;
    let half = Z95 * (var / n as f64).sqrt() / mean_b;
    Ok(CEstimate {
        mean: c,
        half_width: half,
        ci_low: c - half,
        ci_high: c + half,
        samples,
        used: n,
        dropped: samples - n,
        burnin,
        length,
        bits,
        seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointwiseReport {
    pub samples: usize,
    pub seed: u64,
    pub bits: u64,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    /// Samples whose digits ran out before δ could be enclosed.
    pub undecided: usize,
    pub counterexample: Option<String>,
}

/// Bits of each uniform θ in `(0, 1/2)` drawn by [`pointwise_inequality_check`].
pub const POINTWISE_BITS: u64 = 512;

/// Certifies `−log f1 > log f2` for one θ < 1/2, i.e. `δ·f2 < 1`.
pub fn pointwise_holds(theta: &ContinuedFraction) -> Result<bool, CfError> {
    let (delta, f2) = renorm::weights(theta)?;
    let a1 = theta.a(1)?;
    if a1.is_one() {
        return Err(CfError::Invalid("pointwise inequality needs θ < 1/2".into()));
    }
    // δ < 1/(2nm) for even a1 and δ < 1/(n+1) for odd a1
    if a1.bit(0) {
        return Ok(delta.upper() < Rational::one());
    }
    let m = f2.clone() - 1u32;
    let integer_route = &a1 * &m > f2;
    let product = delta.upper() * Rational::from_integer(f2.into());
    Ok(integer_route || product < Rational::one())
}

pub fn pointwise_inequality_check(samples: usize, seed: u64) -> PointwiseReport {
    let bound = BigUint::one() << (POINTWISE_BITS - 1);
    let outcomes: Vec<Result<bool, CfError>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, k));
            let mut num = rng.gen_biguint_below(&bound);
            if num.is_zero() {
                num = BigUint::one();
            }
            let theta = ContinuedFraction::dyadic(num, POINTWISE_BITS)?;
            pointwise_holds(&theta)
        })
        .collect();
    let mut report = PointwiseReport {
        samples,
        seed,
        bits: POINTWISE_BITS,
        checked: samples,
        passed: 0,
        failed: 0,
        undecided: 0,
        counterexample: None,
    };
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(true) => report.passed += 1,
            Ok(false) => {
                report.failed += 1;
                report.counterexample.get_or_insert_with(|| format!("sample {k}"));
            }
            Err(_) => report.undecided += 1,
        }
    }
    report
}

/// Truncations of `Σ_{n,m ≤ T} log m / ((2nm + 1)(2n(m + 1) + 1))` for each `T`.
pub fn log_integrability_sums(truncations: &[u64]) -> Vec<(u64, f64)> {
    truncations
        .iter()
        .map(|&t| {
            let s = (1..=t)
                .into_par_iter()
                .map(|n| {
                    (1..=t)
                        .map(|m| {
                            let (nf, mf) = (n as f64, m as f64);
                            mf.ln() / ((2.0 * nf * mf + 1.0) * (2.0 * nf * (mf + 1.0) + 1.0))
                        })
                        .sum::<f64>()
                })
                .sum();
            (t, s)
        })
        .collect()
}
