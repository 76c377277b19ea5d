//! Certified covers `E_i` of the heavy set, its isolated points, and the
//! strictly heavy point `h*`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cf_core::rational::{half, Rational};
use crate::cf_core::{CfError, ContinuedFraction, QuadraticReal, RatInterval, RatIntervalJson, Real};
use crate::renorm::{Branch, RenormTrajectory};

/// Relative precision kept on approximate interval endpoints.
const ENDPOINT_BITS: u64 = 200;

/// Refuse to materialize covers with more intervals than this.
pub const MAX_INTERVALS: usize = 2_000_000;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum HeavyError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error("cover at depth {depth} would have {count} intervals (limit {MAX_INTERVALS})")]
    TooLarge { depth: usize, count: String },
    #[error("malformed cover: {0}")]
    BadCover(String),
}

/// Closed interval with exact or enclosed endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub left: Real,
    pub right: Real,
    /// Index of the containing interval one level up.
    pub parent: usize,
}

impl Interval {
    /// Smallest rational interval certainly containing this one, with
    /// endpoints enclosed to absolute width `2^-abs_bits`.
    pub fn hull(&self, abs_bits: u64) -> RatInterval {
        RatInterval::new(self.left.enclose(abs_bits).lo().clone(), self.right.enclose(abs_bits).hi().clone())
    }
}

#[derive(Clone, Debug)]
pub struct LevelSet {
    pub depth: usize,
    /// Sorted, disjoint, each of length `length`.
    pub intervals: Vec<Interval>,
    /// `Δ_i / 2`
    pub length: Real,
    pub parity: u8,
}

#[derive(Clone, Debug)]
pub struct IsolatedPoint {
    pub value: Real,
    pub enclosure: RatInterval,
    /// First depth whose cover no longer contains the point.
    pub birth: usize,
    /// Interval of level `birth - 1` the point lies in.
    pub parent: usize,
}

#[derive(Clone, Debug)]
pub struct Levels {
    pub theta: String,
    pub levels: Vec<LevelSet>,
    pub trajectory: RenormTrajectory,
    /// Set when the requested depth could not be reached.
    pub partial: Option<CfError>,
}

impl Levels {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn deepest(&self) -> &LevelSet {
        self.levels.last().unwrap()
    }
}

/// `E_0, ..., E_depth` following the three-case decomposition:
/// keep on Flip, one sub-interval at the parity end on OddFold,
/// `a2 + 1` sub-intervals stepped by `Δ_{i+1}` on EvenDrop.
pub fn build_levels(cf: &ContinuedFraction, depth: usize) -> Result<Levels, HeavyError> {
    let traj = crate::renorm::trajectory(cf, depth);
    levels_from_trajectory(cf, traj)
}

pub fn levels_from_trajectory(cf: &ContinuedFraction, traj: RenormTrajectory) -> Result<Levels, HeavyError> {
    let e0 = LevelSet {
        depth: 0,
        intervals: vec![Interval { left: Real::zero(), right: Real::rational(half()), parent: 0 }],
        length: Real::rational(half()),
        parity: 0,
    };
    let mut levels = vec![e0];
    for step in &traj.steps {
        let i = step.index;
        let prev = &levels[i];
        let count = BigUint::from(prev.intervals.len()) * &step.f2;
        if count > BigUint::from(MAX_INTERVALS) {
            return Err(HeavyError::TooLarge { depth: i + 1, count: count.to_string() });
        }
        let delta_next = &traj.big_delta[i + 1];
        let len_next = delta_next.mul_rational(&half());
        let copies = match step.branch {
            Branch::Flip => 0,
            Branch::OddFold => 1,
            Branch::EvenDrop => step.f2.to_usize().unwrap(),
        };
        let mut intervals = Vec::with_capacity(count.to_usize().unwrap());
        for (k, parent) in prev.intervals.iter().enumerate() {
            if step.branch == Branch::Flip {
                intervals.push(Interval { parent: k, ..parent.clone() });
                continue;
            }
            let mut children: Vec<Interval> = (0..copies)
                .map(|j| {
                    let offset = delta_next.mul_rational(&Rational::from_integer(j.into()));
                    let (left, right) = if step.p == 0 {
                        let l = parent.left.add(&offset);
                        let r = l.add(&len_next);
                        (l, r)
                    } else {
                        let r = parent.right.sub(&offset);
                        let l = r.sub(&len_next);
                        (l, r)
                    };
                    Interval { left: left.rounded(ENDPOINT_BITS), right: right.rounded(ENDPOINT_BITS), parent: k }
                })
                .collect();
            if step.p == 1 {
                children.reverse();
            }
            intervals.extend(children);
        }
        let parity = traj.parity(i + 1);
        levels.push(LevelSet { depth: i + 1, intervals, length: len_next, parity });
    }
    Ok(Levels { theta: cf.descriptor(), levels, partial: traj.stopped.clone(), trajectory: traj })
}

#[derive(Clone, Debug)]
pub struct StrictHeavyResult {
    /// Certified enclosure of `h*`.
    pub enclosure: RatInterval,
    /// Closed form when θ is eventually periodic.
    pub exact: Option<QuadraticReal>,
    pub width: Rational,
    /// Renormalization steps used.
    pub depth: usize,
    /// Set when digits ran out before the tolerance was met.
    pub partial: Option<CfError>,
}

impl StrictHeavyResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "enclosure": RatIntervalJson::from(&self.enclosure),
            "exact": self.exact.as_ref().map(|q| q.to_string()),
            "width": crate::cf_core::RationalJson::from(&self.width),
            "depth": self.depth,
            "partial": self.partial.as_ref().map(|e| e.to_string()),
        })
    }

    pub fn value(&self) -> Real {
        match &self.exact {
            Some(q) => Real::Exact(q.clone()),
            None => Real::from(self.enclosure.clone()),
        }
    }
}

/// Contribution of step `i` to the left end of the strictly heavy nest:
/// `E*_{i+1}` sits at the high end of `E*_i` exactly when `p_{i+1} = 1`.
fn nest_shift(traj: &RenormTrajectory, i: usize) -> Option<Real> {
    (traj.parity(i + 1) == 1).then(|| traj.big_delta[i].sub(&traj.big_delta[i + 1]).mul_rational(&half()))
}

/// Cycle of the pair `(θ_i, p_i)`; after it the nest repeats scaled by `Δ_t / Δ_s`.
fn state_cycle(traj: &RenormTrajectory) -> Option<(usize, usize)> {
    let mut seen = std::collections::HashMap::new();
    for (i, s) in traj.steps.iter().enumerate() {
        let key = (s.theta.periodic_form()?, s.p);
        if let Some(&start) = seen.get(&key) {
            return Some((start, i));
        }
        seen.insert(key, i);
    }
    None
}

/// Exact `h*` of an eventually periodic θ.
fn strictly_heavy_exact(cf: &ContinuedFraction) -> Result<(QuadraticReal, RenormTrajectory), CfError> {
    let mut traj = RenormTrajectory::start(cf);
    let mut depth = 8;
    loop {
        traj.extend_to(depth);
        if let Some(e) = &traj.stopped {
            return Err(e.clone());
        }
        if let Some((s, t)) = state_cycle(&traj) {
            let exact = |r: Real| r.as_exact().cloned().expect("periodic θ gives exact δ");
            let sum = |range: std::ops::Range<usize>| {
                range.filter_map(|i| nest_shift(&traj, i)).fold(Real::zero(), |acc, x| acc.add(&x))
            };
            let pre = exact(sum(0..s));
            let cycle = exact(sum(s..t));
            let rho = exact(traj.big_delta[t].div(&traj.big_delta[s]).unwrap());
            let one_minus = (-&rho).add_rational(&Rational::one());
            let h = &pre + &(&cycle / &one_minus);
            return Ok((h, traj));
        }
        depth *= 2;
    }
}

/// The singleton `H*_θ`, enclosed to width `tol`.
pub fn strictly_heavy(cf: &ContinuedFraction, tol: &Rational) -> Result<StrictHeavyResult, CfError> {
    assert!(tol > &Rational::zero(), "tolerance must be positive");
    if cf.is_periodic() {
        let (h, traj) = strictly_heavy_exact(cf)?;
        let bits = tol_bits(tol) + 4;
        let mut enclosure = h.enclose(bits);
        // clip to the last nest interval so rounding never leaves it
        let nest = nest_enclosure(&traj, traj.len());
        enclosure = enclosure.intersect(&nest).unwrap_or(enclosure);
        let width = enclosure.width();
        return Ok(StrictHeavyResult { enclosure, exact: Some(h), width, depth: traj.len(), partial: None });
    }
    let mut traj = RenormTrajectory::start(cf);
    let mut left = Real::zero();
    let mut i = 0;
    loop {
        let iv = outer(&left, &traj.big_delta[i].mul_rational(&half()));
        if &iv.width() <= tol {
            let width = iv.width();
            return Ok(StrictHeavyResult { enclosure: iv, exact: None, width, depth: i, partial: None });
        }
        if !traj.extend_to(i + 1) {
            let width = iv.width();
            return Ok(StrictHeavyResult { enclosure: iv, exact: None, width, depth: i, partial: traj.stopped.clone() });
        }
        if let Some(shift) = nest_shift(&traj, i) {
            left = left.add(&shift).rounded(ENDPOINT_BITS);
        }
        i += 1;
    }
}

/// Outer rational enclosure of `[left, left + len]`.
fn outer(left: &Real, len: &Real) -> RatInterval {
    let lo = left.lower();
    let hi = left.upper() + len.upper();
    RatInterval::new(lo, hi)
}

/// Outer enclosure of `E*_d`.
fn nest_enclosure(traj: &RenormTrajectory, d: usize) -> RatInterval {
    let left = (0..d).filter_map(|i| nest_shift(traj, i)).fold(Real::zero(), |acc, x| acc.add(&x));
    outer(&left, &traj.big_delta[d].mul_rational(&half()))
}

fn tol_bits(tol: &Rational) -> u64 {
    let k = crate::cf_core::rational::ilog2_rat(tol);
    if k >= 0 {
        1
    } else {
        (-k) as u64 + 1
    }
}

/// Isolated points born up to the depth of `levels`: one per interval of
/// `E_i` at every step with `a1(θ_i)` odd `≠ 1`, or `a1` even and `a3 = 1`.
/// In local coordinates of its interval the point is `h*(θ_i) + θ_i`,
/// reflected when `p_i = 1`. Enclosures are at most `tol` wide.
pub fn isolated_points(levels: &Levels, tol: &Rational) -> Result<Vec<IsolatedPoint>, CfError> {
    let traj = &levels.trajectory;
    let mut out = Vec::new();
    for step in traj.steps.iter().filter(|s| s.spawns_isolated()) {
        let i = step.index;
        let scale = &traj.big_delta[i];
        let local_tol = tol / scale.upper() / Rational::from_integer(4.into());
        let h = strictly_heavy(&step.theta, &local_tol)?;
        let theta = step.theta.value(tol_bits(&local_tol) + 8)?;
        let local = h.value().add(&theta);
        let offset = scale.mul(&local);
        for (k, iv) in levels.levels[i].intervals.iter().enumerate() {
            let value = if step.p == 0 { iv.left.add(&offset) } else { iv.right.sub(&offset) };
            let value = value.rounded(ENDPOINT_BITS);
            let enclosure = value.enclose(tol_bits(tol) + 2);
            out.push(IsolatedPoint { value, enclosure, birth: i + 1, parent: k });
        }
    }
    Ok(out)
}

/// Whether `a_{2i+1}` is even for every `i < depth` (1-based digit indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OddEvenVerdict {
    HoldsSoFar { checked: usize },
    ViolatedAt { index: usize },
}

pub fn odd_even_criterion(cf: &ContinuedFraction, depth: usize) -> Result<OddEvenVerdict, CfError> {
    for i in 0..depth {
        let k = 2 * i + 1;
        if cf.a(k)?.is_odd() {
            return Ok(OddEvenVerdict::ViolatedAt { index: k });
        }
    }
    Ok(OddEvenVerdict::HoldsSoFar { checked: depth })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    /// In `E_depth`; `boundary` when `x` is an endpoint of its interval there.
    Inside { depth: usize, boundary: bool },
    Isolated { index: usize, birth: usize },
    /// First depth whose cover omits `x`.
    Excluded { depth: usize },
    /// `x` is within endpoint uncertainty at this depth.
    Ambiguous { depth: usize },
}

/// Classifies `x` against the covers and isolated points.
pub fn membership(levels: &Levels, isolated: &[IsolatedPoint], x: &Rational) -> Membership {
    for (index, pt) in isolated.iter().enumerate() {
        match pt.value.cmp_rational(x) {
            Some(Ordering::Equal) => return Membership::Isolated { index, birth: pt.birth },
            None if pt.enclosure.contains(x) => return Membership::Ambiguous { depth: pt.birth },
            _ => {}
        }
    }
    let mut parent: Option<usize> = None;
    let mut boundary = false;
    for level in &levels.levels {
        let range = match parent {
            None => 0..level.intervals.len(),
            Some(p) => {
                let lo = level.intervals.partition_point(|iv| iv.parent < p);
                let hi = level.intervals.partition_point(|iv| iv.parent <= p);
                lo..hi
            }
        };
        let mut found = None;
        for k in range {
            let iv = &level.intervals[k];
            let (Some(l), Some(r)) = (iv.left.cmp_rational(x), iv.right.cmp_rational(x)) else {
                return Membership::Ambiguous { depth: level.depth };
            };
            if l != Ordering::Greater && r != Ordering::Less {
                boundary = l == Ordering::Equal || r == Ordering::Equal;
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => parent = Some(k),
            None => return Membership::Excluded { depth: level.depth },
        }
    }
    Membership::Inside { depth: levels.depth(), boundary }
}

/// Rational form of the covers, as exported to JSON and consumed by the
/// oracle. Intervals are outer hulls; point enclosures are as computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub theta: String,
    pub depth: usize,
    pub levels: Vec<CoverLevel>,
    pub isolated: Vec<CoverPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverLevel {
    pub i: usize,
    pub parity: u8,
    /// Enclosure of the common interval length `Δ_i / 2`.
    pub length: RatInterval,
    pub intervals: Vec<CoverInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInterval {
    pub hull: RatInterval,
    pub parent: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPoint {
    pub enclosure: RatInterval,
    pub birth: usize,
    pub parent: usize,
}

/// Endpoint precision used when exact endpoints are exported.
pub const EXPORT_BITS: u64 = 128;

impl Levels {
    pub fn to_cover(&self, isolated: &[IsolatedPoint], abs_bits: u64) -> Cover {
        let levels = self
            .levels
            .iter()
            .map(|l| CoverLevel {
                i: l.depth,
                parity: l.parity,
                length: l.length.enclose(abs_bits),
                intervals: l
                    .intervals
                    .iter()
                    .map(|iv| CoverInterval { hull: iv.hull(abs_bits), parent: iv.parent })
                    .collect(),
            })
            .collect();
        let isolated = isolated
            .iter()
            .map(|p| CoverPoint { enclosure: p.enclosure.clone(), birth: p.birth, parent: p.parent })
            .collect();
        Cover { theta: self.theta.clone(), depth: self.depth(), levels, isolated }
    }
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    theta: String,
    depth: usize,
    levels: Vec<LevelJson>,
    isolated: Vec<PointJson>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    i: usize,
    parity: u8,
    length: RatIntervalJson,
    intervals: Vec<IntervalJson>,
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    lo: crate::cf_core::RationalJson,
    hi: crate::cf_core::RationalJson,
    parent: usize,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    enclosure: RatIntervalJson,
    birth: usize,
    parent: usize,
}

impl Cover {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = CoverJson {
            theta: self.theta.clone(),
            depth: self.depth,
            levels: self
                .levels
                .iter()
                .map(|l| LevelJson {
                    i: l.i,
                    parity: l.parity,
                    length: (&l.length).into(),
                    intervals: l
                        .intervals
                        .iter()
                        .map(|iv| IntervalJson { lo: iv.hull.lo().into(), hi: iv.hull.hi().into(), parent: iv.parent })
                        .collect(),
                })
                .collect(),
            isolated: self
                .isolated
                .iter()
                .map(|p| PointJson { enclosure: (&p.enclosure).into(), birth: p.birth, parent: p.parent })
                .collect(),
        };
        serde_json::to_value(doc).expect("cover serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Cover, HeavyError> {
        let doc: CoverJson = serde_json::from_value(value.clone()).map_err(|e| HeavyError::BadCover(e.to_string()))?;
        let bad = |what: &str| HeavyError::BadCover(what.to_string());
        let mut levels = Vec::new();
        for l in doc.levels {
            let length = l.length.to_interval().ok_or_else(|| bad("level length"))?;
            let mut intervals = Vec::new();
            for iv in l.intervals {
                let lo = iv.lo.to_rational().ok_or_else(|| bad("interval endpoint"))?;
                let hi = iv.hi.to_rational().ok_or_else(|| bad("interval endpoint"))?;
                if lo > hi {
                    return Err(bad("interval with lo > hi"));
                }
                intervals.push(CoverInterval { hull: RatInterval::new(lo, hi), parent: iv.parent });
            }
            levels.push(CoverLevel { i: l.i, parity: l.parity, length, intervals });
        }
        let isolated = doc
            .isolated
            .into_iter()
            .map(|p| {
                let enclosure = p.enclosure.to_interval().ok_or_else(|| bad("isolated point"))?;
                Ok(CoverPoint { enclosure, birth: p.birth, parent: p.parent })
            })
            .collect::<Result<Vec<_>, HeavyError>>()?;
        if levels.len() != doc.depth + 1 {
            return Err(bad("level count does not match depth"));
        }
        Ok(Cover { theta: doc.theta, depth: doc.depth, levels, isolated })
    }

    /// Open gaps removed when passing from level `i - 1` to level `i`, as
    /// rational intervals between consecutive children of each parent (and
    /// the parent's ends). Gaps are split at isolated points born at `i`.
    pub fn gaps(&self, i: usize) -> Vec<RatInterval> {
        assert!(i >= 1 && i <= self.depth);
        let parents = &self.levels[i - 1].intervals;
        let children = &self.levels[i].intervals;
        let mut out = Vec::new();
        let mut c = 0;
        for (k, parent) in parents.iter().enumerate() {
            // cut points of the parent: its ends, each child, each new point
            let mut pieces: Vec<RatInterval> = Vec::new();
            while c < children.len() && children[c].parent == k {
                pieces.push(children[c].hull.clone());
                c += 1;
            }
            pieces.extend(self.isolated.iter().filter(|p| p.birth == i && p.parent == k).map(|p| p.enclosure.clone()));
            pieces.sort_by(|a, b| a.lo().cmp(b.lo()));
            let mut cursor = parent.hull.lo().clone();
            for piece in pieces {
                if piece.lo() > &cursor {
                    out.push(RatInterval::new(cursor.clone(), piece.lo().clone()));
                }
                if piece.hi() > &cursor {
                    cursor = piece.hi().clone();
                }
            }
            if &cursor < parent.hull.hi() {
                out.push(RatInterval::new(cursor, parent.hull.hi().clone()));
            }
        }
        out
    }
}
