//! Lazy continued-fraction digit streams `θ = [a1, a2, ...] = 1/(a1 + 1/(a2 + ...))`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::error::CfError;
use super::interval::RatInterval;
use super::quadratic::QuadraticReal;
use super::rational::{pow2_neg, Rational};
use super::real::Real;

/// Default bit precision of a uniformly drawn θ.
pub const DEFAULT_RANDOM_BITS: u64 = 4096;

/// Named digit generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `[2!, 1, 3!, 1, 4!, 1, ...]`
    FactorialInterleaved,
    /// `e - 2 = [1, 2, 1, 1, 4, 1, 1, 6, 1, ...]`
    EMinus2,
    /// `[s, s + t, s + 2t, ...]`; `arith(2,4)` is `(e - 1)/(e + 1)`.
    Arith { start: BigUint, step: BigUint },
    /// `[2n_0, m_0, 2n_1, m_1, ...]` with `m_i = 2^i` and
    /// `n_i = 1 + floor((m_i + 1)^(1/d - 1) / 2)`, for `0 < d <= 1`.
    TargetD { d: Rational },
}

impl Rule {
    /// Partial quotient `a_k`, `k >= 1`.
    pub fn digit(&self, k: usize) -> BigUint {
        assert!(k >= 1);
        match self {
            Rule::FactorialInterleaved => {
                if k % 2 == 1 {
                    let m = (k + 1) / 2 + 1;
                    (2..=m).fold(BigUint::one(), |acc, j| acc * BigUint::from(j))
                } else {
                    BigUint::one()
                }
            }
            Rule::EMinus2 => {
                if k % 3 == 2 {
                    BigUint::from(2 * (k + 1) / 3)
                } else {
                    BigUint::one()
                }
            }
            Rule::Arith { start, step } => start + step * BigUint::from(k - 1),
            Rule::TargetD { d } => {
                let i = (k - 1) / 2;
                let m = BigUint::one() << i;
                if k % 2 == 0 {
                    m
                } else {
                    target_d_n(d, &m) * 2u32
                }
            }
        }
    }

    pub fn literal(&self) -> String {
        match self {
            Rule::FactorialInterleaved => "factorial_interleaved".into(),
            Rule::EMinus2 => "e_minus_2".into(),
            Rule::Arith { start, step } => format!("arith({start},{step})"),
            Rule::TargetD { d } => format!("target_d({d})"),
        }
    }
}

/// `n = 1 + floor((m + 1)^(1/d - 1) / 2)` with exact integer roots.
pub(crate) fn target_d_n(d: &Rational, m: &BigUint) -> BigUint {
    // 1/d - 1 = (den - num) / num
    let num = d.numer().to_biguint().expect("d > 0");
    let den = d.denom().to_biguint().unwrap();
    let a = &den - &num;
    let g = a.gcd(&num);
    let (a, b) = if a.is_zero() { (BigUint::zero(), BigUint::one()) } else { (&a / &g, &num / &g) };
    let a = a.to_u32().expect("exponent numerator too large");
    let b = b.to_u32().expect("exponent denominator too large");
    let power = num_traits::pow(m + 1u32, a as usize);
    let root = power.nth_root(b);
    BigUint::one() + (root >> 1u32)
}

/// Where the digits come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backing {
    FiniteRational { num: BigUint, den: BigUint },
    PeriodicQuadratic { preperiod: Vec<BigUint>, period: Vec<BigUint> },
    Rule(Rule),
    /// Uniform real in (0,1) known to `bits` binary digits, drawn from `seed`.
    RandomBits { seed: u64, bits: u64 },
    /// Real in `[numerator / 2^bits, (numerator + 1) / 2^bits]`.
    Dyadic { numerator: BigUint, bits: u64 },
    /// Fixed digit prefix; reading past it exhausts the budget.
    Frozen(Vec<BigUint>),
}

enum GenState {
    Stateless,
    /// Remaining value `num / den` of a rational expansion.
    Euclid { num: BigUint, den: BigUint },
    /// Remaining value known to lie in `[lo_n/lo_d, hi_n/hi_d]`.
    Bracket { lo_n: BigUint, lo_d: BigUint, hi_n: BigUint, hi_d: BigUint },
    Done(CfError),
}

struct DigitSource {
    backing: Backing,
    cache: Vec<BigUint>,
    state: GenState,
}

impl DigitSource {
    fn new(backing: Backing) -> Self {
        let state = match &backing {
            Backing::FiniteRational { num, den } => GenState::Euclid { num: num.clone(), den: den.clone() },
            Backing::RandomBits { seed, bits } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut n = BigUint::zero();
                while n.is_zero() {
                    n = rng.gen_biguint(*bits);
                }
                bracket_state(&n, *bits)
            }
            Backing::Dyadic { numerator, bits } => bracket_state(numerator, *bits),
            _ => GenState::Stateless,
        };
        DigitSource { backing, cache: Vec::new(), state }
    }

    /// Partial quotient at 0-based position `j`.
    fn get(&mut self, j: usize) -> Result<BigUint, CfError> {
        while self.cache.len() <= j {
            let k = self.cache.len() + 1;
            let next = self.generate(k)?;
            self.cache.push(next);
        }
        Ok(self.cache[j].clone())
    }

    fn generate(&mut self, k: usize) -> Result<BigUint, CfError> {
        match &self.backing {
            Backing::PeriodicQuadratic { preperiod, period } => {
                let j = k - 1;
                return Ok(if j < preperiod.len() {
                    preperiod[j].clone()
                } else {
                    period[(j - preperiod.len()) % period.len()].clone()
                });
            }
            Backing::Rule(rule) => return Ok(rule.digit(k)),
            Backing::Frozen(digits) => {
                return digits.get(k - 1).cloned().ok_or(CfError::BudgetExhausted { index: k });
            }
            _ => {}
        }
        let state = std::mem::replace(&mut self.state, GenState::Stateless);
        let (digit, next) = match state {
            GenState::Done(e) => (Err(e.clone()), GenState::Done(e)),
            GenState::Euclid { num, den } => {
                if num.is_zero() {
                    let e = CfError::RationalTerminated { index: k };
                    (Err(e.clone()), GenState::Done(e))
                } else {
                    let (a, rem) = den.div_rem(&num);
                    (Ok(a), GenState::Euclid { num: rem, den: num })
                }
            }
            GenState::Bracket { lo_n, lo_d, hi_n, hi_d } => {
                // digit of x is floor(1/x); certified when both ends agree
                if lo_n.is_zero() || hi_n.is_zero() {
                    let e = CfError::BudgetExhausted { index: k };
                    (Err(e.clone()), GenState::Done(e))
                } else {
                    let a_lo = &lo_d / &lo_n;
                    let a_hi = &hi_d / &hi_n;
                    if a_lo != a_hi || a_lo.is_zero() {
                        let e = CfError::BudgetExhausted { index: k };
                        (Err(e.clone()), GenState::Done(e))
                    } else {
                        // x' = 1/x - a reverses orientation
                        let next = GenState::Bracket {
                            lo_n: &hi_d - &a_hi * &hi_n,
                            lo_d: hi_n,
                            hi_n: &lo_d - &a_lo * &lo_n,
                            hi_d: lo_n,
                        };
                        (Ok(a_lo), next)
                    }
                }
            }
            GenState::Stateless => unreachable!("stateless backings handled above"),
        };
        self.state = next;
        digit
    }
}

fn bracket_state(numerator: &BigUint, bits: u64) -> GenState {
    let den = BigUint::one() << bits;
    GenState::Bracket {
        lo_n: numerator.clone(),
        lo_d: den.clone(),
        hi_n: numerator + 1u32,
        hi_d: den,
    }
}

/// A lazily evaluated continued-fraction expansion of some θ in (0,1).
///
/// The stream is a (possibly rewritten) head followed by the digits of a
/// shared source from `offset` on. Renormalization edits only the head, so
/// the tail is never recomputed. Cloning shares the memoized source digits.
#[derive(Clone)]
pub struct ContinuedFraction {
    source: Arc<Mutex<DigitSource>>,
    label: Arc<str>,
    head: Vec<BigUint>,
    offset: usize,
}

impl fmt::Debug for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuedFraction").field("descriptor", &self.descriptor()).finish()
    }
}

impl ContinuedFraction {
    pub fn from_backing(backing: Backing, label: impl Into<String>) -> Result<Self, CfError> {
        match &backing {
            Backing::FiniteRational { num, den } => {
                if num.is_zero() || num >= den {
                    return Err(CfError::Invalid(format!("{num}/{den} is not in (0,1)")));
                }
            }
            Backing::PeriodicQuadratic { preperiod, period } => {
                if period.is_empty() {
                    return Err(CfError::Invalid("empty period".into()));
                }
                if preperiod.iter().chain(period).any(Zero::is_zero) {
                    return Err(CfError::Invalid("partial quotients must be positive".into()));
                }
            }
            Backing::Rule(Rule::TargetD { d }) => {
                if d <= &Rational::zero() || d > &Rational::one() {
                    return Err(CfError::Invalid(format!("target dimension {d} outside (0,1]")));
                }
            }
            Backing::Rule(Rule::Arith { start, .. }) if start.is_zero() => {
                return Err(CfError::Invalid("arith start must be positive".into()));
            }
            Backing::RandomBits { bits, .. } | Backing::Dyadic { bits, .. } if *bits == 0 => {
                return Err(CfError::Invalid("bit budget must be positive".into()));
            }
            Backing::Dyadic { numerator, bits } => {
                if numerator.is_zero() || numerator + 1u32 > BigUint::one() << *bits {
                    return Err(CfError::Invalid("dyadic numerator outside (0, 2^bits)".into()));
                }
            }
            Backing::Frozen(d) if d.iter().any(Zero::is_zero) => {
                return Err(CfError::Invalid("partial quotients must be positive".into()));
            }
            _ => {}
        }
        Ok(ContinuedFraction {
            source: Arc::new(Mutex::new(DigitSource::new(backing))),
            label: label.into().into(),
            head: Vec::new(),
            offset: 0,
        })
    }

    pub fn rational(num: u64, den: u64) -> Result<Self, CfError> {
        Self::rational_big(BigUint::from(num), BigUint::from(den))
    }

    pub fn rational_big(num: BigUint, den: BigUint) -> Result<Self, CfError> {
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (&num / &g, &den / &g) };
        let label = format!("{num}/{den}");
        Self::from_backing(Backing::FiniteRational { num, den }, label)
    }

    /// Rational with the given finite expansion `[a1, ..., ak]`.
    pub fn from_finite_digits(digits: &[u64]) -> Result<Self, CfError> {
        if digits.is_empty() || digits.contains(&0) {
            return Err(CfError::Invalid("finite expansion needs positive digits".into()));
        }
        let (p, q) = convergent(digits.iter().map(|&a| BigUint::from(a)));
        let label = format!("[{}]", join(digits.iter()));
        let g = p.gcd(&q);
        Self::from_backing(Backing::FiniteRational { num: p / &g, den: q / g }, label)
    }

    pub fn periodic(preperiod: &[u64], period: &[u64]) -> Result<Self, CfError> {
        let pre: Vec<BigUint> = preperiod.iter().map(|&a| BigUint::from(a)).collect();
        let per: Vec<BigUint> = period.iter().map(|&a| BigUint::from(a)).collect();
        Self::periodic_big(pre, per)
    }

    pub fn periodic_big(preperiod: Vec<BigUint>, period: Vec<BigUint>) -> Result<Self, CfError> {
        let label = periodic_literal(&preperiod, &period);
        Self::from_backing(Backing::PeriodicQuadratic { preperiod, period }, label)
    }

    pub fn rule(rule: Rule) -> Result<Self, CfError> {
        let label = format!("rule:{}", rule.literal());
        Self::from_backing(Backing::Rule(rule), label)
    }

    pub fn random(seed: u64, bits: u64) -> Result<Self, CfError> {
        Self::from_backing(Backing::RandomBits { seed, bits }, format!("random({seed},{bits})"))
    }

    pub fn dyadic(numerator: BigUint, bits: u64) -> Result<Self, CfError> {
        let label = format!("dyadic({numerator},{bits})");
        Self::from_backing(Backing::Dyadic { numerator, bits }, label)
    }

    /// Literal the stream was created from (before any head edits).
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn backing(&self) -> Backing {
        self.source.lock().unwrap().backing.clone()
    }

    /// Describes the current stream, including renormalization edits.
    pub fn descriptor(&self) -> String {
        if let Some((pre, per)) = self.periodic_form() {
            return periodic_literal(&pre, &per);
        }
        if self.head.is_empty() && self.offset == 0 {
            return self.label.to_string();
        }
        let head = if self.head.is_empty() { String::new() } else { format!("[{}]++", join(self.head.iter())) };
        format!("{head}{}>>{}", self.label, self.offset)
    }

    /// Partial quotient at 0-based position `j` of the current stream.
    fn at(&self, j: usize) -> Result<BigUint, CfError> {
        if j < self.head.len() {
            return Ok(self.head[j].clone());
        }
        let src_j = self.offset + j - self.head.len();
        self.source.lock().unwrap().get(src_j).map_err(|e| self.reindex(e, src_j, j))
    }

    fn reindex(&self, e: CfError, src_j: usize, j: usize) -> CfError {
        let shift = |index: usize| index + j - src_j;
        match e {
            CfError::BudgetExhausted { index } => CfError::BudgetExhausted { index: shift(index) },
            CfError::RationalTerminated { index } => CfError::RationalTerminated { index: shift(index) },
            other => other,
        }
    }

    /// Partial quotient `a_i` (1-based).
    pub fn a(&self, i: usize) -> Result<BigUint, CfError> {
        assert!(i >= 1, "partial quotients are 1-indexed");
        self.at(i - 1)
    }

    /// First `k` partial quotients `a_1..a_k`.
    pub fn digits(&self, k: usize) -> Result<Vec<BigUint>, CfError> {
        (0..k).map(|j| self.at(j)).collect()
    }

    /// Like [`digits`](Self::digits) but returns whatever prefix is available.
    pub fn digits_available(&self, k: usize) -> Vec<BigUint> {
        (0..k).map_while(|j| self.at(j).ok()).collect()
    }

    pub fn digits_u64(&self, k: usize) -> Result<Vec<u64>, CfError> {
        Ok(self.digits(k)?.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect())
    }

    /// Drops the first `n` partial quotients.
    pub fn drop_front(&self, n: usize) -> Result<Self, CfError> {
        // the dropped digits must exist
        if n > 0 {
            self.at(n - 1)?;
        }
        let mut out = self.clone();
        let from_head = n.min(out.head.len());
        out.head.drain(..from_head);
        out.offset += n - from_head;
        Ok(out)
    }

    pub fn prepend(&self, digit: BigUint) -> Self {
        assert!(!digit.is_zero());
        let mut out = self.clone();
        out.head.insert(0, digit);
        out
    }

    pub fn increment_leading(&self) -> Result<Self, CfError> {
        let lead = self.at(0)?;
        let mut out = self.drop_front(1)?;
        out.head.insert(0, lead + 1u32);
        Ok(out)
    }

    /// Gauss map: `[a1, a2, ...] -> [a2, a3, ...]`.
    pub fn gauss(&self) -> Result<Self, CfError> {
        // γ is only defined while a digit remains after a1
        self.at(1).map_err(|e| match e {
            CfError::RationalTerminated { .. } => CfError::RationalTerminated { index: 2 },
            other => other,
        })?;
        self.drop_front(1)
    }

    /// A stream fixed to its first `k` digits; immutable and shareable.
    pub fn snapshot(&self, k: usize) -> Result<Self, CfError> {
        let digits = self.digits(k)?;
        Self::from_backing(Backing::Frozen(digits), format!("snapshot({},{k})", self.descriptor()))
    }

    /// `(preperiod, period)` of the current stream in canonical form, if the
    /// source is periodic.
    pub fn periodic_form(&self) -> Option<(Vec<BigUint>, Vec<BigUint>)> {
        let src = self.source.lock().unwrap();
        let Backing::PeriodicQuadratic { preperiod, period } = &src.backing else {
            return None;
        };
        let mut pre = self.head.clone();
        let per: Vec<BigUint> = if self.offset < preperiod.len() {
            pre.extend_from_slice(&preperiod[self.offset..]);
            period.clone()
        } else {
            let s = (self.offset - preperiod.len()) % period.len();
            period[s..].iter().chain(&period[..s]).cloned().collect()
        };
        Some(canonical_periodic(pre, per))
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic_form().is_some()
    }

    fn finite_backing(&self) -> bool {
        matches!(self.source.lock().unwrap().backing, Backing::FiniteRational { .. })
    }

    /// Number of digits of a rational stream, or `None` for infinite streams.
    pub fn finite_len(&self) -> Option<usize> {
        if !self.finite_backing() {
            return None;
        }
        let mut j = 0;
        loop {
            match self.at(j) {
                Ok(_) => j += 1,
                Err(_) => return Some(j),
            }
        }
    }

    /// Exact value of an eventually periodic stream.
    pub fn value_quadratic(&self) -> Result<QuadraticReal, CfError> {
        let (pre, per) = self.periodic_form().ok_or(CfError::NotPeriodic)?;
        Ok(periodic_value(&pre, &per))
    }

    /// Exact value of a rational stream.
    pub fn value_rational(&self) -> Result<Rational, CfError> {
        let n = self.finite_len().ok_or(CfError::Invalid("stream is not rational".into()))?;
        let (p, q) = convergent(self.digits(n)?.into_iter());
        Ok(Rational::new(p.into(), q.into()))
    }

    /// Enclosure from the consecutive convergents `p_{n-1}/q_{n-1}` and
    /// `p_n/q_n`. For a rational stream of exactly `n` digits the enclosure
    /// degenerates to the value itself.
    pub fn bounds(&self, n: usize) -> Result<RatInterval, CfError> {
        assert!(n >= 1, "bounds need at least one digit");
        let digits = self.digits(n)?;
        let mut conv = Convergents::new();
        for d in &digits {
            conv.push(d);
        }
        if self.finite_backing() && self.at(n).is_err() {
            return Ok(RatInterval::point(conv.current()));
        }
        Ok(conv.bracket())
    }

    /// Narrowest convergent enclosure of width at most `width`, or the
    /// narrowest available when the digits run out first. The flag reports
    /// whether `width` was met.
    pub fn enclose_best(&self, width: &Rational) -> Result<(RatInterval, bool), CfError> {
        let mut conv = Convergents::new();
        let mut j = 0;
        loop {
            match self.at(j) {
                Ok(d) => conv.push(&d),
                Err(CfError::RationalTerminated { .. }) if j > 0 => {
                    return Ok((RatInterval::point(conv.current()), true));
                }
                Err(e) if j == 0 => return Err(e),
                Err(_) => return Ok((conv.bracket(), false)),
            }
            j += 1;
            if conv.bracket_width() <= *width {
                if self.finite_backing() && self.at(j).is_err() {
                    return Ok((RatInterval::point(conv.current()), true));
                }
                return Ok((conv.bracket(), true));
            }
        }
    }

    /// Convergent enclosure of width at most `width`.
    pub fn enclose(&self, width: &Rational) -> Result<RatInterval, CfError> {
        let (iv, met) = self.enclose_best(width)?;
        if met {
            Ok(iv)
        } else {
            let have = self.digits_available(usize::MAX).len();
            Err(CfError::BudgetExhausted { index: have + 1 })
        }
    }

    /// Numeric value: exact for periodic and rational streams, otherwise the
    /// best enclosure with relative width up to `2^-rel_bits`.
    pub fn value(&self, rel_bits: u64) -> Result<Real, CfError> {
        if self.is_periodic() {
            return Ok(Real::Exact(self.value_quadratic()?));
        }
        if self.finite_backing() {
            return Ok(Real::rational(self.value_rational()?));
        }
        // θ > 1/(a1 + 1)
        let a1 = self.at(0)?;
        let width = pow2_neg(rel_bits) / Rational::from_integer(BigInt::from(a1 + 1u32));
        let (iv, _) = self.enclose_best(&width)?;
        Ok(Real::from(iv))
    }

    /// Exact ordering of θ against a rational.
    pub fn compare(&self, x: &Rational) -> Result<Ordering, CfError> {
        if self.is_periodic() {
            return Ok(self.value_quadratic()?.cmp_rational(x));
        }
        if self.finite_backing() {
            return Ok(self.value_rational()?.cmp(x));
        }
        let mut conv = Convergents::new();
        let mut j = 0;
        loop {
            let d = self.at(j)?;
            conv.push(&d);
            j += 1;
            let br = conv.bracket();
            // θ is irrational, so it lies strictly inside the bracket
            if x <= br.lo() {
                return Ok(Ordering::Greater);
            }
            if x >= br.hi() {
                return Ok(Ordering::Less);
            }
        }
    }
}

/// Incremental convergents `p_k/q_k` of `[a1, a2, ...]`.
pub(crate) struct Convergents {
    p_prev: BigUint,
    q_prev: BigUint,
    p: BigUint,
    q: BigUint,
}

impl Convergents {
    pub(crate) fn new() -> Self {
        // (p_{-1}, q_{-1}) = (1, 0), (p_0, q_0) = (0, 1)
        Convergents {
            p_prev: BigUint::one(),
            q_prev: BigUint::zero(),
            p: BigUint::zero(),
            q: BigUint::one(),
        }
    }

    pub(crate) fn push(&mut self, a: &BigUint) {
        let p = a * &self.p + &self.p_prev;
        let q = a * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p);
        self.q_prev = std::mem::replace(&mut self.q, q);
    }

    pub(crate) fn current(&self) -> Rational {
        Rational::new(self.p.clone().into(), self.q.clone().into())
    }

    fn previous(&self) -> Rational {
        Rational::new(self.p_prev.clone().into(), self.q_prev.clone().into())
    }

    pub(crate) fn bracket(&self) -> RatInterval {
        RatInterval::spanning(self.previous(), self.current())
    }

    /// `1 / (q_k q_{k-1})`
    pub(crate) fn bracket_width(&self) -> Rational {
        Rational::new(BigInt::one(), (&self.q * &self.q_prev).into())
    }
}

/// `(p_k, q_k)` of a finite expansion.
pub(crate) fn convergent(digits: impl Iterator<Item = BigUint>) -> (BigUint, BigUint) {
    let mut c = Convergents::new();
    for d in digits {
        c.push(&d);
    }
    (c.p, c.q)
}

/// Value of `[pre; (period)]`. The purely periodic tail `y` solves
/// `y = (P + y P') / (Q + y Q')` for the period's last two convergents.
fn periodic_value(pre: &[BigUint], period: &[BigUint]) -> QuadraticReal {
    let mut c = Convergents::new();
    for d in period {
        c.push(d);
    }
    let big = |u: &BigUint| BigInt::from(u.clone());
    let (p, pp, q, qp) = (big(&c.p), big(&c.p_prev), big(&c.q), big(&c.q_prev));
    // Q' y^2 + (Q - P') y - P = 0, positive root
    let b = &q - &pp;
    let disc = &b * &b + BigInt::from(4) * &qp * &p;
    let y = QuadraticReal::new(-b, BigInt::one(), BigInt::from(2) * &qp, disc);
    if pre.is_empty() {
        return y;
    }
    let mut c = Convergents::new();
    for d in pre {
        c.push(d);
    }
    let k = |u: &BigUint| QuadraticReal::from_rational(&Rational::from_integer(big(u)));
    let num = &k(&c.p) + &(&y * &k(&c.p_prev));
    let den = &k(&c.q) + &(&y * &k(&c.q_prev));
    &num / &den
}

/// Minimal period, then absorbs trailing preperiod digits into the period.
fn canonical_periodic(mut pre: Vec<BigUint>, mut per: Vec<BigUint>) -> (Vec<BigUint>, Vec<BigUint>) {
    let n = per.len();
    if let Some(t) = (1..=n).find(|&t| n % t == 0 && (t..n).all(|i| per[i] == per[i - t])) {
        per.truncate(t);
    }
    while let Some(last) = pre.last() {
        if last != per.last().unwrap() {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    (pre, per)
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    it.map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn periodic_literal(pre: &[BigUint], per: &[BigUint]) -> String {
    format!("[{};({})]", join(pre.iter()), join(per.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::rational::rat;

    fn u(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn finite_rational_digits() {
        let cf = ContinuedFraction::rational(5, 7).unwrap();
        assert_eq!(cf.digits(3).unwrap(), u(&[1, 2, 2]));
        assert_eq!(cf.digits(4), Err(CfError::RationalTerminated { index: 4 }));
        assert_eq!(cf.bounds(3).unwrap(), RatInterval::point(rat(5, 7)));
        assert_eq!(cf.value_rational().unwrap(), rat(5, 7));
        assert!(ContinuedFraction::rational(7, 5).is_err());
    }

    #[test]
    fn rule_digits() {
        let e2 = ContinuedFraction::rule(Rule::EMinus2).unwrap();
        assert_eq!(e2.digits_u64(9).unwrap(), vec![1, 2, 1, 1, 4, 1, 1, 6, 1]);
        let fact = ContinuedFraction::rule(Rule::FactorialInterleaved).unwrap();
        assert_eq!(fact.digits_u64(8).unwrap(), vec![2, 1, 6, 1, 24, 1, 120, 1]);
        let beta = ContinuedFraction::rule(Rule::Arith { start: 2u32.into(), step: 4u32.into() }).unwrap();
        assert_eq!(beta.digits_u64(5).unwrap(), vec![2, 6, 10, 14, 18]);
    }

    #[test]
    fn target_d_digits() {
        let half = ContinuedFraction::rule(Rule::TargetD { d: rat(1, 2) }).unwrap();
        assert_eq!(half.digits_u64(10).unwrap(), vec![4, 1, 4, 2, 6, 4, 10, 8, 18, 16]);
        let one = ContinuedFraction::rule(Rule::TargetD { d: rat(1, 1) }).unwrap();
        assert_eq!(one.digits_u64(8).unwrap(), vec![2, 1, 2, 2, 2, 4, 2, 8]);
        assert!(ContinuedFraction::rule(Rule::TargetD { d: rat(0, 1) }).is_err());
    }

    #[test]
    fn periodic_values() {
        let s = ContinuedFraction::periodic(&[], &[2]).unwrap();
        assert_eq!(s.digits_u64(5).unwrap(), vec![2; 5]);
        assert_eq!(s.value_quadratic().unwrap().to_string(), "-1 + √2");
        let h = ContinuedFraction::periodic(&[1], &[2]).unwrap();
        assert_eq!(h.value_quadratic().unwrap().to_string(), "√2/2");
        let t = ContinuedFraction::periodic(&[3], &[2]).unwrap();
        // 1/(2 + √2) = (2 - √2)/2
        assert_eq!(t.value_quadratic().unwrap().to_string(), "(2 - √2)/2");
    }

    #[test]
    fn canonical_periodic_form() {
        let a = ContinuedFraction::periodic(&[2, 2], &[2, 2]).unwrap();
        assert_eq!(a.periodic_form().unwrap(), (vec![], u(&[2])));
        let b = ContinuedFraction::periodic(&[1, 3], &[1, 2, 3]).unwrap();
        assert_eq!(b.periodic_form().unwrap(), (u(&[1]), u(&[3, 1, 2])));
        let c = b.drop_front(3).unwrap();
        assert_eq!(c.periodic_form().unwrap(), (vec![], u(&[2, 3, 1])));
    }

    #[test]
    fn head_edits() {
        let s = ContinuedFraction::periodic(&[1], &[2]).unwrap();
        let flipped = s.drop_front(1).unwrap().increment_leading().unwrap();
        assert_eq!(flipped.digits_u64(4).unwrap(), vec![3, 2, 2, 2]);
        let folded = flipped.drop_front(1).unwrap().prepend(BigUint::one());
        assert_eq!(folded.digits_u64(4).unwrap(), vec![1, 2, 2, 2]);
        assert_eq!(folded.descriptor(), "[1;(2)]");
    }

    #[test]
    fn gauss_shift() {
        let e2 = ContinuedFraction::rule(Rule::EMinus2).unwrap();
        assert_eq!(e2.gauss().unwrap().digits_u64(4).unwrap(), vec![2, 1, 1, 4]);
        let beta = ContinuedFraction::rule(Rule::Arith { start: 2u32.into(), step: 4u32.into() }).unwrap();
        assert_eq!(beta.gauss().unwrap().digits_u64(3).unwrap(), vec![6, 10, 14]);
        let s = ContinuedFraction::periodic(&[], &[2]).unwrap();
        assert_eq!(s.gauss().unwrap().periodic_form(), s.periodic_form());
        let r = ContinuedFraction::rational(1, 3).unwrap();
        assert_eq!(r.gauss().unwrap_err(), CfError::RationalTerminated { index: 2 });
    }

    #[test]
    fn bounds_bracket() {
        let s = ContinuedFraction::periodic(&[], &[2]).unwrap();
        let b = s.bounds(2).unwrap();
        assert_eq!((b.lo(), b.hi()), (&rat(2, 5), &rat(1, 2)));
        let h = ContinuedFraction::periodic(&[1], &[2]).unwrap();
        let b = h.bounds(3).unwrap();
        assert_eq!((b.lo(), b.hi()), (&rat(2, 3), &rat(5, 7)));
        let v = h.value_quadratic().unwrap();
        assert_eq!(v.cmp_rational(b.lo()), Ordering::Greater);
        assert_eq!(v.cmp_rational(b.hi()), Ordering::Less);
    }

    #[test]
    fn compare_against_rationals() {
        let s = ContinuedFraction::periodic(&[], &[2]).unwrap();
        assert_eq!(s.compare(&rat(1, 2)).unwrap(), Ordering::Less);
        assert_eq!(s.compare(&rat(2, 5)).unwrap(), Ordering::Greater);
        let h = ContinuedFraction::periodic(&[1], &[2]).unwrap();
        assert_eq!(h.compare(&rat(1, 2)).unwrap(), Ordering::Greater);
        let e2 = ContinuedFraction::rule(Rule::EMinus2).unwrap();
        assert_eq!(e2.compare(&rat(71828, 100000)).unwrap(), Ordering::Greater);
        assert_eq!(e2.compare(&rat(71829, 100000)).unwrap(), Ordering::Less);
    }

    #[test]
    fn random_bits_budget() {
        let r = ContinuedFraction::random(7, 64).unwrap();
        let available = r.digits_available(1000);
        assert!(available.len() > 5 && available.len() < 64);
        assert!(r.a(available.len() + 1).unwrap_err().is_budget());
        // every digit certified is shared by both ends of the dyadic interval
        let again = ContinuedFraction::random(7, 64).unwrap();
        assert_eq!(again.digits_available(1000), available);
    }

    #[test]
    fn snapshot_is_frozen() {
        let e2 = ContinuedFraction::rule(Rule::EMinus2).unwrap();
        let snap = e2.snapshot(5).unwrap();
        assert_eq!(snap.digits_u64(5).unwrap(), vec![1, 2, 1, 1, 4]);
        assert!(snap.a(6).unwrap_err().is_budget());
    }
}
