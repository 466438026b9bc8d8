//! Rotation numbers with prescribed growth of `M_n(0)` and `|m_n(0)|`, the
//! special point `x(theta)`, and heaviness witnesses.
//!
//! Synthesized expansions are digit generators. Before each decision the
//! generator walks the digits emitted so far to find where the
//! renormalization stops being determined (the frontier) and then picks the
//! next few digits from exact block statistics of the tower.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{
    g_cycle, is_heavy, renorm_trajectory, states, CaseTag, CfError, Digit, DigitStream, Generator, GeneratorSpec,
    Heaviness, PartialQuotients, RenormState,
};
use crate::encode::{zero_orbit_prefix, EncodeError};
use crate::oracle::{to_exact, Certified, ExactPoint};
use crate::quad::{QuadError, QuadSurd};
use crate::stats::ExtRational;
use crate::tower::{Block, Tower};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("no convergence after {0} levels")]
    NoConvergence(usize),
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

// ---------------------------------------------------------------- x(theta)

/// Pull-back `u -> alpha + beta u` of the induction maps.
#[derive(Clone)]
struct Affine {
    alpha: QuadSurd,
    beta: QuadSurd,
}

impl Affine {
    fn id() -> Self {
        Affine { alpha: QuadSurd::from_int(0), beta: QuadSurd::from_int(1) }
    }

    /// `self` composed with the inverse induction map of `st`.
    fn then(&self, st: &RenormState) -> Result<Self, SynthError> {
        if st.case == CaseTag::One {
            return Ok(Affine { alpha: self.alpha.add(&self.beta)?, beta: self.beta.neg() });
        }
        let t = to_exact(&st.theta).to_quad().ok_or(CfError::Rational)?;
        let delta = QuadSurd::from_int(1).sub(&QuadSurd::from_int(st.e_value as i64).mul(&t)?)?;
        Ok(Affine { alpha: self.alpha.clone(), beta: self.beta.mul(&delta)? })
    }
}

/// `x(theta)`: exact `0` for heavy expansions, the fixed point of the cycle
/// map for periodic ones, and a certified midpoint otherwise.
pub fn x_of_theta(theta: &PartialQuotients, tolerance: &BigRational) -> Result<ExactPoint, SynthError> {
    theta.require_irrational()?;
    if is_heavy(theta, 0) == Heaviness::Yes {
        return Ok(ExactPoint::zero());
    }
    if let Some((pre, per)) = theta.is_periodic().then(|| g_cycle(theta, 100_000)).flatten() {
        let st = renorm_trajectory(theta, pre + per)?;
        let outer = st[..pre].iter().try_fold(Affine::id(), |f, s| f.then(s))?;
        let cycle = st[pre..pre + per].iter().try_fold(Affine::id(), |f, s| f.then(s))?;
        let fixed = cycle.alpha.div(&QuadSurd::from_int(1).sub(&cycle.beta)?)?;
        let x = outer.alpha.add(&outer.beta.mul(&fixed)?)?;
        return Ok(match x.to_rational() {
            Some(r) => ExactPoint::Rational(r),
            None => ExactPoint::Quadratic(x),
        });
    }
    x_of_theta_numeric(theta, tolerance)
}

const MAX_LEVELS: usize = 20_000;

/// Interval version: fixed-point enclosures of every `theta_n`, outward
/// rounding, stopped once the pulled-back interval is narrower than
/// `tolerance`.
pub fn x_of_theta_numeric(theta: &PartialQuotients, tolerance: &BigRational) -> Result<ExactPoint, SynthError> {
    if !tolerance.is_positive() {
        return Err(SynthError::InvalidTarget("tolerance must be positive".into()));
    }
    let need = tolerance.denom().bits().saturating_sub(tolerance.numer().bits()) as u32;
    let bits = need + 64;
    let scale = BigInt::one() << bits;
    let (mut alo, mut ahi) = (BigInt::zero(), BigInt::zero());
    let (mut blo, mut bhi) = (scale.clone(), scale.clone());
    let target = tolerance * BigRational::from_integer(scale.clone());
    for (n, st) in states(theta).enumerate().take(MAX_LEVELS) {
        let st = st?;
        if st.case == CaseTag::One {
            (alo, ahi) = (&alo + &blo, &ahi + &bhi);
            (blo, bhi) = (-bhi, -blo);
        } else {
            let (tlo, thi) = to_exact(&st.theta).enclose(bits);
            let e = BigInt::from(st.e_value);
            let (dlo, dhi) = (&scale - &e * &thi, &scale - &e * &tlo);
            let prods = [&blo * &dlo, &blo * &dhi, &bhi * &dlo, &bhi * &dhi];
            let lo = prods.iter().min().expect("four").div_floor(&scale);
            let hi = -((-prods.iter().max().expect("four")).div_floor(&scale));
            (blo, bhi) = (lo, hi);
        }
        let lo = &alo + blo.clone().min(BigInt::zero());
        let hi = &ahi + bhi.clone().max(BigInt::zero());
        if BigRational::from_integer(&hi - &lo) < target {
            let s = BigRational::from_integer(scale.clone());
            return Ok(ExactPoint::Certified(Certified {
                approx: BigRational::new(&lo + &hi, BigInt::from(2) * &scale),
                radius: BigRational::from_integer(&hi - &lo) / (s * BigRational::from_integer(2.into())),
                source: None,
            }));
        }
        if n + 1 == MAX_LEVELS {
            break;
        }
    }
    Err(SynthError::NoConvergence(MAX_LEVELS))
}

/// Result of [`heaviness_witness`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Witness {
    HeavyConsistent { checked: usize },
    Counterexample { n: usize, s: i64 },
}

/// First `n <= big_n` with `S_n(theta) < 0`, using `S_n(theta) = S_{n+1}(0) - 1`.
pub fn heaviness_witness(theta: &PartialQuotients, big_n: usize) -> Result<Witness, SynthError> {
    let w = zero_orbit_prefix(theta, big_n + 1)?;
    let sign = if theta.digit(0)? == 1 { -1 } else { 1 };
    let mut s = 0i64;
    for (i, l) in w.letters().iter().enumerate() {
        s += l.value(sign);
        // s = S_{i+1}(0)
        if i >= 1 && s - 1 < 0 {
            return Ok(Witness::Counterexample { n: i, s: s - 1 });
        }
    }
    Ok(Witness::HeavyConsistent { checked: big_n })
}

// ---------------------------------------------------------------- targets

/// Integer-valued nondecreasing target sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthSequence {
    /// `ceil(scale * n^(1/degree))`
    Root { degree: u32, scale: u64 },
    /// `ceil(scale * ln n)`, at least 1
    Log { scale: u64 },
    Constant(u64),
}

impl GrowthSequence {
    pub fn at(&self, n: &BigUint) -> i128 {
        match self {
            GrowthSequence::Root { degree, scale } => {
                let v = BigUint::from(*scale).pow(*degree) * n;
                let r = v.nth_root(*degree);
                let r = if r.pow(*degree) < v { r + 1u32 } else { r };
                r.to_i128().unwrap_or(i128::MAX)
            }
            GrowthSequence::Log { scale } => {
                let shift = n.bits().saturating_sub(60);
                let top = (n >> shift).to_f64().unwrap_or(1.0).max(1.0);
                let ln = top.ln() + shift as f64 * std::f64::consts::LN_2;
                ((*scale as f64 * ln).ceil() as i128).max(1)
            }
            GrowthSequence::Constant(v) => *v as i128,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, GrowthSequence::Constant(_))
    }

    fn validate(&self) -> Result<(), SynthError> {
        match self {
            GrowthSequence::Root { degree: 0, .. } => Err(SynthError::InvalidTarget("root degree must be positive".into())),
            GrowthSequence::Root { scale: 0, .. } | GrowthSequence::Log { scale: 0 } => {
                Err(SynthError::InvalidTarget("scale must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Targets `c` for `M_n(0)` and `d` for `|m_n(0)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTarget {
    pub c: GrowthSequence,
    pub d: GrowthSequence,
    #[serde(default)]
    pub prefix: Vec<Digit>,
}

impl GrowthTarget {
    fn validate(&self) -> Result<(), SynthError> {
        self.c.validate()?;
        self.d.validate()?;
        if self.c.is_bounded() && self.d.is_bounded() {
            return Err(SynthError::InvalidTarget("at least one of c, d must diverge".into()));
        }
        if self.prefix.contains(&0) {
            return Err(SynthError::InvalidTarget("prefix digits must be positive".into()));
        }
        Ok(())
    }
}

/// Accumulation interval `[r1, r2]` for `M_n(0) / |m_n(0)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioTarget {
    pub r1: ExtRational,
    pub r2: ExtRational,
    pub prefix: Vec<Digit>,
    /// size of the first targets `d_1`
    pub scale: u64,
}

fn ext_f64(r: &ExtRational) -> f64 {
    match r {
        ExtRational::Finite(q) => q.to_f64().unwrap_or(f64::INFINITY),
        ExtRational::Infinite => f64::INFINITY,
    }
}

pub fn parse_ext(s: &str) -> Result<ExtRational, SynthError> {
    let bad = || SynthError::InvalidTarget(format!("bad ratio `{s}`"));
    let s = s.trim();
    if matches!(s, "inf" | "infinity" | "oo") {
        return Ok(ExtRational::Infinite);
    }
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p.trim().parse().map_err(|_| bad())?, q)
        }
        None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
    };
    if r.is_negative() {
        return Err(bad());
    }
    Ok(ExtRational::Finite(r))
}

impl RatioTarget {
    fn validate(&self) -> Result<(), SynthError> {
        if ext_f64(&self.r1) > ext_f64(&self.r2) {
            return Err(SynthError::InvalidTarget("need r1 <= r2".into()));
        }
        if self.prefix.contains(&0) {
            return Err(SynthError::InvalidTarget("prefix digits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RatioParams {
    r1: String,
    r2: String,
    #[serde(default)]
    prefix: Vec<Digit>,
    #[serde(default = "default_scale")]
    scale: u64,
}

fn default_scale() -> u64 {
    32
}

// ---------------------------------------------------------------- frontier

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// no digits left for `theta_n`
    Empty,
    /// `theta_n = [1]`
    One,
    /// even head, `a2` or `a3` missing; carries how many digits are known
    Even(usize),
}

#[derive(Debug, Clone)]
struct Frontier {
    kind: Kind,
    index: usize,
    parity: bool,
    /// running `M` and `m` of the zero orbit through the determined states
    max: i128,
    min: i128,
}

fn frontier(digits: &[Digit]) -> Frontier {
    let (mut i, mut head) = (0usize, digits.first().copied());
    let (mut n, mut parity, mut max, mut min) = (0usize, false, 1i128, 1i128);
    let mut add = |parity: bool, h: Digit| {
        if parity {
            min -= (h / 2) as i128;
        } else {
            max += (h / 2) as i128;
        }
    };
    loop {
        let left = digits.len() - i;
        let Some(h) = head.filter(|_| left > 0) else {
            return Frontier { kind: Kind::Empty, index: n, parity, max, min };
        };
        if h == 1 {
            if left < 2 {
                return Frontier { kind: Kind::One, index: n, parity, max, min };
            }
            i += 1;
            head = Some(digits[i] + 1);
            parity = !parity;
        } else if h % 2 == 1 {
            add(parity, h);
            head = Some(1);
        } else {
            if left < 3 {
                return Frontier { kind: Kind::Even(left), index: n, parity, max, min };
            }
            add(parity, h);
            i += 2;
            head = digits.get(i).copied();
        }
        n += 1;
    }
}

fn zero_block_with(digits: &[Digit], extra: &[Digit], level: usize) -> Block {
    let mut all = digits.to_vec();
    all.extend_from_slice(extra);
    let theta = PartialQuotients::finite(all).expect("positive digits");
    let mut t = Tower::new(&theta).expect("nonempty digits");
    t.zero_block(level).expect("candidate digits determine the word")
}

/// Smallest `k >= 1` with `pred(k)`, for a predicate that stays true once true.
fn minimal(mut pred: impl FnMut(u64) -> bool) -> u64 {
    const CAP: u64 = 1 << 61;
    let mut hi = 1;
    while !pred(hi) {
        if hi >= CAP {
            return CAP;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // pred(lo) false (or lo == 0), pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Which extremum a phase drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stat {
    Max,
    Min,
}

impl Stat {
    fn of(parity: bool) -> Stat {
        if parity {
            Stat::Min
        } else {
            Stat::Max
        }
    }

    /// `(M, first time)` or `(-m, first time)`.
    fn read(self, b: &Block) -> (i128, &BigUint) {
        match self {
            Stat::Max => (b.max, &b.t_max),
            Stat::Min => (-b.min, &b.t_min),
        }
    }
}

// ---------------------------------------------------------------- growth

/// Neutral continuation after a candidate: keeps every level the candidate
/// touches determined without feeding the driven extremum.
const PAD: [Digit; 4] = [1, 1, 1, 1];

struct GrowthPlanner {
    target: GrowthTarget,
}

impl GrowthPlanner {
    fn seq(&self, s: Stat) -> &GrowthSequence {
        match s {
            Stat::Max => &self.target.c,
            Stat::Min => &self.target.d,
        }
    }

    fn plan(&self, digits: &[Digit]) -> Vec<Digit> {
        let f = frontier(digits);
        match (self.target.c.is_bounded(), self.target.d.is_bounded()) {
            (false, false) => self.alternate(digits, &f),
            (false, true) => self.heavy(digits, &f, false),
            _ => self.heavy(digits, &f, true),
        }
    }

    /// `val >= target(first time val is reached)` for the level-`level`
    /// zero-orbit block after `cand`.
    fn reaches(&self, stat: Stat, digits: &[Digit], cand: &[Digit], level: usize) -> bool {
        let w = zero_block_with(digits, &[cand, &PAD[..]].concat(), level);
        let (v, at) = stat.read(&w);
        v >= self.seq(stat).at(at)
    }

    /// `target(length) >= val` at the end of the level-`level` block.
    fn below(&self, stat: Stat, digits: &[Digit], cand: &[Digit], level: usize) -> bool {
        let w = zero_block_with(digits, &[cand, &PAD[..]].concat(), level);
        self.seq(stat).at(&w.len) >= stat.read(&w).0
    }

    /// Both targets unbounded. At a `[1, ..]` frontier either raise the
    /// extremum of the coming parity (odd head `2k + 1`) or, once it is
    /// already on target, hold with `[2, j, 1]` to stretch lengths by `j`.
    /// Both moves end on another `[1, ..]` state, so the phases alternate.
    fn alternate(&self, digits: &[Digit], f: &Frontier) -> Vec<Digit> {
        match f.kind {
            Kind::Empty => vec![1],
            Kind::Even(1) => vec![1, 1],
            Kind::Even(_) => vec![1],
            Kind::One => {
                let n = f.index;
                let stat = Stat::of(!f.parity);
                if self.below(stat, digits, &[], n) {
                    vec![2 * minimal(|k| self.reaches(stat, digits, &[2 * k], n + 1))]
                } else {
                    vec![1, minimal(|j| self.below(stat, digits, &[1, j, 1], n + 2)), 1]
                }
            }
        }
    }

    /// One target bounded: keep the parity at `locked` with even heads so
    /// only the other extremum moves. Heads `2k` raise it by `k`; the
    /// second digit `j` of each state stretches the next level.
    fn heavy(&self, digits: &[Digit], f: &Frontier, locked: bool) -> Vec<Digit> {
        let stat = Stat::of(locked);
        let head = |cand: &dyn Fn(u64) -> Vec<Digit>, level: usize| {
            minimal(|k| self.reaches(stat, digits, &cand(k), level))
        };
        match f.kind {
            Kind::Empty if f.parity == locked => vec![2 * head(&|k| vec![2 * k, 1], f.index)],
            Kind::Empty => vec![1],
            Kind::One if !f.parity == locked => vec![2 * head(&|k| vec![2 * k - 1, 1], f.index + 1) - 1],
            Kind::One => vec![2],
            Kind::Even(1) if f.parity == locked => {
                vec![minimal(|j| self.below(stat, digits, &[j, 2, 1], f.index + 1))]
            }
            Kind::Even(_) if f.parity == locked => vec![2 * head(&|k| vec![2 * k, 1], f.index + 1)],
            Kind::Even(1) => vec![1, 1],
            Kind::Even(_) => vec![1],
        }
    }
}

// ---------------------------------------------------------------- ratio

enum RatioPlan {
    /// parity locked; pure `2` blocks
    Locked(bool),
    Steer(Steer),
}

/// Greedy oscillator for `M / |m|` between two targets.
struct Steer {
    lo: Option<f64>,
    hi: Option<f64>,
    scale: u64,
    aim_high: bool,
    window: u32,
}

impl Steer {
    fn bounds(&self) -> (f64, f64) {
        let w = self.window as f64 + 2.0;
        (self.lo.unwrap_or(1.0 / w), self.hi.unwrap_or(w))
    }

    fn target(&self) -> f64 {
        let (lo, hi) = self.bounds();
        if self.aim_high {
            hi
        } else {
            lo
        }
    }

    fn cap(&self) -> i128 {
        let (lo, hi) = self.bounds();
        4 * hi.max(1.0 / lo).ceil() as i128 + 4
    }

    fn plan(&mut self, digits: &[Digit]) -> Vec<Digit> {
        let f = frontier(digits);
        match f.kind {
            Kind::Empty => vec![1],
            Kind::Even(1) => vec![1, 1],
            Kind::Even(_) => vec![1],
            Kind::One => {
                let (m, d) = (f.max, -f.min);
                let r = self.target();
                let s = self.scale as i128;
                let raises_max = f.parity;
                let delta = if raises_max {
                    let goal = if d < s { s } else { (r * d as f64).round() as i128 };
                    let step = goal - m;
                    if m < s { step.max(1) } else { step.clamp(1, self.cap()) }
                } else {
                    let goal = if d < s { s } else { (m as f64 / r).round() as i128 };
                    let step = goal - d;
                    if d < s { step.max(1) } else { step.clamp(1, self.cap()) }
                };
                let (m2, d2) = if raises_max { (m + delta, d) } else { (m, d + delta) };
                let (lo, hi) = self.bounds();
                if d2 >= s && lo != hi {
                    let now = m2 as f64 / d2 as f64;
                    let eps = 0.05 / (1.0 + self.window as f64);
                    if (now / r - 1.0).abs() <= eps {
                        self.aim_high = !self.aim_high;
                        self.window += 1;
                    }
                }
                vec![2 * delta as Digit]
            }
        }
    }
}

impl RatioPlan {
    fn new(t: &RatioTarget) -> Self {
        let fin = |r: &ExtRational| match r {
            ExtRational::Finite(q) => Some(q.to_f64().unwrap_or(0.0)),
            ExtRational::Infinite => None,
        };
        match (fin(&t.r1), fin(&t.r2)) {
            (None, _) => RatioPlan::Locked(false),
            (Some(a), Some(b)) if a == 0.0 && b == 0.0 => RatioPlan::Locked(true),
            (a, b) => RatioPlan::Steer(Steer {
                lo: a.filter(|&v| v > 0.0),
                hi: b,
                scale: t.scale.max(1),
                aim_high: false,
                window: 0,
            }),
        }
    }

    fn plan(&mut self, digits: &[Digit]) -> Vec<Digit> {
        match self {
            RatioPlan::Steer(s) => s.plan(digits),
            RatioPlan::Locked(locked) => {
                let f = frontier(digits);
                let locked = *locked;
                match f.kind {
                    Kind::Empty if locked => vec![1, 1],
                    Kind::Empty => vec![2],
                    Kind::One if !f.parity == locked => vec![1],
                    Kind::One => vec![2],
                    Kind::Even(1) if f.parity == locked => vec![2, 2],
                    Kind::Even(_) if f.parity == locked => vec![2],
                    Kind::Even(1) => vec![1, 1],
                    Kind::Even(_) => vec![1],
                }
            }
        }
    }
}

// ---------------------------------------------------------------- streams

enum Planner {
    Growth(GrowthPlanner),
    Ratio(RatioPlan),
}

struct SynthStream {
    planner: Planner,
    emitted: Vec<Digit>,
    queue: VecDeque<Digit>,
}

impl SynthStream {
    fn new(planner: Planner, prefix: &[Digit]) -> Self {
        SynthStream { planner, emitted: Vec::new(), queue: prefix.iter().copied().collect() }
    }
}

impl DigitStream for SynthStream {
    fn next_digit(&mut self) -> Result<Digit, CfError> {
        while self.queue.is_empty() {
            let more = match &mut self.planner {
                Planner::Growth(g) => g.plan(&self.emitted),
                Planner::Ratio(r) => r.plan(&self.emitted),
            };
            self.queue.extend(more);
        }
        let d = self.queue.pop_front().expect("refilled");
        self.emitted.push(d);
        Ok(d)
    }
}

fn bad(e: impl ToString) -> CfError {
    CfError::BadParams(e.to_string())
}

/// Generator `growth`; params are a serialized [`GrowthTarget`].
pub fn growth_generator(spec: &GeneratorSpec) -> Result<Generator, CfError> {
    let target: GrowthTarget = serde_json::from_value(spec.params.clone()).map_err(bad)?;
    target.validate().map_err(bad)?;
    Ok(Generator::new(spec.clone(), move || {
        let p = GrowthPlanner { target: target.clone() };
        Box::new(SynthStream::new(Planner::Growth(p), &target.prefix))
    }))
}

/// Generator `ratio`; params `{"r1": "1", "r2": "inf", "prefix": [..], "scale": 32}`.
pub fn ratio_generator(spec: &GeneratorSpec) -> Result<Generator, CfError> {
    let p: RatioParams = serde_json::from_value(spec.params.clone()).map_err(bad)?;
    let target = RatioTarget {
        r1: parse_ext(&p.r1).map_err(bad)?,
        r2: parse_ext(&p.r2).map_err(bad)?,
        prefix: p.prefix,
        scale: p.scale,
    };
    target.validate().map_err(bad)?;
    Ok(Generator::new(spec.clone(), move || {
        Box::new(SynthStream::new(Planner::Ratio(RatioPlan::new(&target)), &target.prefix))
    }))
}

fn with_spec(name: &str, params: serde_json::Value) -> Result<PartialQuotients, SynthError> {
    let spec = GeneratorSpec { name: name.into(), params, skip: 0 };
    let g = crate::generators::build(&spec)?;
    Ok(PartialQuotients::with_generator(vec![], Arc::new(g))?)
}

/// Rotation number whose `M_n(0)` and `|m_n(0)|` follow `c` and `d`.
pub fn growth_theta(target: &GrowthTarget) -> Result<PartialQuotients, SynthError> {
    target.validate()?;
    with_spec("growth", serde_json::to_value(target).expect("serializable"))
}

fn ext_string(r: &ExtRational) -> String {
    r.to_string()
}

/// Rotation number whose ratio `M_n(0) / |m_n(0)|` accumulates on `[r1, r2]`.
pub fn ratio_theta(target: &RatioTarget) -> Result<PartialQuotients, SynthError> {
    target.validate()?;
    let params = RatioParams {
        r1: ext_string(&target.r1),
        r2: ext_string(&target.r2),
        prefix: target.prefix.clone(),
        scale: target.scale,
    };
    with_spec("ratio", serde_json::to_value(params).expect("serializable"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::closed_form_zero;

    fn tol() -> BigRational {
        BigRational::new(1.into(), BigInt::from(10u64).pow(15))
    }

    #[test]
    fn x_golden() {
        let x = x_of_theta(&PartialQuotients::golden(), &tol()).unwrap();
        let want = QuadSurd::new(1.into(), 1.into(), 4.into(), 5.into()).unwrap();
        assert_eq!(x.to_quad().unwrap(), want);
        let num = x_of_theta_numeric(&PartialQuotients::golden(), &tol()).unwrap();
        assert!((num.to_f64() - want.to_f64()).abs() < 1e-14);
    }

    #[test]
    fn x_heavy_is_zero() {
        let x = x_of_theta(&PartialQuotients::sqrt2(), &tol()).unwrap();
        assert!(x.to_quad().unwrap().is_zero());
        let num = x_of_theta_numeric(&PartialQuotients::sqrt2(), &tol()).unwrap();
        assert!(num.to_f64().abs() < 1e-14);
    }

    #[test]
    fn witnesses() {
        assert_eq!(
            heaviness_witness(&PartialQuotients::sqrt2(), 1000).unwrap(),
            Witness::HeavyConsistent { checked: 1000 }
        );
        assert!(matches!(heaviness_witness(&PartialQuotients::golden(), 100).unwrap(), Witness::Counterexample { .. }));
    }

    #[test]
    fn frontier_kinds() {
        assert_eq!(frontier(&[]).kind, Kind::Empty);
        assert_eq!(frontier(&[3]).kind, Kind::One);
        let f = frontier(&[2, 2, 2, 2]);
        assert_eq!((f.kind, f.index), (Kind::Even(2), 1));
        assert_eq!(f.max, 2);
        let g = frontier(&[1, 1]);
        assert_eq!((g.kind, g.index, g.parity), (Kind::Even(1), 1, true));
    }

    #[test]
    fn minimal_search() {
        assert_eq!(minimal(|k| k >= 37), 37);
        assert_eq!(minimal(|_| true), 1);
    }

    #[test]
    fn growth_prefix_and_heavy_lock() {
        let t = GrowthTarget { c: GrowthSequence::Root { degree: 2, scale: 1 }, d: GrowthSequence::Constant(1), prefix: vec![3, 1] };
        let th = growth_theta(&t).unwrap();
        assert_eq!(th.first(2).unwrap(), vec![3, 1]);
        let th = growth_theta(&GrowthTarget { prefix: vec![], ..t }).unwrap();
        for n in 0..12 {
            assert_eq!(closed_form_zero(&th, n).unwrap().min, 1);
        }
    }

    #[test]
    fn locked_ratios() {
        let inf = RatioTarget { r1: ExtRational::Infinite, r2: ExtRational::Infinite, prefix: vec![], scale: 32 };
        assert_eq!(ratio_theta(&inf).unwrap().first(6).unwrap(), vec![2; 6]);
        let zero = ExtRational::Finite(BigRational::zero());
        let z = RatioTarget { r1: zero.clone(), r2: zero, prefix: vec![], scale: 32 };
        assert_eq!(ratio_theta(&z).unwrap().first(6).unwrap(), vec![1, 1, 2, 2, 2, 2]);
    }
}
