//! Ground truth: code the orbit `x, x + theta, ...` by direct rotation.
//!
//! Letters are decided in 128-bit fixed point with an explicit error window.
//! When a point falls inside the window of a partition endpoint the decision
//! is redone exactly (same quadratic field) or by refining certified
//! enclosures. Endpoints belong to the interval on their right.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{CfError, PartialQuotients, Tail};
use crate::quad::{QuadError, QuadSurd};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("comparison at orbit index {0} could not be separated at maximum precision")]
    UndecidableComparison(u64),
    #[error("theta must be irrational")]
    RationalTheta,
    #[error("words differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot parse point `{0}`")]
    BadPoint(String),
    #[error("n must be positive")]
    ZeroLength,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Cf(#[from] CfError),
}

/// Refinement cap for certified comparisons, in bits.
pub const MAX_BITS: u32 = 8192;

/// Rational approximation with an error bound, optionally backed by digits
/// that allow refining it on demand.
#[derive(Clone, Debug)]
pub struct Certified {
    pub approx: BigRational,
    pub radius: BigRational,
    pub source: Option<PartialQuotients>,
}

impl Certified {
    /// A zero radius marks an exactly known rational.
    pub fn is_rational(&self) -> bool {
        self.radius.is_zero()
    }
}

/// A point of `[0, 1)`.
#[derive(Clone, Debug)]
pub enum ExactPoint {
    Rational(BigRational),
    Quadratic(QuadSurd),
    Certified(Certified),
}

fn floor_ratio(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

fn ceil_ratio(r: &BigRational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

impl ExactPoint {
    pub fn zero() -> Self {
        ExactPoint::Rational(BigRational::zero())
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        ExactPoint::Rational(BigRational::new(p.into(), q.into()))
    }

    /// Exact value when one is available.
    pub fn to_quad(&self) -> Option<QuadSurd> {
        match self {
            ExactPoint::Rational(r) => Some(QuadSurd::from_ratio(r)),
            ExactPoint::Quadratic(q) => Some(q.clone()),
            ExactPoint::Certified(c) if c.is_rational() => Some(QuadSurd::from_ratio(&c.approx)),
            ExactPoint::Certified(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactPoint::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactPoint::Quadratic(q) => q.to_f64(),
            ExactPoint::Certified(c) => c.approx.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_quad().is_some_and(|q| q.is_rational())
    }

    /// `(lo, hi)` with `lo <= value * 2^bits <= hi`.
    pub fn enclose(&self, bits: u32) -> (BigInt, BigInt) {
        match self {
            ExactPoint::Rational(r) => {
                let s = r * BigRational::from_integer(BigInt::one() << bits);
                (floor_ratio(&s), ceil_ratio(&s))
            }
            ExactPoint::Quadratic(q) => {
                let f = q.floor_scaled(bits);
                let hi = &f + 1;
                (f, hi)
            }
            ExactPoint::Certified(c) => match &c.source {
                Some(theta) => enclose_digits(theta, bits),
                None => {
                    let scale = BigRational::from_integer(BigInt::one() << bits);
                    (floor_ratio(&((&c.approx - &c.radius) * &scale)), ceil_ratio(&((&c.approx + &c.radius) * &scale)))
                }
            },
        }
    }
}

/// The value lies between `p_k / q_k` and the mediant with `p_{k-1} / q_{k-1}`,
/// whatever the digits after index `k`.
fn enclose_digits(theta: &PartialQuotients, bits: u32) -> (BigInt, BigInt) {
    let target = BigUint::one() << (bits / 2 + 2);
    let (mut pp, mut qp) = (BigUint::one(), BigUint::zero());
    let (mut p, mut q) = (BigUint::zero(), BigUint::one());
    for (pk, qk) in theta.convergents() {
        (pp, qp) = (std::mem::replace(&mut p, pk), std::mem::replace(&mut q, qk));
        if q > target {
            break;
        }
    }
    let a = BigRational::new(p.clone().into(), q.clone().into());
    let b = BigRational::new((p + pp).into(), (q + qp).into());
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let scale = BigRational::from_integer(BigInt::one() << bits);
    (floor_ratio(&(lo * &scale)), ceil_ratio(&(hi * &scale)))
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactPoint::Rational(r) => write!(f, "{r}"),
            ExactPoint::Quadratic(q) => write!(f, "{q}"),
            ExactPoint::Certified(c) if c.is_rational() => write!(f, "{}", c.approx),
            ExactPoint::Certified(c) => write!(f, "{} +- {}", c.approx, c.radius),
        }
    }
}

impl FromStr for ExactPoint {
    type Err = OracleError;

    /// `p/q`, an integer, a decimal like `0.25`, or `quad:a,b,c,d` for
    /// `(a + b sqrt(d)) / c`. Values are reduced mod 1.
    fn from_str(s: &str) -> Result<Self, OracleError> {
        let bad = || OracleError::BadPoint(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("quad:") {
            let v: Vec<BigInt> = rest.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
            let [a, b, c, d] = <[BigInt; 4]>::try_from(v).map_err(|_| bad())?;
            let q = QuadSurd::new(a, b, c, d)?.fract();
            return Ok(ExactPoint::Quadratic(q));
        }
        let r = if let Some((p, q)) = s.split_once('/') {
            let (p, q): (BigInt, BigInt) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        } else if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let int: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let num: BigInt = frac.parse().map_err(|_| bad())?;
            let fr = BigRational::new(num, den);
            BigRational::from_integer(int.clone()) + if neg || int.is_negative() { -fr } else { fr }
        } else {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        };
        Ok(ExactPoint::Rational(&r - BigRational::from_integer(floor_ratio(&r))))
    }
}

/// Tail value `y = [period, period, ...]` solves `q' y^2 + (q - p') y - p = 0`.
fn periodic_surd(prefix: &[u64], period: &[u64]) -> Result<QuadSurd, QuadError> {
    let conv = |digits: &[u64]| {
        // (p_{k-1}, q_{k-1}, p_k, q_k)
        let (mut pp, mut qp, mut p, mut q) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
        for &a in digits {
            let a = BigInt::from(a);
            (pp, qp, p, q) = (p.clone(), q.clone(), &a * &p + &pp, &a * &q + &qp);
        }
        (pp, qp, p, q)
    };
    let (pp, qp, p, q) = conv(period);
    let lin = &q - &pp;
    let disc = &lin * &lin + BigInt::from(4) * &qp * &p;
    let y = QuadSurd::new(-lin, BigInt::one(), BigInt::from(2) * &qp, disc)?;
    let (pp, qp, p, q) = conv(prefix);
    let int = |v: &BigInt| QuadSurd::rational(v.clone(), BigInt::one());
    // theta = (p + p' y) / (q + q' y)
    let num = int(&p).add(&int(&pp).mul(&y)?)?;
    let den = int(&q).add(&int(&qp).mul(&y)?)?;
    num.div(&den)
}

/// Exact value when the expansion is eventually periodic; a certified
/// approximation otherwise. Finite expansions give an exact rational.
pub fn to_exact(theta: &PartialQuotients) -> ExactPoint {
    match theta.tail() {
        Tail::Periodic(period) => ExactPoint::Quadratic(periodic_surd(theta.prefix(), period).expect("valid periodic expansion")),
        Tail::None => {
            let (p, q) = theta.convergents().last().unwrap_or((BigUint::zero(), BigUint::one()));
            ExactPoint::Certified(Certified {
                approx: BigRational::new(p.into(), q.into()),
                radius: BigRational::zero(),
                source: None,
            })
        }
        Tail::Generator { .. } => {
            let (p, q) = theta.convergents().take(64).last().unwrap_or((BigUint::zero(), BigUint::one()));
            let radius = BigRational::new(BigInt::one(), BigInt::from(&q * &q));
            ExactPoint::Certified(Certified { approx: BigRational::new(p.into(), q.into()), radius, source: Some(theta.clone()) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Zero,
    Half,
    OneMinusTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointHit {
    pub index: u64,
    pub endpoint: Endpoint,
    pub side: Side,
}

/// Endpoint convention: each partition endpoint belongs to the interval on
/// its right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    LeftClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingResult {
    #[serde(with = "word_string")]
    pub word: Word,
    pub endpoint_hits: Vec<EndpointHit>,
    pub convention: Convention,
}

mod word_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::word::Word;

    pub fn serialize<S: Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(w)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

const HALF: u128 = 1 << 127;

/// Partition position of `y` given `1 - theta`; valid for any `y` off the
/// endpoints and for exact endpoints under the left-closed rule.
fn classify<T: PartialOrd>(y: &T, half: &T, k: &T, below_half: bool) -> Letter {
    if below_half {
        if y < half {
            Letter::A
        } else if y < k {
            Letter::B
        } else {
            Letter::C
        }
    } else if y < k {
        Letter::C
    } else if y < half {
        Letter::B
    } else {
        Letter::A
    }
}

/// Circular intervals `[a, a + wa]` and `[b, b + wb]` on `Z / 2^128`.
fn overlaps(a: u128, wa: u128, b: u128, wb: u128) -> bool {
    b.wrapping_sub(a) <= wa || a.wrapping_sub(b) <= wb
}

/// The rotation `y -> y + theta` with the partition attached.
pub struct Rotation {
    x: ExactPoint,
    theta: ExactPoint,
    below_half: bool,
    /// fixed-point data; `None` when enclosures are too wide for 128 bits
    fast: Option<Fast>,
    exact: Option<(QuadSurd, QuadSurd)>,
}

struct Fast {
    x: u128,
    wx: u128,
    t: u128,
    wt: u128,
}

fn to_u128_mod(v: &BigInt) -> u128 {
    let m = BigInt::one() << 128;
    v.mod_floor(&m).to_u128().expect("reduced")
}

impl Rotation {
    pub fn new(x: &ExactPoint, theta: &ExactPoint) -> Result<Self, OracleError> {
        if theta.is_rational() {
            return Err(OracleError::RationalTheta);
        }
        let exact = match (x.to_quad(), theta.to_quad()) {
            (Some(a), Some(b)) => a.add(&b).ok().map(|_| (a.fract(), b.fract())),
            _ => None,
        };
        let below_half = match &exact {
            Some((_, t)) => *t < QuadSurd::rational(1.into(), 2.into()),
            None => {
                let mut bits = 64;
                loop {
                    let (lo, hi) = theta.enclose(bits);
                    let h = BigInt::one() << (bits - 1);
                    if hi < h {
                        break true;
                    }
                    if lo > h {
                        break false;
                    }
                    if bits >= MAX_BITS {
                        return Err(OracleError::UndecidableComparison(0));
                    }
                    bits *= 2;
                }
            }
        };
        let (xl, xh) = x.enclose(128);
        let (tl, th) = theta.enclose(128);
        let two = BigInt::from(2);
        let fast = (&xh - &xl <= two && &th - &tl <= two).then(|| Fast {
            x: to_u128_mod(&xl),
            wx: (&xh - &xl).to_u128().expect("small"),
            t: to_u128_mod(&tl),
            wt: (&th - &tl).to_u128().expect("small"),
        });
        Ok(Rotation { x: x.clone(), theta: theta.clone(), below_half, fast, exact })
    }

    pub fn below_half(&self) -> bool {
        self.below_half
    }

    /// Letter of `x + i theta`, and the endpoint it sits on, if exactly on one.
    pub fn letter_at(&self, i: u64) -> Result<(Letter, Option<Endpoint>), OracleError> {
        if let Some(f) = &self.fast {
            let y = f.x.wrapping_add(f.t.wrapping_mul(i as u128));
            let w = f.wx.saturating_add(f.wt.saturating_mul(i as u128));
            let k = 0u128.wrapping_sub(f.t).wrapping_sub(f.wt);
            if w < 1 << 100 && !overlaps(y, w, 0, 0) && !overlaps(y, w, HALF, 0) && !overlaps(y, w, k, f.wt) {
                return Ok((classify(&y, &HALF, &k, self.below_half), None));
            }
        }
        match &self.exact {
            Some((x, t)) => self.exact_letter(x, t, i),
            None => self.refined_letter(i),
        }
    }

    fn exact_letter(&self, x: &QuadSurd, t: &QuadSurd, i: u64) -> Result<(Letter, Option<Endpoint>), OracleError> {
        let iq = QuadSurd::rational(BigInt::from(i), BigInt::one());
        let y = x.add(&iq.mul(t)?)?.fract();
        let half = QuadSurd::rational(1.into(), 2.into());
        let k = QuadSurd::from_int(1).sub(t)?;
        let hit = if y.is_zero() {
            Some(Endpoint::Zero)
        } else if y == half {
            Some(Endpoint::Half)
        } else if y == k {
            Some(Endpoint::OneMinusTheta)
        } else {
            None
        };
        Ok((classify(&y, &half, &k, self.below_half), hit))
    }

    fn refined_letter(&self, i: u64) -> Result<(Letter, Option<Endpoint>), OracleError> {
        if i == 0 {
            if let Some(q) = self.x.to_quad() {
                if q.is_zero() {
                    return Ok((classify(&0u8, &1, &2, self.below_half), Some(Endpoint::Zero)));
                }
                if q == QuadSurd::rational(1.into(), 2.into()) {
                    let l = if self.below_half { Letter::B } else { Letter::A };
                    return Ok((l, Some(Endpoint::Half)));
                }
            }
        }
        let mut bits = 192u32;
        loop {
            let (xl, xh) = self.x.enclose(bits);
            let (tl, th) = self.theta.enclose(bits);
            let modulus = BigInt::one() << bits;
            let lo = &xl + &tl * i;
            let w = &xh + &th * i - &lo;
            let y = lo.mod_floor(&modulus);
            let half = BigInt::one() << (bits - 1);
            let k = &modulus - &th;
            let wk = &th - &tl;
            let hits = |b: &BigInt, wb: &BigInt| {
                let d1 = (b - &y).mod_floor(&modulus);
                let d2 = (&y - b).mod_floor(&modulus);
                d1 <= w || &d2 <= wb
            };
            let zero = BigInt::zero();
            if !hits(&zero, &zero) && !hits(&half, &zero) && !hits(&k, &wk) {
                return Ok((classify(&y, &half, &k, self.below_half), None));
            }
            if bits >= MAX_BITS {
                return Err(OracleError::UndecidableComparison(i));
            }
            bits *= 2;
        }
    }
}

/// Letters of `x, x + theta, ..., x + (n-1) theta`.
pub fn code_orbit(x: &ExactPoint, theta: &ExactPoint, n: u64) -> Result<CodingResult, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroLength);
    }
    let rot = Rotation::new(x, theta)?;
    let mut word = Word::new();
    let mut endpoint_hits = Vec::new();
    for i in 0..n {
        let (l, hit) = rot.letter_at(i)?;
        word.push(l);
        if let Some(endpoint) = hit {
            endpoint_hits.push(EndpointHit { index: i, endpoint, side: Side::Right });
        }
    }
    Ok(CodingResult { word, endpoint_hits, convention: Convention::LeftClosed })
}

/// `S_1 .. S_n` with `M_n`, `m_n` over `1 <= i <= max(n - 1, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumSeries {
    pub series: Vec<i64>,
    #[serde(rename = "M")]
    pub max: i64,
    #[serde(rename = "m")]
    pub min: i64,
    pub rho: i64,
}

impl SumSeries {
    /// `i,S_i` rows under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,S_i\n");
        for (i, s) in self.series.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, s));
        }
        out
    }
}

/// Sum series of a word with `f = +1` on `[0, 1/2)`.
pub fn series_of_word(w: &Word, below_half: bool) -> SumSeries {
    let sign = if below_half { 1 } else { -1 };
    let series: Vec<i64> = w
        .letters()
        .iter()
        .scan(0i64, |s, l| {
            *s += l.value(sign);
            Some(*s)
        })
        .collect();
    let upto = series.len().saturating_sub(1).max(1).min(series.len());
    let max = series[..upto].iter().copied().max().unwrap_or(0);
    let min = series[..upto].iter().copied().min().unwrap_or(0);
    SumSeries { series, max, min, rho: max - min + 1 }
}

pub fn sums(x: &ExactPoint, theta: &ExactPoint, n: u64) -> Result<SumSeries, OracleError> {
    let rot = Rotation::new(x, theta)?;
    let c = code_orbit(x, theta, n)?;
    Ok(series_of_word(&c.word, rot.below_half()))
}

/// `rho_n(x)` at each requested `n`, in one pass.
pub fn rho_at(x: &ExactPoint, theta: &ExactPoint, ns: &[u64]) -> Result<Vec<i64>, OracleError> {
    let rot = Rotation::new(x, theta)?;
    let sign = if rot.below_half() { 1 } else { -1 };
    let last = ns.iter().copied().max().unwrap_or(1).saturating_sub(1).max(1);
    let (mut s, mut max, mut min) = (0i64, i64::MIN, i64::MAX);
    let mut by_n = std::collections::HashMap::new();
    for i in 1..=last {
        s += rot.letter_at(i - 1)?.0.value(sign);
        max = max.max(s);
        min = min.min(s);
        by_n.insert(i + 1, max - min + 1);
        if i == 1 {
            by_n.insert(1, 1);
        }
    }
    Ok(ns.iter().map(|n| by_n.get(n).copied().unwrap_or(0)).collect())
}

/// Hamming mismatches, stopping once `budget` is exceeded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub count: usize,
    pub positions: Vec<usize>,
}

pub fn compare_upto_errors(w1: &Word, w2: &Word, budget: usize) -> Result<Mismatch, OracleError> {
    if w1.len() != w2.len() {
        return Err(OracleError::LengthMismatch(w1.len(), w2.len()));
    }
    let positions: Vec<usize> = w1
        .letters()
        .iter()
        .zip(w2.letters())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .take(budget + 1)
        .collect();
    Ok(Mismatch { count: positions.len(), positions })
}

/// Both sides of `rho_N(y) <= rho_{q_{n+2}}(x) + 4 a_{n+1}` where
/// `q_n <= N < q_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenjoyCheck {
    pub n: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

pub fn denjoy_bound(x: &ExactPoint, y: &ExactPoint, theta: &PartialQuotients, big_n: u64) -> Result<DenjoyCheck, OracleError> {
    if big_n == 0 {
        return Err(OracleError::ZeroLength);
    }
    let mut qs = vec![BigUint::one()];
    let target = BigUint::from(big_n);
    for (_, q) in theta.convergents() {
        let done = qs.len() >= 3 && qs[qs.len() - 2] > target;
        if done {
            break;
        }
        qs.push(q);
    }
    let n = qs.iter().rposition(|q| q <= &target).expect("q_0 = 1");
    let q2 = qs.get(n + 2).ok_or(OracleError::Cf(CfError::DigitsExhausted(n + 2)))?;
    let q2 = q2.to_u64().ok_or(OracleError::Cf(CfError::DigitsExhausted(n + 2)))?;
    let a = theta.digit(n)? as i64;
    let th = to_exact(theta);
    let lhs = rho_at(y, &th, &[big_n])?[0];
    let rhs = rho_at(x, &th, &[q2])?[0] + 4 * a;
    Ok(DenjoyCheck { n, lhs, rhs, holds: lhs <= rhs })
}

pub fn denjoy_bound_check(x: &ExactPoint, y: &ExactPoint, theta: &PartialQuotients, big_n: u64) -> Result<bool, OracleError> {
    Ok(denjoy_bound(x, y, theta, big_n)?.holds)
}
