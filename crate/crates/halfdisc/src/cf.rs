//! Continued-fraction digits of a rotation number and the renormalization map.
//!
//! A rotation number is kept as its partial quotients `[a1, a2, ...]` (with
//! `a0 = 0`), never as a float. Tails can be periodic (quadratic surds), absent
//! (a finite prefix, i.e. a rational), or supplied by a restartable generator.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub type Digit = u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfError {
    #[error("partial quotient at index {0} is zero")]
    ZeroDigit(usize),
    #[error("periodic tail must be nonempty")]
    EmptyPeriod,
    #[error("digits exhausted at index {0}")]
    DigitsExhausted(usize),
    #[error("rational input (no tail) is not supported by this operation")]
    Rational,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("bad theta spec: {0}")]
    Spec(String),
}

/// A pull-based digit supplier. Exhaustion is reported as an error so that a
/// caller never mistakes a truncated stream for a rational number.
pub trait DigitStream: Send {
    fn next_digit(&mut self) -> Result<Digit, CfError>;
}

/// Reproducible description of a generator, as carried in theta-spec JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skip: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

type Factory = dyn Fn() -> Box<dyn DigitStream> + Send + Sync;

struct Cache {
    stream: Box<dyn DigitStream>,
    digits: Vec<Digit>,
    end: Option<CfError>,
}

/// A memoized generator. Random access is served from a cache filled by a
/// private cursor, so clones of a `PartialQuotients` never share a position and
/// `restart` hands out an independent cursor from index 0.
pub struct Generator {
    spec: GeneratorSpec,
    factory: Arc<Factory>,
    cache: Mutex<Cache>,
}

impl Generator {
    pub fn new<F>(spec: GeneratorSpec, factory: F) -> Self
    where
        F: Fn() -> Box<dyn DigitStream> + Send + Sync + 'static,
    {
        let stream = factory();
        Generator {
            spec,
            factory: Arc::new(factory),
            cache: Mutex::new(Cache { stream, digits: Vec::new(), end: None }),
        }
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn restart(&self) -> Box<dyn DigitStream> {
        (self.factory)()
    }

    /// Digit at 0-based index `i` of the raw stream.
    pub fn digit(&self, i: usize) -> Result<Digit, CfError> {
        let mut c = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        while c.digits.len() <= i {
            if let Some(e) = &c.end {
                return Err(match e {
                    CfError::DigitsExhausted(_) => CfError::DigitsExhausted(i),
                    other => other.clone(),
                });
            }
            match c.stream.next_digit() {
                Ok(0) => {
                    let at = c.digits.len();
                    c.end = Some(CfError::ZeroDigit(at));
                }
                Ok(d) => c.digits.push(d),
                Err(e) => c.end = Some(e),
            }
        }
        Ok(c.digits[i])
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({})", self.spec.name)
    }
}

#[derive(Clone, Debug)]
pub enum Tail {
    None,
    Periodic(Vec<Digit>),
    Generator { source: Arc<Generator>, offset: usize },
}

/// `theta = [a1, a2, ...]`: an explicit prefix followed by a tail.
#[derive(Clone)]
pub struct PartialQuotients {
    prefix: Vec<Digit>,
    tail: Tail,
}

impl PartialQuotients {
    pub fn new(prefix: Vec<Digit>, tail: Tail) -> Result<Self, CfError> {
        if let Some(i) = prefix.iter().position(|&d| d == 0) {
            return Err(CfError::ZeroDigit(i));
        }
        if let Tail::Periodic(p) = &tail {
            if p.is_empty() {
                return Err(CfError::EmptyPeriod);
            }
            if let Some(i) = p.iter().position(|&d| d == 0) {
                return Err(CfError::ZeroDigit(prefix.len() + i));
            }
        }
        Ok(PartialQuotients { prefix, tail })
    }

    pub fn periodic(prefix: Vec<Digit>, period: Vec<Digit>) -> Result<Self, CfError> {
        Self::new(prefix, Tail::Periodic(period))
    }

    pub fn finite(prefix: Vec<Digit>) -> Result<Self, CfError> {
        Self::new(prefix, Tail::None)
    }

    pub fn with_generator(prefix: Vec<Digit>, source: Arc<Generator>) -> Result<Self, CfError> {
        let offset = source.spec().skip;
        Self::new(prefix, Tail::Generator { source, offset })
    }

    /// `[2, 2, 2, ...]`, i.e. `sqrt(2) - 1`.
    pub fn sqrt2() -> Self {
        Self::periodic(vec![], vec![2]).expect("valid")
    }

    /// `[1, 1, 1, ...]`, the golden mean `(sqrt(5) - 1) / 2`.
    pub fn golden() -> Self {
        Self::periodic(vec![], vec![1]).expect("valid")
    }

    pub fn prefix(&self) -> &[Digit] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_irrational(&self) -> bool {
        !matches!(self.tail, Tail::None)
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_))
    }

    pub fn require_irrational(&self) -> Result<(), CfError> {
        if self.is_irrational() {
            Ok(())
        } else {
            Err(CfError::Rational)
        }
    }

    /// Digit `a_{i+1}` (0-based index).
    pub fn digit(&self, i: usize) -> Result<Digit, CfError> {
        if i < self.prefix.len() {
            return Ok(self.prefix[i]);
        }
        let j = i - self.prefix.len();
        match &self.tail {
            Tail::None => Err(CfError::DigitsExhausted(i)),
            Tail::Periodic(p) => Ok(p[j % p.len()]),
            Tail::Generator { source, offset } => source
                .digit(offset + j)
                .map_err(|e| match e {
                    CfError::DigitsExhausted(_) => CfError::DigitsExhausted(i),
                    other => other,
                }),
        }
    }

    /// The first `n` digits.
    pub fn first(&self, n: usize) -> Result<Vec<Digit>, CfError> {
        (0..n).map(|i| self.digit(i)).collect()
    }

    /// Digits available without error, up to `limit`.
    pub fn available(&self, limit: usize) -> Vec<Digit> {
        (0..limit).map_while(|i| self.digit(i).ok()).collect()
    }

    /// Drop the first `k` digits.
    fn drop_front(&self, k: usize) -> Result<Self, CfError> {
        if k <= self.prefix.len() {
            return Ok(PartialQuotients { prefix: self.prefix[k..].to_vec(), tail: self.tail.clone() });
        }
        let extra = k - self.prefix.len();
        let tail = match &self.tail {
            Tail::None => return Err(CfError::DigitsExhausted(k - 1)),
            Tail::Periodic(p) => {
                let r = extra % p.len();
                let mut q = p[r..].to_vec();
                q.extend_from_slice(&p[..r]);
                Tail::Periodic(q)
            }
            Tail::Generator { source, offset } => {
                // make sure the dropped digits exist
                source.digit(offset + extra - 1)?;
                Tail::Generator { source: source.clone(), offset: offset + extra }
            }
        };
        Ok(PartialQuotients { prefix: Vec::new(), tail })
    }

    /// Replace the leading digit (which must exist).
    fn with_head(&self, head: Digit) -> Result<Self, CfError> {
        let mut rest = self.drop_front(1)?;
        rest.prefix.insert(0, head);
        Ok(rest)
    }

    /// The Gauss map: shift digits left by one.
    pub fn gauss(&self) -> Result<Self, CfError> {
        self.require_irrational()?;
        self.digit(0)?;
        self.drop_front(1)
    }

    /// One step of the parity-aware renormalization map `g`.
    pub fn g_step(&self) -> Result<(Self, CaseTag), CfError> {
        self.require_irrational()?;
        let case = self.case_tag()?;
        let next = match case {
            CaseTag::EvenA3Ne1 | CaseTag::EvenA3Eq1 => self.drop_front(2)?,
            CaseTag::OddGt1 => self.with_head(1)?,
            CaseTag::One => {
                let a2 = self.digit(1)?;
                self.drop_front(1)?.with_head(a2 + 1)?
            }
        };
        Ok((next, case))
    }

    /// Classification of the leading digits used by the substitution table.
    pub fn case_tag(&self) -> Result<CaseTag, CfError> {
        let a1 = self.digit(0)?;
        Ok(if a1 == 1 {
            CaseTag::One
        } else if a1 % 2 == 1 {
            CaseTag::OddGt1
        } else if self.digit(2)? == 1 {
            CaseTag::EvenA3Eq1
        } else {
            CaseTag::EvenA3Ne1
        })
    }

    /// Canonical form of a periodic expansion: primitive period, shortest prefix.
    pub fn canonical(&self) -> Self {
        let Tail::Periodic(p) = &self.tail else {
            return self.clone();
        };
        let mut period = primitive_period(p);
        let mut prefix = self.prefix.clone();
        while let (Some(&last), Some(&plast)) = (prefix.last(), period.last()) {
            if last != plast {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        PartialQuotients { prefix, tail: Tail::Periodic(period) }
    }

    /// Key for hashing periodic expansions; `None` for other tails.
    pub fn periodic_key(&self) -> Option<(Vec<Digit>, Vec<Digit>)> {
        match self.canonical() {
            PartialQuotients { prefix, tail: Tail::Periodic(p) } => Some((prefix, p)),
            _ => None,
        }
    }

    /// Convergents `p_i / q_i` for `i = 1, 2, ...` while digits last.
    pub fn convergents(&self) -> Convergents<'_> {
        Convergents {
            theta: self,
            i: 0,
            p: (BigUint::one(), BigUint::zero()),
            q: (BigUint::zero(), BigUint::one()),
        }
    }

    pub fn to_spec(&self) -> ThetaSpec {
        match &self.tail {
            Tail::None => ThetaSpec { prefix: self.prefix.clone(), period: None, generator: None },
            Tail::Periodic(p) => {
                ThetaSpec { prefix: self.prefix.clone(), period: Some(p.clone()), generator: None }
            }
            Tail::Generator { source, offset } => {
                let mut g = source.spec().clone();
                g.skip = *offset;
                ThetaSpec { prefix: self.prefix.clone(), period: None, generator: Some(g) }
            }
        }
    }

    pub fn from_spec(spec: &ThetaSpec) -> Result<Self, CfError> {
        match (&spec.period, &spec.generator) {
            (Some(_), Some(_)) => Err(CfError::Spec("period and generator are exclusive".into())),
            (Some(p), None) => Self::periodic(spec.prefix.clone(), p.clone()),
            (None, Some(g)) => {
                let source = Arc::new(crate::generators::build(g)?);
                Self::with_generator(spec.prefix.clone(), source)
            }
            (None, None) => Self::finite(spec.prefix.clone()),
        }
    }
}

impl fmt::Debug for PartialQuotients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PartialQuotients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Digit]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}", join(&self.prefix))?;
        let sep = if self.prefix.is_empty() { "" } else { ";" };
        match &self.tail {
            Tail::None => write!(f, "]"),
            Tail::Periodic(p) => write!(f, "{sep}({})]", join(p)),
            Tail::Generator { source, offset } => {
                write!(f, "{sep}{}@{}...]", source.spec().name, offset)
            }
        }
    }
}

fn primitive_period(p: &[Digit]) -> Vec<Digit> {
    let n = p.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| p[i] == p[i - d]))
        .map(|d| p[..d].to_vec())
        .unwrap_or_else(|| p.to_vec())
}

pub struct Convergents<'a> {
    theta: &'a PartialQuotients,
    i: usize,
    p: (BigUint, BigUint),
    q: (BigUint, BigUint),
}

impl Iterator for Convergents<'_> {
    type Item = (BigUint, BigUint);

    fn next(&mut self) -> Option<Self::Item> {
        let a = BigUint::from(self.theta.digit(self.i).ok()?);
        self.i += 1;
        let p = &a * &self.p.1 + &self.p.0;
        let q = &a * &self.q.1 + &self.q.0;
        self.p = (std::mem::take(&mut self.p.1), p.clone());
        self.q = (std::mem::take(&mut self.q.1), q.clone());
        Some((p, q))
    }
}

/// theta-spec document: `{"prefix": [...], "period": [...]}` or with `"generator"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpec {
    #[serde(default)]
    pub prefix: Vec<Digit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<Digit>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

/// Named fixtures: `sqrt2`, `golden`, `ratio2`, `extreme`.
pub fn named(name: &str) -> Option<PartialQuotients> {
    let spec = |n: &str| ThetaSpec {
        prefix: vec![],
        period: None,
        generator: Some(GeneratorSpec { name: n.into(), params: serde_json::Value::Null, skip: 0 }),
    };
    match name {
        "sqrt2" => Some(PartialQuotients::sqrt2()),
        "golden" => Some(PartialQuotients::golden()),
        "ratio2" => PartialQuotients::from_spec(&spec("arithmetic")).ok(),
        "extreme" => PartialQuotients::from_spec(&spec("extreme")).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    EvenA3Ne1,
    EvenA3Eq1,
    OddGt1,
    One,
}

impl CaseTag {
    /// Whether the substitution of this case reverses the sign of word sums.
    pub fn reverses(self) -> bool {
        matches!(self, CaseTag::EvenA3Eq1 | CaseTag::OddGt1)
    }
}

/// Largest even integer not exceeding `n`.
pub fn even_floor(n: Digit) -> Digit {
    n & !1
}

/// Snapshot of `theta_n = g^n(theta)`.
#[derive(Clone, Debug)]
pub struct RenormState {
    pub theta: PartialQuotients,
    pub index: usize,
    pub case: CaseTag,
    pub a1: Digit,
    /// `a2(theta_n)`, present whenever it was needed (even `a1`).
    pub a2: Option<Digit>,
    /// `E(a1(theta_n))`.
    pub e_value: Digit,
    /// `floor(a1 / 2)`, zero when `a1 = 1`: the amount a substitution adds to
    /// the running extremum.
    pub increment: Digit,
    /// `p_n`: parity of the number of `i < n` with `theta_i > 1/2`.
    pub parity: bool,
}

impl RenormState {
    fn build(theta: PartialQuotients, index: usize, parity: bool) -> Result<Self, CfError> {
        let case = theta.case_tag()?;
        let a1 = theta.digit(0)?;
        let a2 = match case {
            CaseTag::EvenA3Ne1 | CaseTag::EvenA3Eq1 => Some(theta.digit(1)?),
            _ => None,
        };
        let increment = if a1 == 1 { 0 } else { a1 / 2 };
        Ok(RenormState { theta, index, case, a1, a2, e_value: even_floor(a1), increment, parity })
    }

    pub fn above_half(&self) -> bool {
        self.case == CaseTag::One
    }
}

/// States `theta_0 ..= theta_depth`.
pub fn renorm_trajectory(theta: &PartialQuotients, depth: usize) -> Result<Vec<RenormState>, CfError> {
    theta.require_irrational()?;
    let (states, err) = trajectory_while(theta, depth);
    match err {
        Some(e) if states.len() <= depth => Err(e),
        _ => Ok(states),
    }
}

/// Like [`renorm_trajectory`] but stops quietly when digits run out; also
/// accepts finite prefixes. Returns the error that stopped it, if any.
pub fn trajectory_while(theta: &PartialQuotients, depth: usize) -> (Vec<RenormState>, Option<CfError>) {
    let mut out = Vec::with_capacity(depth + 1);
    for st in states(theta).take(depth + 1) {
        match st {
            Ok(s) => out.push(s),
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

/// Lazy sequence of renormalization states `theta_0, theta_1, ...`. Stops
/// after yielding the first error.
pub fn states(theta: &PartialQuotients) -> States {
    States { cur: Ok(theta.clone()), n: 0, parity: false, done: false }
}

pub struct States {
    cur: Result<PartialQuotients, CfError>,
    n: usize,
    parity: bool,
    done: bool,
}

impl Iterator for States {
    type Item = Result<RenormState, CfError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let cur = match &self.cur {
            Ok(c) => c.clone(),
            Err(e) => {
                self.done = true;
                return Some(Err(e.clone()));
            }
        };
        let st = match RenormState::build(cur.clone(), self.n, self.parity) {
            Ok(s) => s,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        self.n += 1;
        self.parity ^= st.above_half();
        self.cur = g_raw(&cur);
        Some(Ok(st))
    }
}

fn g_raw(theta: &PartialQuotients) -> Result<PartialQuotients, CfError> {
    let a1 = theta.digit(0)?;
    if a1 == 1 {
        let a2 = theta.digit(1)?;
        theta.drop_front(1)?.with_head(a2 + 1)
    } else if a1 % 2 == 1 {
        theta.with_head(1)
    } else {
        theta.digit(2)?;
        theta.drop_front(2)
    }
}

/// Parity `p_n` recomputed from scratch from a list of states.
pub fn parity_from_scratch(states: &[RenormState], n: usize) -> bool {
    states[..n].iter().filter(|s| s.above_half()).count() % 2 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heaviness {
    Yes,
    No,
    Undecided(usize),
}

/// Membership in the set of `theta` whose odd-indexed digits are all even.
pub fn is_heavy(theta: &PartialQuotients, depth: usize) -> Heaviness {
    let odd_at = |i: usize| theta.digit(i).map(|d| d % 2 == 1);
    match theta.tail() {
        Tail::Periodic(p) => {
            let span = theta.prefix().len() + 2 * p.len();
            if (0..span).step_by(2).any(|i| odd_at(i) == Ok(true)) {
                Heaviness::No
            } else {
                Heaviness::Yes
            }
        }
        _ => {
            for i in (0..depth).step_by(2) {
                match odd_at(i) {
                    Ok(true) => return Heaviness::No,
                    Ok(false) => {}
                    Err(_) => return Heaviness::Undecided(i),
                }
            }
            Heaviness::Undecided(depth)
        }
    }
}

/// Cycle structure of the g-orbit of a periodic expansion: `(preperiod, period)`.
/// `None` for non-periodic tails or when no repeat shows up within `max_steps`.
pub fn g_cycle(theta: &PartialQuotients, max_steps: usize) -> Option<(usize, usize)> {
    let mut seen: HashMap<(Vec<Digit>, Vec<Digit>), usize> = HashMap::new();
    let mut cur = theta.canonical();
    for n in 0..=max_steps {
        let key = cur.periodic_key()?;
        if let Some(&m) = seen.get(&key) {
            return Some((m, n - m));
        }
        seen.insert(key, n);
        cur = cur.g_step().ok()?.0.canonical();
    }
    None
}
