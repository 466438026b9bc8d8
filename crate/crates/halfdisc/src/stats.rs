//! Sum statistics `S`, `M`, `m` of words, how substitutions act on them, and
//! their closed forms at renormalization times.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{g_cycle, renorm_trajectory, CaseTag, CfError, PartialQuotients, RenormState};
use crate::tower::{Block, Tower, TowerError};
use crate::word::{sigma_of, Image, Letter, Run, Substitution, Word, WordError};

pub type Sum = i128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("empty word")]
    EmptyWord,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("theta has no periodic tail")]
    NotPeriodic,
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Exact summary of a nonempty word under a sign convention. Besides `S`,
/// `M`, `m` it keeps, for each letter, the range of the interior prefix sums
/// `P_j` (`1 <= j < |w|`) that are followed by that letter. That is enough to
/// push the summary through any substitution without seeing the word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumStats {
    pub sign: i8,
    pub total: Sum,
    pub max: Sum,
    pub min: Sum,
    pub first_letter: Letter,
    pub last_letter: Letter,
    interior: [Option<(Sum, Sum)>; 3],
}

impl SumStats {
    pub fn ends_with_c(&self) -> bool {
        self.last_letter == Letter::C
    }

    /// The minimum is reached by the whole word and by no proper prefix.
    pub fn min_only_at_end(&self) -> bool {
        self.total == self.min && self.interior.iter().flatten().all(|&(lo, _)| lo > self.min)
    }

    pub fn first_step(&self) -> Sum {
        self.first_letter.value(self.sign) as Sum
    }

    /// True for the one-letter word `C`.
    pub fn is_single_c(&self) -> bool {
        self.first_letter == Letter::C && self.interior.iter().all(Option::is_none)
    }

    pub fn extremes(&self) -> Extremes {
        Extremes { total: self.total, max: self.max, min: self.min }
    }
}

/// `(S, M, m)` of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremes {
    #[serde(rename = "S")]
    pub total: Sum,
    #[serde(rename = "M")]
    pub max: Sum,
    #[serde(rename = "m")]
    pub min: Sum,
}

impl From<&Block> for Extremes {
    fn from(b: &Block) -> Self {
        Extremes { total: b.sum, max: b.max, min: b.min }
    }
}

fn widen(r: &mut Option<(Sum, Sum)>, lo: Sum, hi: Sum) {
    *r = Some(match *r {
        None => (lo, hi),
        Some((a, b)) => (a.min(lo), b.max(hi)),
    });
}

/// Linear scan of a word.
pub fn scan(w: &Word, sign: i8) -> Result<SumStats, StatsError> {
    let letters = w.letters();
    let (&first, &last) = (letters.first().ok_or(StatsError::EmptyWord)?, letters.last().expect("nonempty"));
    let mut interior = [None; 3];
    let mut s: Sum = 0;
    let mut max = Sum::MIN;
    let mut min = Sum::MAX;
    for (j, &l) in letters.iter().enumerate() {
        if j > 0 {
            widen(&mut interior[l.index()], s, s);
        }
        s += l.value(sign) as Sum;
        max = max.max(s);
        min = min.min(s);
    }
    Ok(SumStats { sign, total: s, max, min, first_letter: first, last_letter: last, interior })
}

/// Per-image data needed to push a summary through a substitution.
struct ImageInfo {
    sum: Sum,
    max: Sum,
    min: Sum,
    first: Letter,
    last: Letter,
    /// prefix sums before each position, by the letter at that position
    offsets: [Option<(Sum, Sum)>; 3],
    /// same, positions `t >= 1` only
    offsets_tail: [Option<(Sum, Sum)>; 3],
}

fn walk_runs(runs: &[Run], sign: i8, start: Sum, skip_first: bool, info: &mut ImageInfo) -> Sum {
    let mut c = start;
    let mut skip = skip_first;
    for &(l, n) in runs {
        if n == 0 {
            continue;
        }
        let v = l.value(sign) as Sum;
        let n = n as Sum;
        // positions before each letter of the run: c, c+v, ..., c+(n-1)v
        let (lo, hi) = (c.min(c + (n - 1) * v), c.max(c + (n - 1) * v));
        widen(&mut info.offsets[l.index()], lo, hi);
        if skip {
            if n >= 2 {
                let (a, b) = (c + v, c + (n - 1) * v);
                widen(&mut info.offsets_tail[l.index()], a.min(b), a.max(b));
            }
        } else {
            widen(&mut info.offsets_tail[l.index()], lo, hi);
        }
        skip = false;
        let (a, b) = (c + v, c + n * v);
        info.max = info.max.max(a.max(b));
        info.min = info.min.min(a.min(b));
        c += n * v;
    }
    c
}

fn image_info(img: &Image, sign: i8) -> ImageInfo {
    let mut info = ImageInfo {
        sum: 0,
        max: Sum::MIN,
        min: Sum::MAX,
        first: img.first().expect("nonempty image"),
        last: img.last().expect("nonempty image"),
        offsets: [None; 3],
        offsets_tail: [None; 3],
    };
    let c = walk_runs(&img.head, sign, 0, true, &mut info);
    let mut total = c;
    if img.reps > 0 && !img.block.is_empty() {
        let b: Sum = img.block.iter().map(|&(l, n)| l.value(sign) as Sum * n as Sum).sum();
        let reps = img.reps as Sum;
        // first and last repetitions bound everything in between
        let skip = img.head.is_empty();
        walk_runs(&img.block, sign, c, skip, &mut info);
        if reps > 1 {
            walk_runs(&img.block, sign, c + (reps - 1) * b, false, &mut info);
        }
        total = c + reps * b;
    }
    info.sum = total;
    info
}

/// Push a summary through `sigma` exactly.
pub fn apply_stats(s: &SumStats, sub: &Substitution) -> SumStats {
    if sub.is_identity() {
        return s.clone();
    }
    let infos = Letter::ALL.map(|l| image_info(sub.image(l), s.sign));
    // every table substitution scales letter values by a common factor +-1
    let eps = infos[0].sum * Letter::A.value(s.sign) as Sum;
    debug_assert!(Letter::ALL.iter().all(|&l| infos[l.index()].sum == eps * l.value(s.sign) as Sum));
    let scaled = |(lo, hi): (Sum, Sum)| if eps > 0 { (lo, hi) } else { (-hi, -lo) };

    let f = &infos[s.first_letter.index()];
    let mut max = f.max;
    let mut min = f.min;
    let mut interior = f.offsets_tail;
    for y in Letter::ALL {
        let Some(range) = s.interior[y.index()] else { continue };
        let (lo, hi) = scaled(range);
        let iy = &infos[y.index()];
        max = max.max(hi + iy.max);
        min = min.min(lo + iy.min);
        for z in Letter::ALL {
            if let Some((a, b)) = iy.offsets[z.index()] {
                widen(&mut interior[z.index()], lo + a, hi + b);
            }
        }
    }
    SumStats {
        sign: s.sign,
        total: eps * s.total,
        max,
        min,
        first_letter: f.first,
        last_letter: infos[s.last_letter.index()].last,
        interior,
    }
}

/// `Psi`: the first letter becomes `C`.
pub fn psi_stats(s: &SumStats) -> SumStats {
    let d = (Letter::C.value(s.sign) - s.first_letter.value(s.sign)) as Sum;
    let shift = |r: Option<(Sum, Sum)>| r.map(|(a, b)| (a + d, b + d));
    let single = s.interior.iter().all(Option::is_none);
    SumStats {
        sign: s.sign,
        total: s.total + d,
        max: s.max + d,
        min: s.min + d,
        first_letter: Letter::C,
        last_letter: if single { Letter::C } else { s.last_letter },
        interior: s.interior.map(shift),
    }
}

/// One substitution step on a summary, under the preconditions of the
/// one-step arithmetic (`M >= 0`, word other than `C`). The result is exact in
/// every case, including the odd case where `M` drops by one.
pub fn step_stats(s: &SumStats, state: &RenormState) -> Result<SumStats, StatsError> {
    if s.max < 0 {
        return Err(StatsError::Precondition("M < 0"));
    }
    if s.is_single_c() {
        return Err(StatsError::Precondition("word is C"));
    }
    Ok(apply_stats(s, &sigma_of(state)?))
}

/// `Omega'_n` summary as given by the parity sums. Valid for either side of
/// `1/2`; when `theta_n > 1/2` the word coincides with `Omega'_{n+1}` and the
/// sums are taken through `n + 1`.
pub fn closed_form_zero(theta: &PartialQuotients, n: usize) -> Result<Extremes, StatsError> {
    let states = renorm_trajectory(theta, n + 1)?;
    let upto = if states[n].above_half() { n + 1 } else { n };
    let mut max: Sum = 1;
    let mut min: Sum = 1;
    for st in &states[..=upto] {
        if st.parity {
            min -= st.increment as Sum;
        } else {
            max += st.increment as Sum;
        }
    }
    Ok(Extremes { total: 1, max, min })
}

/// One row of the zero-orbit trajectory table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub n: usize,
    pub parity: u8,
    pub increment: u64,
    #[serde(rename = "M")]
    pub max: Sum,
    pub abs_min: Sum,
}

/// Running `(p_n, floor(a1/2), M, |m|)` with the parity sums taken through `n`.
pub fn trajectory_table(theta: &PartialQuotients, depth: usize) -> Result<Vec<TrajectoryRow>, StatsError> {
    let states = renorm_trajectory(theta, depth)?;
    let mut max: Sum = 1;
    let mut min: Sum = 1;
    Ok(states
        .iter()
        .map(|st| {
            if st.parity {
                min -= st.increment as Sum;
            } else {
                max += st.increment as Sum;
            }
            TrajectoryRow { n: st.index, parity: st.parity as u8, increment: st.increment, max, abs_min: min.abs() }
        })
        .collect())
}

/// Interval bounds on `(S, M, m)` of `Omega_n = sigma^{(n)}(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialRange {
    #[serde(rename = "S")]
    pub total: Sum,
    #[serde(rename = "M")]
    pub max: (Sum, Sum),
    #[serde(rename = "m")]
    pub min: (Sum, Sum),
}

impl SpecialRange {
    pub fn contains(&self, e: &Extremes) -> bool {
        e.total == self.total
            && (self.max.0..=self.max.1).contains(&e.max)
            && (self.min.0..=self.min.1).contains(&e.min)
    }
}

/// Ranges for `Omega_n`, from the one-step rules applied innermost first:
/// a sign-preserving step adds `floor(a1/2)` to `M`; a reversing step maps
/// `(S, M, m)` to `(-S, floor(a1/2) - m, -M)`. The true values sit within one
/// of the result.
pub fn closed_form_special(theta: &PartialQuotients, n: usize) -> Result<SpecialRange, StatsError> {
    let states = renorm_trajectory(theta, n)?;
    let (mut s, mut max, mut min): (Sum, Sum, Sum) = (1, 1, 1);
    for st in states[..n].iter().rev() {
        let k = st.increment as Sum;
        match st.case {
            CaseTag::One => {}
            CaseTag::EvenA3Ne1 => max += k,
            CaseTag::EvenA3Eq1 | CaseTag::OddGt1 => (s, max, min) = (-s, k - min, -max),
        }
    }
    if states[0].above_half() {
        (s, max, min) = (-s, -min, -max);
    }
    Ok(SpecialRange { total: s, max: (max - 1, max + 1), min: (min - 1, min + 1) })
}

/// `(|sigma^{(n)}(A)|, |sigma^{(n)}(C)|)`; also `|sigma^{(n)}(B)| = |sigma^{(n)}(A)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthPair {
    pub len_ab: BigUint,
    pub len_c: BigUint,
}

/// Length matrix of one state, rows `(A, C)` and columns `(AB-count, C-count)`.
pub fn length_matrix(st: &RenormState) -> Result<[[BigUint; 2]; 2], StatsError> {
    let big = |x: u128| BigUint::from(x);
    let a1 = st.a1 as u128;
    Ok(match st.case {
        CaseTag::One => [[big(1), big(0)], [big(0), big(1)]],
        CaseTag::OddGt1 => [[big(a1 - 1), big(1)], [big(1), big(0)]],
        CaseTag::EvenA3Ne1 | CaseTag::EvenA3Eq1 => {
            let a2 = st.a2.ok_or(WordError::MissingA2)? as u128;
            let lo = [big((a1 - 1) * a2 + 1), big(a2)];
            let hi = [big((a1 - 1) * a2 + a1), big(a2 + 1)];
            if st.case == CaseTag::EvenA3Ne1 {
                [lo, hi]
            } else {
                [hi, lo]
            }
        }
    })
}

/// `M_{n-1} ... M_0 (1, 1)`.
pub fn length_pair(theta: &PartialQuotients, n: usize) -> Result<LengthPair, StatsError> {
    let states = if n == 0 { Vec::new() } else { renorm_trajectory(theta, n - 1)? };
    let mut v = [BigUint::one(), BigUint::one()];
    for st in &states {
        let m = length_matrix(st)?;
        v = [&m[0][0] * &v[0] + &m[0][1] * &v[1], &m[1][0] * &v[0] + &m[1][1] * &v[1]];
    }
    let [len_ab, len_c] = v;
    Ok(LengthPair { len_ab, len_c })
}

/// `|Omega'_n|`.
pub fn zero_word_length(theta: &PartialQuotients, n: usize) -> Result<BigUint, StatsError> {
    let mut t = Tower::new(theta)?;
    Ok(t.zero_block(n)?.len)
}

/// A nonnegative rational or infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl std::fmt::Display for ExtRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::Infinite => write!(f, "inf"),
        }
    }
}

/// `lim M_n(0) / |m_n(0)|` for an eventually periodic expansion.
pub fn ratio_limit(theta: &PartialQuotients) -> Result<ExtRational, StatsError> {
    if !theta.is_periodic() {
        return Err(StatsError::NotPeriodic);
    }
    let (pre, per) = g_cycle(theta, 100_000).ok_or(StatsError::NotPeriodic)?;
    let states = renorm_trajectory(theta, pre + per)?;
    let cycle = &states[pre..pre + per];
    if cycle.iter().filter(|s| s.above_half()).count() % 2 == 1 {
        return Ok(ExtRational::Finite(BigRational::one()));
    }
    let (mut up, mut down) = (BigInt::zero(), BigInt::zero());
    for st in cycle {
        if st.parity {
            down += st.increment;
        } else {
            up += st.increment;
        }
    }
    Ok(if down.is_zero() {
        ExtRational::Infinite
    } else {
        ExtRational::Finite(BigRational::new(up, down))
    })
}

/// Which orbit `stats_at` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    Zero,
    Special,
}

/// `{n, S, M, m, rho}` for one index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointStats {
    pub n: BigUint,
    #[serde(rename = "S")]
    pub total: Sum,
    #[serde(rename = "M")]
    pub max: Sum,
    #[serde(rename = "m")]
    pub min: Sum,
    pub rho: Sum,
}

/// `S_n`, `M_n`, `m_n`, `rho_n` of the orbit of `0` or of `x(theta)`, for any
/// `n`, by descending the substitution tree. `M_n` and `m_n` range over
/// `S_i` with `1 <= i <= max(n - 1, 1)`.
pub fn stats_at(theta: &PartialQuotients, sel: Selector, n: &BigUint) -> Result<PointStats, StatsError> {
    if n.is_zero() {
        return Err(StatsError::Precondition("n must be positive"));
    }
    let mut t = Tower::new(theta)?;
    let (level, top, primed) = match sel {
        Selector::Zero => {
            let l = t.zero_level_for(n)?;
            (l, t.omega_prime(l)?, true)
        }
        Selector::Special => (t.special_level_for(n)?, Image::letter(Letter::A), false),
    };
    t.ensure_level(level)?;
    let one = BigUint::one();
    let range_len = if n > &one { n - &one } else { one };
    let r = t.prefix_block(level, &top, primed, &range_len);
    let total = if &range_len == n { r.sum } else { t.prefix_block(level, &top, primed, n).sum };
    Ok(PointStats { n: n.clone(), total, max: r.max, min: r.min, rho: r.max - r.min + 1 })
}
