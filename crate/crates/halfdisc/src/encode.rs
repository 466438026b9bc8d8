//! Words for the orbits of `x(theta)`, of `0`, and of an arbitrary exact point.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use crate::cf::{CaseTag, CfError, PartialQuotients};
use crate::oracle::{to_exact, Endpoint, ExactPoint};
use crate::quad::{QuadError, QuadSurd};
use crate::tower::{Tower, TowerError};
use crate::word::{Image, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("point is not exactly representable in the field of theta")]
    NotRepresentable,
    #[error("no return to the induction interval within {0} steps")]
    NoReturn(u64),
    #[error("assembled word would exceed {0} letters")]
    TooLong(u128),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Cf(#[from] CfError),
}

/// Cap on materialized words.
pub const MAX_LETTERS: u128 = 50_000_000;

/// First `n` letters of `lim sigma^{(m)}(A)`, the coding of the orbit of `x(theta)`.
pub fn limit_prefix(theta: &PartialQuotients, n: usize) -> Result<Word, EncodeError> {
    theta.require_irrational()?;
    let mut t = Tower::new(theta)?;
    let level = t.special_level_for(&BigUint::from(n))?;
    Ok(t.expand(level, Image::letter(Letter::A), false).take(n).collect())
}

/// First `n` letters of `lim sigma'^{(m)}(omega'_m)`, the coding of the orbit of `0`.
pub fn zero_orbit_prefix(theta: &PartialQuotients, n: usize) -> Result<Word, EncodeError> {
    theta.require_irrational()?;
    let mut t = Tower::new(theta)?;
    let level = t.zero_level_for(&BigUint::from(n))?;
    let top = t.omega_prime(level)?;
    Ok(t.expand(level, top, true).take(n).collect())
}

/// Which one-sided limit a tracked point stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `y+`, with `y` in `[0, 1)`
    Right,
    /// `y-`, with `y` in `(0, 1]`
    Left,
}

/// A point landing exactly on a partition or induction endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EncodeEvent {
    pub level: usize,
    pub step: u64,
    pub endpoint: Endpoint,
    pub side: Side,
}

/// Output of [`encode_arbitrary`].
#[derive(Debug, Clone)]
pub struct Encoding {
    pub omegas: Vec<Word>,
    pub prefix: Word,
    pub events: Vec<EncodeEvent>,
}

#[derive(Clone)]
struct Point {
    y: QuadSurd,
    side: Side,
}

fn half() -> QuadSurd {
    QuadSurd::rational(BigInt::one(), 2.into())
}

impl Point {
    /// `self < b` for the one-sided point.
    fn lt(&self, b: &QuadSurd) -> bool {
        match self.side {
            Side::Right => self.y < *b,
            Side::Left => self.y <= *b,
        }
    }

    fn rotate(&self, t: &QuadSurd) -> Result<Point, QuadError> {
        let one = QuadSurd::from_int(1);
        let mut y = self.y.add(t)?;
        let wrap = match self.side {
            Side::Right => y >= one,
            Side::Left => y > one,
        };
        if wrap {
            y = y.sub(&one)?;
        }
        Ok(Point { y, side: self.side })
    }

    fn letter(&self, t: &QuadSurd) -> Result<Letter, QuadError> {
        let h = half();
        let k = QuadSurd::from_int(1).sub(t)?;
        Ok(if *t < h {
            if self.lt(&h) {
                Letter::A
            } else if self.lt(&k) {
                Letter::B
            } else {
                Letter::C
            }
        } else if self.lt(&k) {
            Letter::C
        } else if self.lt(&h) {
            Letter::B
        } else {
            Letter::A
        })
    }

    fn on_endpoint(&self, t: &QuadSurd) -> Result<Option<Endpoint>, QuadError> {
        let y = &self.y;
        Ok(if y.is_zero() || *y == QuadSurd::from_int(1) {
            Some(Endpoint::Zero)
        } else if *y == half() {
            Some(Endpoint::Half)
        } else if *y == QuadSurd::from_int(1).sub(t)? {
            Some(Endpoint::OneMinusTheta)
        } else {
            None
        })
    }
}

/// Walks the induced systems, yielding `omega_n` and the next point.
struct Descent {
    point: Point,
    level: usize,
    tower: Tower,
    events: Vec<EncodeEvent>,
}

const MAX_RETURN: u64 = 50_000_000;

impl Descent {
    fn new(x: &ExactPoint, theta: &PartialQuotients) -> Result<Self, EncodeError> {
        theta.require_irrational()?;
        let y = x.to_quad().ok_or(EncodeError::NotRepresentable)?.fract();
        let th = to_exact(theta).to_quad().ok_or(EncodeError::NotRepresentable)?;
        y.add(&th).map_err(|_| EncodeError::NotRepresentable)?;
        Ok(Descent { point: Point { y, side: Side::Right }, level: 0, tower: Tower::new(theta)?, events: Vec::new() })
    }

    fn theta_n(&mut self) -> Result<QuadSurd, EncodeError> {
        let st = self.tower.state(self.level)?;
        to_exact(&st.theta).to_quad().ok_or(EncodeError::NotRepresentable)
    }

    fn log(&mut self, step: u64, p: &Point, t: &QuadSurd) -> Result<(), EncodeError> {
        if let Some(endpoint) = p.on_endpoint(t)? {
            self.events.push(EncodeEvent { level: self.level, step, endpoint, side: p.side });
        }
        Ok(())
    }

    /// Current letter under the partition of `theta_n`.
    fn letter(&mut self) -> Result<Letter, EncodeError> {
        let t = self.theta_n()?;
        Ok(self.point.letter(&t)?)
    }

    /// `omega_n`: coding of the points before the orbit enters `[0, delta_n)`;
    /// then rescale (or reflect) into the next level.
    fn step(&mut self) -> Result<Word, EncodeError> {
        let st = self.tower.state(self.level)?.clone();
        let t = self.theta_n()?;
        let mut omega = Word::new();
        if st.case == CaseTag::One {
            let p = self.point.clone();
            self.log(0, &p, &t)?;
            let y = QuadSurd::from_int(1).sub(&self.point.y)?;
            let side = match self.point.side {
                Side::Right => Side::Left,
                Side::Left => Side::Right,
            };
            self.point = Point { y, side };
        } else {
            let delta = QuadSurd::from_int(1).sub(&QuadSurd::from_int(st.e_value as i64).mul(&t)?)?;
            let mut p = self.point.clone();
            let mut j = 0u64;
            while !p.lt(&delta) {
                self.log(j, &p, &t)?;
                omega.push(p.letter(&t)?);
                p = p.rotate(&t)?;
                j += 1;
                if j > MAX_RETURN {
                    return Err(EncodeError::NoReturn(MAX_RETURN));
                }
            }
            self.log(j, &p, &t)?;
            self.point = Point { y: p.y.div(&delta)?, side: p.side };
        }
        self.level += 1;
        Ok(omega)
    }
}

/// `omega_0 sigma^{(1)}(omega_1) ... sigma^{(D)}(omega_D) sigma^{(D+1)}(X)` where
/// `X` is the letter of the point reached at level `D + 1`; each `omega_n` is
/// empty whenever the point already lies in the next induction interval.
pub fn encode_arbitrary(x: &ExactPoint, theta: &PartialQuotients, depth: usize) -> Result<Encoding, EncodeError> {
    let mut d = Descent::new(x, theta)?;
    let mut omegas = Vec::with_capacity(depth + 1);
    for _ in 0..=depth {
        omegas.push(d.step()?);
    }
    let last = d.letter()?;
    let t = &mut d.tower;
    t.ensure_level(depth + 1)?;
    let mut total: u128 = 0;
    for (k, w) in omegas.iter().enumerate() {
        for &l in w.letters() {
            total = total.saturating_add(t.block(k, l).len.clone().try_into().unwrap_or(u128::MAX));
        }
    }
    total = total.saturating_add(t.block(depth + 1, last).len.clone().try_into().unwrap_or(u128::MAX));
    if total > MAX_LETTERS {
        return Err(EncodeError::TooLong(MAX_LETTERS));
    }
    let prefix = assemble(t, &omegas, last, usize::MAX);
    Ok(Encoding { omegas, prefix, events: d.events })
}

fn assemble(t: &Tower, omegas: &[Word], last: Letter, n: usize) -> Word {
    let mut out = Word::new();
    for (k, w) in omegas.iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        out.0.extend(t.expand(k, Image::from_word(w), false).take(n - out.len()));
        if out.len() >= n {
            return out;
        }
    }
    out.0.extend(t.expand(omegas.len(), Image::letter(last), false).take(n - out.len()));
    out
}

/// First `n` letters of the coding of `x`, descending until the assembled
/// word is long enough.
pub fn encode_prefix(x: &ExactPoint, theta: &PartialQuotients, n: usize) -> Result<(Word, Vec<EncodeEvent>), EncodeError> {
    let mut d = Descent::new(x, theta)?;
    let mut omegas: Vec<Word> = Vec::new();
    let target = BigUint::from(n);
    loop {
        let mut len = BigUint::from(0u32);
        let last = d.letter()?;
        d.tower.ensure_level(omegas.len())?;
        for (k, w) in omegas.iter().enumerate() {
            for &l in w.letters() {
                len += &d.tower.block(k, l).len;
            }
        }
        len += &d.tower.block(omegas.len(), last).len;
        if len >= target {
            let w = assemble(&d.tower, &omegas, last, n);
            return Ok((w, d.events));
        }
        omegas.push(d.step()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{code_orbit, compare_upto_errors};

    #[test]
    fn fixtures() {
        assert_eq!(limit_prefix(&PartialQuotients::sqrt2(), 29).unwrap().to_string(), "AACACAACACABCACACAACACABCACAC");
        assert_eq!(limit_prefix(&PartialQuotients::golden(), 21).unwrap().to_string(), "ABCACAACACAACABCACAAC");
        assert_eq!(zero_orbit_prefix(&PartialQuotients::golden(), 21).unwrap().to_string(), "CACABCACAACABCACAACAC");
        assert_eq!(zero_orbit_prefix(&PartialQuotients::sqrt2(), 200).unwrap(), limit_prefix(&PartialQuotients::sqrt2(), 200).unwrap());
    }

    #[test]
    fn zero_is_special_for_heavy() {
        let e = encode_arbitrary(&ExactPoint::zero(), &PartialQuotients::sqrt2(), 4).unwrap();
        assert!(e.omegas.iter().all(Word::is_empty));
        assert_eq!(e.prefix, limit_prefix(&PartialQuotients::sqrt2(), e.prefix.len()).unwrap());
    }

    #[test]
    fn half_against_oracle() {
        let t = PartialQuotients::sqrt2();
        let x = ExactPoint::ratio(1, 2);
        let (w, _) = encode_prefix(&x, &t, 2000).unwrap();
        let o = code_orbit(&x, &to_exact(&t), 2000).unwrap().word;
        assert!(compare_upto_errors(&w, &o, 2).unwrap().count <= 2);
    }

    #[test]
    fn rational_points_golden() {
        let t = PartialQuotients::golden();
        for (p, q) in [(1, 3), (2, 7), (5, 11), (0, 1)] {
            let x = ExactPoint::ratio(p, q);
            let (w, _) = encode_prefix(&x, &t, 3000).unwrap();
            let o = code_orbit(&x, &to_exact(&t), 3000).unwrap().word;
            let m = compare_upto_errors(&w, &o, 2).unwrap();
            assert!(m.count <= 2, "x = {p}/{q}: {:?}", m.positions);
        }
    }
}
