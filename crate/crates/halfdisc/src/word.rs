//! Words over `{A, B, C}`, the substitutions of the renormalization, `Psi`, and
//! the `omega'` seed words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cf::{CaseTag, CfError, RenormState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("empty word")]
    Empty,
    #[error("invalid letter `{0}`")]
    BadLetter(char),
    #[error("state lacks a2 for an even case")]
    MissingA2,
    #[error(transparent)]
    Cf(#[from] CfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
        }
    }

    pub fn from_char(c: char) -> Result<Letter, WordError> {
        match c {
            'A' => Ok(Letter::A),
            'B' => Ok(Letter::B),
            'C' => Ok(Letter::C),
            other => Err(WordError::BadLetter(other)),
        }
    }

    /// Value of `f` on this letter: `A` is `+sign`, `B` and `C` are `-sign`.
    pub fn value(self, sign: i8) -> i64 {
        if self == Letter::A {
            sign as i64
        } else {
            -(sign as i64)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l)
    }

    pub fn append(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>().map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|l| l.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Run of `count` copies of a letter.
pub type Run = (Letter, u64);

/// A word written as `head . block^reps`, each part run-length encoded. All
/// substitution images have this shape, which keeps enormous exponents cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub head: Vec<Run>,
    pub block: Vec<Run>,
    pub reps: u64,
}

impl Image {
    pub fn from_runs(runs: Vec<Run>) -> Self {
        let head = runs.into_iter().filter(|r| r.1 > 0).collect();
        Image { head, block: Vec::new(), reps: 0 }
    }

    pub fn letter(l: Letter) -> Self {
        Image::from_runs(vec![(l, 1)])
    }

    pub fn from_word(w: &Word) -> Self {
        let mut runs: Vec<Run> = Vec::new();
        for &l in w.letters() {
            match runs.last_mut() {
                Some((x, n)) if *x == l => *n += 1,
                _ => runs.push((l, 1)),
            }
        }
        Image::from_runs(runs)
    }

    fn with_block(head: Vec<Run>, block: Vec<Run>, reps: u64) -> Self {
        let head = head.into_iter().filter(|r| r.1 > 0).collect();
        let block: Vec<Run> = block.into_iter().filter(|r| r.1 > 0).collect();
        let reps = if block.is_empty() { 0 } else { reps };
        Image { head, block, reps }
    }

    fn runs_len(runs: &[Run]) -> u128 {
        runs.iter().map(|r| r.1 as u128).sum()
    }

    pub fn len(&self) -> u128 {
        Self::runs_len(&self.head) + Self::runs_len(&self.block) * self.reps as u128
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> Option<Letter> {
        self.head.first().or_else(|| if self.reps > 0 { self.block.first() } else { None }).map(|r| r.0)
    }

    pub fn last(&self) -> Option<Letter> {
        if self.reps > 0 {
            self.block.last().map(|r| r.0)
        } else {
            self.head.last().map(|r| r.0)
        }
    }

    /// Number of occurrences of each letter.
    pub fn counts(&self) -> [u128; 3] {
        let mut c = [0u128; 3];
        for &(l, n) in &self.head {
            c[l.index()] += n as u128;
        }
        for &(l, n) in &self.block {
            c[l.index()] += n as u128 * self.reps as u128;
        }
        c
    }

    /// Runs in order, repeating the block. Only for small images.
    pub fn runs(&self) -> impl Iterator<Item = Run> + '_ {
        self.head
            .iter()
            .copied()
            .chain((0..self.reps).flat_map(move |_| self.block.iter().copied()))
    }

    pub fn to_word(&self) -> Word {
        self.runs().flat_map(|(l, n)| std::iter::repeat_n(l, n as usize)).collect()
    }

    /// Replace the first letter by `C`.
    pub fn psi(&self) -> Result<Image, WordError> {
        if self.is_empty() {
            return Err(WordError::Empty);
        }
        let mut runs: Vec<Run> = self.head.clone();
        let mut img = if runs.is_empty() {
            // first letter sits in the block: peel one repetition into the head
            let mut head = self.block.clone();
            head[0].1 -= 1;
            head.insert(0, (Letter::C, 1));
            Image::with_block(head, self.block.clone(), self.reps - 1)
        } else {
            runs[0].1 -= 1;
            runs.insert(0, (Letter::C, 1));
            Image::with_block(runs, self.block.clone(), self.reps)
        };
        if img.head.len() >= 2 && img.head[0].0 == img.head[1].0 {
            let n = img.head.remove(0).1;
            img.head[0].1 += n;
        }
        Ok(img)
    }
}

impl fmt::Display for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let runs = |rs: &[Run]| {
            rs.iter()
                .map(|&(l, n)| if n == 1 { l.as_char().to_string() } else { format!("{}^{}", l.as_char(), n) })
                .collect::<String>()
        };
        write!(f, "{}", runs(&self.head))?;
        if self.reps > 0 {
            write!(f, "({})^{}", runs(&self.block), self.reps)?;
        }
        Ok(())
    }
}

/// Homomorphism `Letter -> Image`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    images: [Image; 3],
    identity: bool,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution { images: Letter::ALL.map(Image::letter), identity: true }
    }

    pub fn from_images(a: Image, b: Image, c: Image) -> Self {
        Substitution { images: [a, b, c], identity: false }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn image(&self, l: Letter) -> &Image {
        &self.images[l.index()]
    }

    pub fn image_word(&self, l: Letter) -> Word {
        self.images[l.index()].to_word()
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::new();
        for &l in w.letters() {
            out.append(&self.image_word(l));
        }
        out
    }
}

/// The substitution attached to a renormalization state.
pub fn sigma_of(state: &RenormState) -> Result<Substitution, WordError> {
    use Letter::*;
    let k = state.a1 / 2;
    let blk = || vec![(A, k), (B, k - 1), (C, 1)];
    Ok(match state.case {
        CaseTag::One => Substitution::identity(),
        CaseTag::OddGt1 => Substitution::from_images(
            Image::from_runs(vec![(A, k), (B, k), (C, 1)]),
            Image::from_runs(vec![(A, k + 1), (B, k - 1), (C, 1)]),
            Image::letter(A),
        ),
        CaseTag::EvenA3Ne1 => {
            let a2 = state.a2.ok_or(WordError::MissingA2)?;
            Substitution::from_images(
                Image::with_block(vec![(A, k + 1), (B, k - 1), (C, 1)], blk(), a2 - 1),
                Image::with_block(vec![(A, k), (B, k), (C, 1)], blk(), a2 - 1),
                Image::with_block(vec![(A, k), (B, k), (C, 1)], blk(), a2),
            )
        }
        CaseTag::EvenA3Eq1 => {
            let a2 = state.a2.ok_or(WordError::MissingA2)?;
            Substitution::from_images(
                Image::with_block(vec![(A, k), (B, k), (C, 1)], blk(), a2),
                Image::with_block(vec![(A, k + 1), (B, k - 1), (C, 1)], blk(), a2),
                Image::with_block(vec![(A, k + 1), (B, k - 1), (C, 1)], blk(), a2 - 1),
            )
        }
    })
}

/// Replace the first letter of a nonempty word by `C`.
pub fn psi(w: &Word) -> Result<Word, WordError> {
    let mut out = w.clone();
    *out.0.first_mut().ok_or(WordError::Empty)? = Letter::C;
    Ok(out)
}

/// `sigma'`: `Psi` above one half, the ordinary substitution otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaPrime {
    Psi,
    Sub(Substitution),
}

pub fn sigma_prime_of(state: &RenormState) -> Result<SigmaPrime, WordError> {
    if state.above_half() {
        Ok(SigmaPrime::Psi)
    } else {
        sigma_of(state).map(SigmaPrime::Sub)
    }
}

/// `omega'_n`, the seed word for the orbit of zero at level `n`. When
/// `a1(theta_n) = 1` it is `Psi(omega'_{n+1})`, which needs the next state.
pub fn omega_prime(state: &RenormState, next: Option<&RenormState>) -> Result<Image, WordError> {
    use Letter::*;
    let k = state.a1 / 2;
    match state.case {
        CaseTag::EvenA3Ne1 | CaseTag::EvenA3Eq1 => Ok(Image::from_runs(vec![(A, k + 1), (B, k - 1), (C, 1)])),
        CaseTag::OddGt1 => Ok(Image::from_runs(vec![(A, k + 1), (B, k)])),
        CaseTag::One => {
            let next = next.ok_or(CfError::DigitsExhausted(state.index + 1))?;
            omega_prime(next, None)?.psi()
        }
    }
}

/// `sigma_0 o sigma_1 o ... o sigma_{n-1}` applied to `w` (last one first).
pub fn iterate(subs: &[Substitution], w: &Word) -> Word {
    subs.iter().rev().fold(w.clone(), |acc, s| if s.is_identity() { acc } else { s.apply(&acc) })
}

/// No factor `CC`, `CB` or `BA`.
pub fn is_orbit_valid(w: &Word) -> bool {
    use Letter::*;
    !w.0.windows(2).any(|p| matches!((p[0], p[1]), (C, C) | (C, B) | (B, A)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{renorm_trajectory, PartialQuotients};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn sqrt2_substitution() {
        let st = &renorm_trajectory(&PartialQuotients::sqrt2(), 0).unwrap()[0];
        let s = sigma_of(st).unwrap();
        assert_eq!(s.image_word(Letter::A), w("AACAC"));
        assert_eq!(s.image_word(Letter::B), w("ABCAC"));
        assert_eq!(s.image_word(Letter::C), w("ABCACAC"));
    }

    #[test]
    fn golden_first_renormalized_substitution() {
        let st = &renorm_trajectory(&PartialQuotients::golden(), 1).unwrap()[1];
        let s = sigma_of(st).unwrap();
        assert_eq!(s.image_word(Letter::A), w("ABCAC"));
        assert_eq!(s.image_word(Letter::B), w("AACAC"));
        assert_eq!(s.image_word(Letter::C), w("AAC"));
        let st0 = &renorm_trajectory(&PartialQuotients::golden(), 0).unwrap()[0];
        assert!(sigma_of(st0).unwrap().is_identity());
        assert_eq!(sigma_prime_of(st0).unwrap(), SigmaPrime::Psi);
    }

    #[test]
    fn psi_basics() {
        assert_eq!(psi(&w("AAC")).unwrap(), w("CAC"));
        assert_eq!(psi(&w("ABCAC")).unwrap(), w("CBCAC"));
        assert_eq!(psi(&psi(&w("ABCAC")).unwrap()).unwrap(), psi(&w("ABCAC")).unwrap());
        assert!(psi(&Word::new()).is_err());
        let img = Image::with_block(vec![], vec![(Letter::A, 2), (Letter::C, 1)], 3);
        assert_eq!(img.psi().unwrap().to_word(), psi(&img.to_word()).unwrap());
    }

    #[test]
    fn omega_prime_words() {
        let t = PartialQuotients::periodic(vec![3], vec![2]).unwrap();
        let st = renorm_trajectory(&t, 1).unwrap();
        assert_eq!(omega_prime(&st[0], None).unwrap().to_word(), w("AAB"));
        let g = renorm_trajectory(&PartialQuotients::golden(), 1).unwrap();
        assert_eq!(omega_prime(&g[0], Some(&g[1])).unwrap().to_word(), w("CAC"));
        assert_eq!(omega_prime(&g[1], None).unwrap().to_word(), w("AAC"));
    }

    #[test]
    fn iterate_twice() {
        let st = renorm_trajectory(&PartialQuotients::sqrt2(), 1).unwrap();
        let subs: Vec<_> = st.iter().map(|s| sigma_of(s).unwrap()).collect();
        let out = iterate(&subs, &w("A"));
        assert_eq!(out.len(), 29);
        assert!(out.to_string().starts_with("AACACAACACABCACAC"));
        assert_eq!(iterate(&[], &w("AB")), w("AB"));
    }

    #[test]
    fn validity() {
        assert!(is_orbit_valid(&w("AACAC")));
        assert!(!is_orbit_valid(&w("ACCA")));
        assert!(!is_orbit_valid(&w("ABBA")));
    }
}
