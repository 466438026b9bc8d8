//! The tower of substitutions `sigma_0, sigma_1, ...` for one rotation number,
//! with per-level block statistics, exact prefix statistics at any length, and
//! lazy letter streams. Nothing here materializes a full iterated word.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::cf::{states, CfError, PartialQuotients, RenormState, States};
use crate::word::{omega_prime, sigma_of, Image, Letter, Run, Substitution, WordError};

/// Sum statistics of a word as a monoid element: length, total, extrema over
/// nonempty prefixes, and the first prefix length at which each extremum is
/// reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub len: BigUint,
    pub sum: i128,
    pub max: i128,
    pub t_max: BigUint,
    pub min: i128,
    pub t_min: BigUint,
}

impl Block {
    pub fn empty() -> Self {
        Block {
            len: BigUint::zero(),
            sum: 0,
            max: i128::MIN,
            t_max: BigUint::zero(),
            min: i128::MAX,
            t_min: BigUint::zero(),
        }
    }

    pub fn letter(l: Letter, sign: i8) -> Self {
        let v = l.value(sign) as i128;
        Block { len: 1u32.into(), sum: v, max: v, t_max: 1u32.into(), min: v, t_min: 1u32.into() }
    }

    pub fn is_empty(&self) -> bool {
        self.len.is_zero()
    }

    /// `self` followed by `o`.
    pub fn concat(&self, o: &Block) -> Block {
        if o.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return o.clone();
        }
        let (max, t_max) = if o.max + self.sum > self.max {
            (o.max + self.sum, &self.len + &o.t_max)
        } else {
            (self.max, self.t_max.clone())
        };
        let (min, t_min) = if o.min + self.sum < self.min {
            (o.min + self.sum, &self.len + &o.t_min)
        } else {
            (self.min, self.t_min.clone())
        };
        Block { len: &self.len + &o.len, sum: self.sum + o.sum, max, t_max, min, t_min }
    }

    /// `r` copies in a row.
    pub fn pow(&self, mut r: u128) -> Block {
        let mut acc = Block::empty();
        let mut base = self.clone();
        // left-to-right order does not matter for identical factors
        while r > 0 {
            if r & 1 == 1 {
                acc = acc.concat(&base);
            }
            r >>= 1;
            if r > 0 {
                base = base.concat(&base);
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("length {0} is beyond what the available digits can reach")]
    TooLong(BigUint),
}

/// Lazily extended tower for a fixed rotation number.
pub struct Tower {
    sign: i8,
    iter: States,
    states: Vec<RenormState>,
    subs: Vec<Substitution>,
    blocks: Vec<[Block; 3]>,
    blocks_p: Vec<[Block; 3]>,
}

impl Tower {
    pub fn new(theta: &PartialQuotients) -> Result<Tower, TowerError> {
        let sign = if theta.digit(0)? == 1 { -1 } else { 1 };
        let base = Letter::ALL.map(|l| Block::letter(l, sign));
        Ok(Tower {
            sign,
            iter: states(theta),
            states: Vec::new(),
            subs: Vec::new(),
            blocks: vec![base.clone()],
            blocks_p: vec![base],
        })
    }

    /// `+1` when `theta < 1/2` (so `A` counts `+1`), `-1` otherwise.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// State `theta_n`, computing states as needed.
    pub fn state(&mut self, n: usize) -> Result<&RenormState, TowerError> {
        while self.states.len() <= n {
            match self.iter.next() {
                Some(Ok(s)) => self.states.push(s),
                Some(Err(e)) => return Err(e.into()),
                None => return Err(CfError::DigitsExhausted(n).into()),
            }
        }
        Ok(&self.states[n])
    }

    pub fn states(&self) -> &[RenormState] {
        &self.states
    }

    /// Make block data available for levels `0..=level`.
    pub fn ensure_level(&mut self, level: usize) -> Result<(), TowerError> {
        while self.blocks.len() <= level {
            let l = self.blocks.len() - 1;
            let st = self.state(l)?.clone();
            let sub = sigma_of(&st)?;
            let next = Letter::ALL.map(|x| {
                if sub.is_identity() {
                    self.blocks[l][x.index()].clone()
                } else {
                    self.image_block(l, sub.image(x), false)
                }
            });
            let next_p = Letter::ALL.map(|x| {
                if st.above_half() {
                    self.blocks_p[l][Letter::C.index()].clone()
                } else {
                    self.image_block(l, sub.image(x), true)
                }
            });
            self.subs.push(sub);
            self.blocks.push(next);
            self.blocks_p.push(next_p);
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn substitution(&self, l: usize) -> &Substitution {
        &self.subs[l]
    }

    /// Statistics of `sigma^{(level)}(x)`.
    pub fn block(&self, level: usize, x: Letter) -> &Block {
        &self.blocks[level][x.index()]
    }

    /// Statistics of `sigma'^{(level)}(x)`.
    pub fn block_p(&self, level: usize, x: Letter) -> &Block {
        &self.blocks_p[level][x.index()]
    }

    fn runs_block(&self, level: usize, runs: &[Run], primed: bool) -> Block {
        let mut acc = Block::empty();
        let mut first = primed;
        for &(l, n) in runs {
            if n == 0 {
                continue;
            }
            let mut n = n as u128;
            if first {
                acc = acc.concat(self.block_p(level, l));
                n -= 1;
                first = false;
            }
            acc = acc.concat(&self.block(level, l).pow(n));
        }
        acc
    }

    /// Statistics of the level-`level` expansion of an image.
    pub fn image_block(&self, level: usize, img: &Image, primed: bool) -> Block {
        let head = self.runs_block(level, &img.head, primed);
        if img.reps == 0 || img.block.is_empty() {
            return head;
        }
        let plain = self.runs_block(level, &img.block, false);
        if primed && img.head.is_empty() {
            let first = self.runs_block(level, &img.block, true);
            first.concat(&plain.pow(img.reps as u128 - 1))
        } else {
            head.concat(&plain.pow(img.reps as u128))
        }
    }

    /// `omega'_n`.
    pub fn omega_prime(&mut self, n: usize) -> Result<Image, TowerError> {
        self.state(n + 1).ok();
        let st = self.state(n)?.clone();
        let next = self.states.get(n + 1).cloned();
        Ok(omega_prime(&st, next.as_ref())?)
    }

    /// Statistics of `Omega'_n = sigma'^{(n)}(omega'_n)`.
    pub fn zero_block(&mut self, n: usize) -> Result<Block, TowerError> {
        self.ensure_level(n)?;
        let w = self.omega_prime(n)?;
        Ok(self.image_block(n, &w, true))
    }

    /// Statistics of `Omega_n = sigma^{(n)}(A)`.
    pub fn special_block(&mut self, n: usize) -> Result<Block, TowerError> {
        self.ensure_level(n)?;
        Ok(self.block(n, Letter::A).clone())
    }

    /// Smallest level whose zero-orbit word has at least `len` letters.
    pub fn zero_level_for(&mut self, len: &BigUint) -> Result<usize, TowerError> {
        let mut n = 0;
        loop {
            match self.zero_block(n) {
                Ok(b) if &b.len >= len => return Ok(n),
                Ok(_) => n += 1,
                Err(TowerError::Cf(CfError::DigitsExhausted(_))) => return Err(TowerError::TooLong(len.clone())),
                Err(e) => return Err(e),
            }
        }
    }

    /// Smallest level with `|sigma^{(n)}(A)| >= len`.
    pub fn special_level_for(&mut self, len: &BigUint) -> Result<usize, TowerError> {
        let mut n = 0;
        loop {
            match self.ensure_level(n) {
                Ok(()) if &self.block(n, Letter::A).len >= len => return Ok(n),
                Ok(()) => n += 1,
                Err(TowerError::Cf(CfError::DigitsExhausted(_))) => return Err(TowerError::TooLong(len.clone())),
                Err(e) => return Err(e),
            }
        }
    }

    /// Statistics of the first `n` letters of the level-`level` expansion of
    /// `img` (primed: the first letter goes through `sigma'`).
    pub fn prefix_block(&self, level: usize, img: &Image, primed: bool, n: &BigUint) -> Block {
        let mut rem = n.clone();
        let mut acc = Block::empty();
        self.prefix_image(level, img, primed, &mut rem, &mut acc);
        acc
    }

    fn prefix_image(&self, level: usize, img: &Image, primed: bool, rem: &mut BigUint, acc: &mut Block) -> bool {
        if self.prefix_runs(level, &img.head, primed, rem, acc) {
            return true;
        }
        if img.reps == 0 || img.block.is_empty() {
            return rem.is_zero();
        }
        let mut reps = img.reps as u128;
        if primed && img.head.is_empty() {
            if self.prefix_runs(level, &img.block, true, rem, acc) {
                return true;
            }
            reps -= 1;
        }
        let plain = self.runs_block(level, &img.block, false);
        let fit = (&*rem / &plain.len).to_u128().unwrap_or(u128::MAX);
        let take = fit.min(reps);
        *acc = acc.concat(&plain.pow(take));
        *rem -= &plain.len * BigUint::from(take);
        if take == reps {
            return rem.is_zero();
        }
        self.prefix_runs(level, &img.block, false, rem, acc)
    }

    fn prefix_runs(&self, level: usize, runs: &[Run], primed: bool, rem: &mut BigUint, acc: &mut Block) -> bool {
        let mut first = primed;
        for &(l, n) in runs {
            if rem.is_zero() {
                return true;
            }
            if n == 0 {
                continue;
            }
            let mut n = n as u128;
            if first {
                first = false;
                let b = self.block_p(level, l);
                if *rem >= b.len {
                    *acc = acc.concat(b);
                    *rem -= &b.len;
                    n -= 1;
                } else {
                    self.prefix_letter(level, l, true, rem, acc);
                    return true;
                }
            }
            let b = self.block(level, l);
            let fit = (&*rem / &b.len).to_u128().unwrap_or(u128::MAX);
            let take = fit.min(n);
            *acc = acc.concat(&b.pow(take));
            *rem -= &b.len * BigUint::from(take);
            if take < n {
                if !rem.is_zero() {
                    self.prefix_letter(level, l, false, rem, acc);
                }
                return true;
            }
        }
        rem.is_zero()
    }

    /// Strict prefix of the expansion of one letter.
    fn prefix_letter(&self, level: usize, x: Letter, primed: bool, rem: &mut BigUint, acc: &mut Block) {
        if rem.is_zero() {
            return;
        }
        debug_assert!(level > 0, "a single letter has no strict nonempty prefix");
        let st = &self.states[level - 1];
        if st.above_half() {
            let y = if primed { Letter::C } else { x };
            self.prefix_letter(level - 1, y, primed, rem, acc);
            return;
        }
        let img = self.subs[level - 1].image(x).clone();
        self.prefix_image(level - 1, &img, primed, rem, acc);
    }

    /// Letters of the level-`level` expansion of `img`, lazily. The tower must
    /// already hold levels `0..=level`.
    pub fn expand<'a>(&'a self, level: usize, img: Image, primed: bool) -> Expander<'a> {
        Expander {
            tower: self,
            stack: vec![Frame { level, src: Source::Owned(img), cur: Cursor::default(), primed, started: false }],
        }
    }
}

enum Source {
    Owned(Image),
    Sub(usize, Letter),
}

#[derive(Default, Clone, Copy)]
struct Cursor {
    in_block: bool,
    rep: u64,
    run: usize,
    off: u64,
}

impl Cursor {
    fn next(&mut self, img: &Image) -> Option<Letter> {
        loop {
            let runs = if self.in_block { &img.block } else { &img.head };
            if self.run < runs.len() {
                let (l, n) = runs[self.run];
                if self.off < n {
                    self.off += 1;
                    return Some(l);
                }
                self.run += 1;
                self.off = 0;
                continue;
            }
            if !self.in_block {
                self.in_block = true;
                self.run = 0;
                self.off = 0;
                if img.reps == 0 {
                    return None;
                }
                continue;
            }
            self.rep += 1;
            if self.rep >= img.reps {
                return None;
            }
            self.run = 0;
            self.off = 0;
        }
    }
}

struct Frame {
    level: usize,
    src: Source,
    cur: Cursor,
    primed: bool,
    started: bool,
}

/// Depth-first letter stream; memory is proportional to the number of levels.
pub struct Expander<'a> {
    tower: &'a Tower,
    stack: Vec<Frame>,
}

impl Iterator for Expander<'_> {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        loop {
            let frame = self.stack.last_mut()?;
            let img = match &frame.src {
                Source::Owned(i) => i,
                Source::Sub(l, x) => self.tower.subs[*l].image(*x),
            };
            let Some(mut letter) = frame.cur.next(img) else {
                self.stack.pop();
                continue;
            };
            let primed = frame.primed && !frame.started;
            frame.started = true;
            let mut level = frame.level;
            // identity levels pass letters through (or turn the primed one into C)
            while level > 0 && self.tower.states[level - 1].above_half() {
                if primed {
                    letter = Letter::C;
                }
                level -= 1;
            }
            if level == 0 {
                return Some(letter);
            }
            self.stack.push(Frame {
                level: level - 1,
                src: Source::Sub(level - 1, letter),
                cur: Cursor::default(),
                primed,
                started: false,
            });
        }
    }
}
