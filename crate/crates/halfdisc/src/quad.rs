//! Exact arithmetic in real quadratic fields: numbers `(a + b sqrt(d)) / c`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("operands live in different quadratic fields (d = {0} and d = {1})")]
    FieldMismatch(BigInt, BigInt),
    #[error("division by zero")]
    DivByZero,
    #[error("radicand must be positive")]
    BadRadicand,
}

/// `(a + b sqrt(d)) / c` with `c > 0`, `d` squarefree and `> 1`, and
/// `gcd(a, b, c) = 1`. Rationals have `b = 0` and `d = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

/// Splits `n > 0` as `s^2 * r`, pulling out small square factors and a
/// final perfect square.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut r = n.clone();
    let mut p = 2u32;
    while p < 100_000 {
        let pp = BigInt::from(p) * p;
        if pp > r {
            break;
        }
        while (&r % &pp).is_zero() {
            r /= &pp;
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = r.sqrt();
    if &root * &root == r {
        s *= root;
        r = BigInt::one();
    }
    (s, r)
}

impl QuadSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, QuadError> {
        if c.is_zero() {
            return Err(QuadError::DivByZero);
        }
        if b.is_zero() {
            return Ok(Self::rational(a, c));
        }
        if !d.is_positive() {
            return Err(QuadError::BadRadicand);
        }
        let (s, r) = square_part(&d);
        let (a, b) = if r.is_one() { (a + b * s, BigInt::zero()) } else { (a, b * s) };
        Ok(Self { a, b, c, d: if r.is_one() { BigInt::zero() } else { r } }.normalized())
    }

    pub fn rational(a: BigInt, c: BigInt) -> Self {
        Self { a, b: BigInt::zero(), c, d: BigInt::zero() }.normalized()
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(n.into(), BigInt::one())
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Self::rational(r.numer().clone(), r.denom().clone())
    }

    fn normalized(mut self) -> Self {
        if self.c.is_negative() {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c;
        }
        if self.b.is_zero() {
            self.d = BigInt::zero();
        }
        let g = self.a.gcd(&self.b).gcd(&self.c);
        if !g.is_one() && !g.is_zero() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
        self
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| BigRational::new(self.a.clone(), self.c.clone()))
    }

    fn field(&self, o: &Self) -> Result<BigInt, QuadError> {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => Ok(o.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == o.d => Ok(self.d.clone()),
            _ => Err(QuadError::FieldMismatch(self.d.clone(), o.d.clone())),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, QuadError> {
        let d = self.field(o)?;
        Ok(Self {
            a: &self.a * &o.c + &o.a * &self.c,
            b: &self.b * &o.c + &o.b * &self.c,
            c: &self.c * &o.c,
            d,
        }
        .normalized())
    }

    pub fn neg(&self) -> Self {
        Self { a: -&self.a, b: -&self.b, c: self.c.clone(), d: self.d.clone() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self, QuadError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, QuadError> {
        let d = self.field(o)?;
        Ok(Self {
            a: &self.a * &o.a + &self.b * &o.b * &d,
            b: &self.a * &o.b + &self.b * &o.a,
            c: &self.c * &o.c,
            d,
        }
        .normalized())
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: self.d.clone() }
    }

    pub fn recip(&self) -> Result<Self, QuadError> {
        // 1/x = c (a - b sqrt d) / (a^2 - b^2 d)
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        if norm.is_zero() {
            return Err(QuadError::DivByZero);
        }
        Ok(Self { a: &self.c * &self.a, b: -(&self.c * &self.b), c: norm, d: self.d.clone() }.normalized())
    }

    pub fn div(&self, o: &Self) -> Result<Self, QuadError> {
        self.mul(&o.recip()?)
    }

    pub fn signum(&self) -> Ordering {
        let (sa, sb) = (self.a.sign(), self.b.sign());
        if sb == Sign::NoSign {
            return self.a.cmp(&BigInt::zero());
        }
        if sa == Sign::NoSign || sa == sb {
            return if sb == Sign::Plus { Ordering::Greater } else { Ordering::Less };
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * &self.d;
        let dominant = if a2 > b2d { sa } else { sb };
        if dominant == Sign::Plus {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact `floor`.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.div_floor(&self.c);
        }
        // floor(b sqrt d), never an integer since d is not a square
        let r = (&self.b * &self.b * &self.d).sqrt();
        let fb = if self.b.is_positive() { r } else { -r - 1 };
        (&self.a + fb).div_floor(&self.c)
    }

    /// `floor(self * 2^bits)`.
    pub fn floor_scaled(&self, bits: u32) -> BigInt {
        Self { a: &self.a << bits, b: &self.b << bits, c: self.c.clone(), d: self.d.clone() }.floor()
    }

    pub fn fract(&self) -> Self {
        self.sub(&Self::rational(self.floor(), BigInt::one())).expect("rational operand")
    }

    pub fn to_f64(&self) -> f64 {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        (f(&self.a) + f(&self.b) * f(&self.d).sqrt()) / f(&self.c)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.sub(o).ok().map(|d| d.signum())
    }
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return if self.c.is_one() { write!(f, "{}", self.a) } else { write!(f, "{}/{}", self.a, self.c) };
        }
        write!(f, "({} + {}*sqrt({}))/{}", self.a, self.b, self.d, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64, d: i64) -> QuadSurd {
        QuadSurd::new(a.into(), b.into(), c.into(), d.into()).unwrap()
    }

    #[test]
    fn normalizes_radicand() {
        assert_eq!(q(0, 1, 1, 8), q(0, 2, 1, 2));
        assert_eq!(q(1, 1, 1, 9), QuadSurd::from_int(4));
        assert_eq!(q(2, 2, 4, 5), q(1, 1, 2, 5));
    }

    #[test]
    fn arithmetic() {
        let s = q(0, 1, 1, 2);
        assert_eq!(s.mul(&s).unwrap(), QuadSurd::from_int(2));
        let x = q(1, 1, 1, 2);
        assert_eq!(x.mul(&x.recip().unwrap()).unwrap(), QuadSurd::from_int(1));
        assert!(s.add(&q(0, 1, 1, 3)).is_err());
    }

    #[test]
    fn floor_and_sign() {
        assert_eq!(q(0, 1, 1, 2).floor(), 1.into());
        assert_eq!(q(0, -1, 1, 2).floor(), (-2).into());
        assert_eq!(q(-1, 1, 1, 2).floor_scaled(10), 424.into());
        assert_eq!(q(3, -2, 1, 2).signum(), Ordering::Greater);
        assert_eq!(q(2, -3, 1, 2).signum(), Ordering::Less);
        assert!(q(-1, 1, 1, 2) < QuadSurd::rational(1.into(), 2.into()));
    }
}
