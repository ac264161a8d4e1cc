//! Exact-first numeric tower.
//!
//! Numbers are either exact rationals over an arbitrary integer backing or
//! inexact floats. Exact arithmetic is closed under `+ - * /`; any inexact
//! operand makes the result inexact.
//!
//! The tower is generic over the integer type `I` backing exact rationals and
//! the float type `F` used for inexact values. The interpreter uses the
//! [`crate::Number`] alias (`BigInt` / `f64`).

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_traits::{Float, FromPrimitive, NumCast, Signed, ToPrimitive};
use thiserror::Error;

/// Integer types that can back exact rationals.
pub trait ExactInteger:
    Integer + Signed + Roots + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive
{
}

impl<T> ExactInteger for T where
    T: Integer + Signed + Roots + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive
{
}

/// Float types usable as the inexact half of the tower.
pub trait InexactFloat: Float + FromPrimitive + Debug + Display {}

impl<T> InexactFloat for T where T: Float + FromPrimitive + Debug + Display {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sqrt: expected a non-negative number, given {0}")]
    NegativeSqrt(String),
    #[error("bad number literal `{0}`: denominator is zero")]
    ZeroDenominator(String),
}

/// An exact rational in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational<I> {
    numer: I,
    denom: I,
}

impl<I: ExactInteger> Rational<I> {
    /// Builds `numer/denom`, normalized. `None` when `denom` is zero.
    pub fn new(numer: I, denom: I) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        let g = numer.gcd(&denom);
        let (mut n, mut d) = if g.is_zero() {
            (numer, denom)
        } else {
            (numer / g.clone(), denom / g)
        };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        if n.is_zero() {
            d = I::one();
        }
        Some(Rational { numer: n, denom: d })
    }

    pub fn from_integer(n: I) -> Self {
        Rational { numer: n, denom: I::one() }
    }

    pub fn zero() -> Self {
        Self::from_integer(I::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(I::one())
    }

    pub fn numer(&self) -> &I {
        &self.numer
    }

    pub fn denom(&self) -> &I {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.denom.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.numer.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational { numer: self.numer.abs(), denom: self.denom.clone() }
    }

    pub fn recip(&self) -> Option<Self> {
        Self::new(self.denom.clone(), self.numer.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.clone() * r)
    }

    /// Exact square root, if `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer.sqrt();
        let d = self.denom.sqrt();
        if n.clone() * n.clone() == self.numer && d.clone() * d.clone() == self.denom {
            // Already coprime: roots of coprime squares are coprime.
            Some(Rational { numer: n, denom: d })
        } else {
            None
        }
    }

    /// Nearest float (up to the precision lost converting the parts).
    pub fn to_float<F: InexactFloat>(&self) -> F {
        let mut n = self.numer.clone();
        let mut d = self.denom.clone();
        let scale = I::from_u64(1 << 32).expect("integer backing holds 2^32");
        loop {
            let fnum: Option<F> = NumCast::from(n.clone());
            let fden: Option<F> = NumCast::from(d.clone());
            match (fnum, fden) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() && !b.is_zero() => {
                    return a / b
                }
                _ => {}
            }
            n = n / scale.clone();
            d = d / scale.clone();
            if d.is_zero() {
                return if n.is_negative() { F::neg_infinity() } else { F::infinity() };
            }
        }
    }

    /// The exact value of a finite float.
    pub fn from_float<F: InexactFloat>(x: F) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let (mantissa, exponent, sign) = x.integer_decode();
        let mut m = I::from_u64(mantissa)?;
        if sign < 0 {
            m = -m;
        }
        let two = I::from_u8(2)?;
        let power = num_traits::pow(two, exponent.unsigned_abs() as usize);
        if exponent >= 0 {
            Some(Self::from_integer(m * power))
        } else {
            Self::new(m, power)
        }
    }

    /// Parses an integer, `p/q`, or decimal literal. `Ok(None)` when the text
    /// is not number-shaped at all.
    pub fn parse_literal(text: &str) -> Result<Option<Self>, NumericError> {
        let (negative, body) = match text.as_bytes().first() {
            Some(b'-') => (true, &text[1..]),
            Some(b'+') => (false, &text[1..]),
            _ => (false, text),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        let int = |s: &str| I::from_str_radix(s, 10).ok();
        let value = if let Some((p, q)) = body.split_once('/') {
            if !digits(p) || !digits(q) {
                return Ok(None);
            }
            let (Some(p), Some(q)) = (int(p), int(q)) else {
                return Ok(None);
            };
            match Self::new(p, q) {
                Some(r) => r,
                None => return Err(NumericError::ZeroDenominator(text.to_string())),
            }
        } else if let Some((whole, frac)) = body.split_once('.') {
            let whole_ok = whole.is_empty() || digits(whole);
            let frac_ok = frac.is_empty() || digits(frac);
            if !whole_ok || !frac_ok || (whole.is_empty() && frac.is_empty()) {
                return Ok(None);
            }
            let all: String = [whole, frac].concat();
            let Some(n) = int(&all) else { return Ok(None) };
            let ten = I::from_u8(10).expect("integer backing holds 10");
            Self::new(n, num_traits::pow(ten, frac.len())).expect("power of ten is nonzero")
        } else if digits(body) {
            match int(body) {
                Some(n) => Self::from_integer(n),
                None => return Ok(None),
            }
        } else {
            return Ok(None);
        };
        Ok(Some(if negative { -value } else { value }))
    }
}

impl<I: ExactInteger> Add for Rational<I> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.numer * rhs.denom.clone() + rhs.numer * self.denom.clone(),
            self.denom * rhs.denom,
        )
        .expect("product of positive denominators")
    }
}

impl<I: ExactInteger> Sub for Rational<I> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<I: ExactInteger> Mul for Rational<I> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.numer * rhs.numer, self.denom * rhs.denom)
            .expect("product of positive denominators")
    }
}

impl<I: ExactInteger> Neg for Rational<I> {
    type Output = Self;
    fn neg(self) -> Self {
        Rational { numer: -self.numer, denom: self.denom }
    }
}

impl<I: ExactInteger> Ord for Rational<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numer.clone() * other.denom.clone()).cmp(&(other.numer.clone() * self.denom.clone()))
    }
}

impl<I: ExactInteger> PartialOrd for Rational<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<I: ExactInteger> Display for Rational<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

impl<I: ExactInteger> Debug for Rational<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

/// A number: exact rational or inexact float.
#[derive(Clone, PartialEq)]
pub enum Tower<I, F> {
    Exact(Rational<I>),
    Inexact(F),
}

impl<I: ExactInteger, F: InexactFloat> Tower<I, F> {
    pub fn integer(n: impl Into<I>) -> Self {
        Tower::Exact(Rational::from_integer(n.into()))
    }

    /// `numer/denom` as an exact number. `None` if `denom` is zero.
    pub fn ratio(numer: impl Into<I>, denom: impl Into<I>) -> Option<Self> {
        Rational::new(numer.into(), denom.into()).map(Tower::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Tower::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational<I>> {
        match self {
            Tower::Exact(r) => Some(r),
            Tower::Inexact(_) => None,
        }
    }

    pub fn to_float(&self) -> F {
        match self {
            Tower::Exact(r) => r.to_float(),
            Tower::Inexact(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Tower::Exact(r) => r.is_zero(),
            Tower::Inexact(x) => x.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Tower::Exact(r) => r.is_negative(),
            Tower::Inexact(x) => *x < F::zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && !self.is_negative()
    }

    fn combine(
        self,
        rhs: Self,
        exact: impl FnOnce(Rational<I>, Rational<I>) -> Rational<I>,
        inexact: impl FnOnce(F, F) -> F,
    ) -> Self {
        match (self, rhs) {
            (Tower::Exact(a), Tower::Exact(b)) => Tower::Exact(exact(a, b)),
            (a, b) => Tower::Inexact(inexact(a.to_float(), b.to_float())),
        }
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, NumericError> {
        if rhs.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(match (self, rhs) {
            (Tower::Exact(a), Tower::Exact(b)) => {
                Tower::Exact(a.checked_div(&b).ok_or(NumericError::DivisionByZero)?)
            }
            (a, b) => Tower::Inexact(a.to_float() / b.to_float()),
        })
    }

    pub fn sqr(&self) -> Self {
        self.clone() * self.clone()
    }

    pub fn add1(&self) -> Self {
        self.clone() + Self::integer(I::one())
    }

    pub fn sub1(&self) -> Self {
        self.clone() - Self::integer(I::one())
    }

    pub fn abs(&self) -> Self {
        match self {
            Tower::Exact(r) => Tower::Exact(r.abs()),
            Tower::Inexact(x) => Tower::Inexact(x.abs()),
        }
    }

    /// Exact when the argument is an exact perfect square, otherwise the
    /// nearest float.
    pub fn sqrt(&self) -> Result<Self, NumericError> {
        if self.is_negative() {
            return Err(NumericError::NegativeSqrt(self.to_string()));
        }
        Ok(match self {
            Tower::Exact(r) => match r.sqrt_exact() {
                Some(root) => Tower::Exact(root),
                None => Tower::Inexact(r.to_float::<F>().sqrt()),
            },
            Tower::Inexact(x) => Tower::Inexact(x.sqrt()),
        })
    }

    /// Numeric comparison across exactness. `None` only when a NaN is involved.
    pub fn num_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Tower::Exact(a), Tower::Exact(b)) => Some(a.cmp(b)),
            (Tower::Inexact(a), Tower::Inexact(b)) => a.partial_cmp(b),
            (Tower::Exact(a), Tower::Inexact(b)) => match Rational::from_float(*b) {
                Some(b) => Some(a.cmp(&b)),
                None => F::zero().partial_cmp(b),
            },
            (Tower::Inexact(_), Tower::Exact(_)) => other.num_cmp(self).map(Ordering::reverse),
        }
    }

    /// Numeric equality: exact 5 equals inexact 5.0.
    pub fn num_eq(&self, other: &Self) -> bool {
        self.num_cmp(other) == Some(Ordering::Equal)
    }
}

impl<I: ExactInteger, F: InexactFloat> Add for Tower<I, F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<I: ExactInteger, F: InexactFloat> Sub for Tower<I, F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<I: ExactInteger, F: InexactFloat> Mul for Tower<I, F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl<I: ExactInteger, F: InexactFloat> Neg for Tower<I, F> {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            Tower::Exact(r) => Tower::Exact(-r),
            Tower::Inexact(x) => Tower::Inexact(-x),
        }
    }
}

impl<I: ExactInteger, F: InexactFloat> From<Rational<I>> for Tower<I, F> {
    fn from(r: Rational<I>) -> Self {
        Tower::Exact(r)
    }
}

/// Renders a float as the shortest round-trip decimal, always with a `.`.
fn fmt_inexact<F: InexactFloat>(x: F, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x.is_nan() {
        return f.write_str("+nan.0");
    }
    if x.is_infinite() {
        return f.write_str(if x > F::zero() { "+inf.0" } else { "-inf.0" });
    }
    let text = x.to_string();
    if text.contains('.') || text.contains('e') {
        f.write_str(&text)
    } else {
        write!(f, "{text}.0")
    }
}

impl<I: ExactInteger, F: InexactFloat> Display for Tower<I, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tower::Exact(r) => Display::fmt(r, f),
            Tower::Inexact(x) => fmt_inexact(*x, f),
        }
    }
}

impl<I: ExactInteger, F: InexactFloat> Debug for Tower<I, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a number literal: `{0}`")]
pub struct ParseNumberError(pub String);

/// Parses the literal syntax the reader accepts, plus the inexact rendering
/// produced by `Display` (so printed inexact values parse back).
impl<I: ExactInteger, F: InexactFloat> FromStr for Tower<I, F> {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match Rational::parse_literal(s) {
            Ok(Some(r)) => Ok(Tower::Exact(r)),
            _ => Err(ParseNumberError(s.to_string())),
        }
    }
}
