use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::FieldElem;
use super::intutil::{isqrt_int, surd_sign};
use crate::error::{Error, Result};

/// An element `(a + b·√D)/den` of the ring of integers of ℚ(√D).
///
/// `den` is 1 or 2, and 2 only when `D ≡ 1 (mod 4)` and `a ≡ b (mod 2)`.
/// Elements are kept in canonical form (a `den = 2` element never has both
/// coordinates even), so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    d: BigInt,
    a: BigInt,
    b: BigInt,
    den: u8,
}

fn check_radicand(d: &BigInt) -> Result<()> {
    if *d < BigInt::from(2) {
        return Err(Error::InvalidRadicand(d.clone()));
    }
    let r = isqrt_int(d);
    if &(&r * &r) == d {
        return Err(Error::InvalidRadicand(d.clone()));
    }
    Ok(())
}

impl QuadElem {
    pub fn new(d: BigInt, a: BigInt, b: BigInt, den: u8) -> Result<Self> {
        check_radicand(&d)?;
        Self::with_den(d, a, b, den as u32)
    }

    pub fn from_int(d: BigInt, n: impl Into<BigInt>) -> Result<Self> {
        Self::new(d, n.into(), BigInt::zero(), 1)
    }

    /// `a + b·√d` with integer coordinates.
    pub fn integral(d: BigInt, a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        Self::new(d, a.into(), b.into(), 1)
    }

    pub fn sqrt_d(d: BigInt) -> Result<Self> {
        Self::new(d, BigInt::zero(), BigInt::one(), 1)
    }

    /// Builds `(a + b√d)/den` for `den ∈ {1, 2, 4}`, reducing to canonical form.
    /// The radicand is assumed valid.
    pub(crate) fn with_den(d: BigInt, mut a: BigInt, mut b: BigInt, mut den: u32) -> Result<Self> {
        let two = BigInt::from(2);
        while den > 1 && a.is_even() && b.is_even() {
            a /= &two;
            b /= &two;
            den /= 2;
        }
        let ok = match den {
            1 => true,
            2 => d.mod_floor(&BigInt::from(4)) == BigInt::one() && a.is_odd() && b.is_odd(),
            _ => false,
        };
        if !ok {
            return Err(Error::NotIntegral { d, a, b, den });
        }
        Ok(QuadElem { d, a, b, den: den as u8 })
    }

    pub(crate) fn from_parts(d: &BigInt, a: BigInt, b: BigInt) -> Self {
        QuadElem { d: d.clone(), a, b, den: 1 }
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn den(&self) -> u8 {
        self.den
    }

    pub fn zero(d: &BigInt) -> Self {
        QuadElem::from_parts(d, BigInt::zero(), BigInt::zero())
    }

    pub fn one(d: &BigInt) -> Self {
        QuadElem::from_parts(d, BigInt::one(), BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadElem { d: self.d.clone(), a: self.a.clone(), b: -&self.b, den: self.den }
    }

    /// N(x) = x·x′. Always an integer because every `QuadElem` is integral.
    pub fn norm(&self) -> BigInt {
        let n = &self.a * &self.a - &self.b * &self.b * &self.d;
        let den2 = BigInt::from(self.den as u32 * self.den as u32);
        debug_assert!(n.is_multiple_of(&den2));
        n / den2
    }

    pub fn trace(&self) -> BigInt {
        (&self.a * 2) / BigInt::from(self.den)
    }

    /// gcd of the numerator coordinates `(a, b)`.
    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::FieldMismatch(self.d.clone(), other.d.clone()));
        }
        Ok(())
    }

    /// Both coordinates brought to the common denominator 2.
    fn halves(&self) -> (BigInt, BigInt) {
        if self.den == 2 {
            (self.a.clone(), self.b.clone())
        } else {
            (&self.a * 2, &self.b * 2)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.den == 1 && other.den == 1 {
            return Ok(Self::from_parts(&self.d, &self.a + &other.a, &self.b + &other.b));
        }
        let (a1, b1) = self.halves();
        let (a2, b2) = other.halves();
        Self::with_den(self.d.clone(), a1 + a2, b1 + b2, 2)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * &self.d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::with_den(self.d.clone(), a, b, self.den as u32 * other.den as u32)
    }

    pub fn pow(&self, m: u32) -> Self {
        let mut result = Self::one(&self.d);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        Self::with_den(self.d.clone(), &self.a * n, &self.b * n, self.den as u32)
            .expect("integer multiple of an integral element is integral")
    }

    /// Sign of the real value under the identity embedding.
    pub fn sign(&self) -> Sign {
        surd_sign(&self.a, &self.b, &self.d)
    }

    /// Sign under the conjugate embedding.
    pub fn conjugate_sign(&self) -> Sign {
        surd_sign(&self.a, &-&self.b, &self.d)
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign() == Sign::Plus && self.conjugate_sign() == Sign::Plus
    }

    /// Both embeddings non-negative.
    pub fn is_totally_nonnegative(&self) -> bool {
        self.sign() != Sign::Minus && self.conjugate_sign() != Sign::Minus
    }

    /// `self ≻ other`: strictly greater under both embeddings.
    pub fn succ(&self, other: &Self) -> Result<bool> {
        Ok(self.checked_sub(other)?.is_totally_positive())
    }

    /// `self ⪰ other`: `self ≻ other` or equality as elements.
    pub fn succeq(&self, other: &Self) -> Result<bool> {
        self.same_field(other)?;
        Ok(self == other || self.succ(other)?)
    }

    pub fn to_field(&self) -> FieldElem {
        FieldElem::from_quad(self)
    }

    /// Rough magnitude in bits of the larger coordinate, for diagnostics.
    pub fn bits(&self) -> u64 {
        self.a.bits().max(self.b.bits())
    }

    /// Parses the textual element format in the field ℚ(√d).
    ///
    /// Accepted shapes include `5`, `-sqrt(13)`, `3+2*sqrt(2)`, `1-sqrt(2)`
    /// and `(3+1*sqrt(13))/2`. A radicand written in the string must equal `d`.
    pub fn parse_in(s: &str, d: &BigInt) -> Result<Self> {
        let (inner, den) = split_denominator(s)?;
        let (a, b, found) = parse_linear(&inner)?;
        if let Some(found) = found {
            if &found != d {
                return Err(Error::FieldMismatch(d.clone(), found));
            }
        }
        Self::new(d.clone(), a, b, den)
    }

    /// Parses an element whose radicand is spelled out in the string.
    pub fn parse(s: &str) -> Result<Self> {
        let (inner, den) = split_denominator(s)?;
        let (a, b, found) = parse_linear(&inner)?;
        let d = found.ok_or_else(|| Error::Parse(format!("no radicand in {s:?}")))?;
        Self::new(d, a, b, den)
    }

    /// Compact human-readable form, e.g. `3+2√2` or `(1+√5)/2`.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        let coef = |b: &BigInt| if b.abs().is_one() { String::new() } else { b.abs().to_string() };
        if self.b.is_zero() {
            s.push_str(&self.a.to_string());
        } else if self.a.is_zero() {
            if self.b.is_negative() {
                s.push('-');
            }
            s.push_str(&format!("{}√{}", coef(&self.b), self.d));
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            s.push_str(&format!("{}{}{}√{}", self.a, op, coef(&self.b), self.d));
        }
        if self.den == 2 {
            format!("({s})/2")
        } else {
            s
        }
    }
}

fn split_denominator(s: &str) -> Result<(String, u8)> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    if let Some(rest) = compact.strip_suffix("/2") {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (..)/2 in {s:?}")))?;
        return Ok((inner.to_string(), 2));
    }
    if let Some(inner) = compact.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return Ok((inner.to_string(), 1));
    }
    Ok((compact, 1))
}

/// Parses a signed sum of integer terms and `[c*]sqrt(D)` terms.
fn parse_linear(s: &str) -> Result<(BigInt, BigInt, Option<BigInt>)> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut radicand: Option<BigInt> = None;
    let mut first = true;
    let err = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
    while i < bytes.len() {
        let mut negative = false;
        match bytes[i] {
            b'+' => i += 1,
            b'-' => {
                negative = true;
                i += 1
            }
            _ if first => {}
            _ => return Err(err("expected + or -")),
        }
        first = false;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef = if i > start {
            Some(s[start..i].parse::<BigInt>().map_err(|_| err("bad integer"))?)
        } else {
            None
        };
        let mut is_surd = false;
        if s[i..].starts_with('*') {
            i += 1;
            if !s[i..].starts_with("sqrt(") {
                return Err(err("expected sqrt after *"));
            }
        }
        if s[i..].starts_with("sqrt(") {
            i += 5;
            let rstart = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i == rstart || i >= bytes.len() || bytes[i] != b')' {
                return Err(err("malformed sqrt(..)"));
            }
            let r: BigInt = s[rstart..i].parse().map_err(|_| err("bad radicand"))?;
            i += 1;
            match &radicand {
                Some(prev) if *prev != r => return Err(err("mixed radicands")),
                _ => radicand = Some(r),
            }
            is_surd = true;
        } else if coef.is_none() {
            return Err(err("expected a term"));
        }
        let mut value = coef.unwrap_or_else(BigInt::one);
        if negative {
            value = -value;
        }
        if is_surd {
            b += value;
        } else {
            a += value;
        }
    }
    if first {
        return Err(err("empty element"));
    }
    Ok((a, b, radicand))
}

/// Canonical textual form: `a+b*sqrt(D)` or `(a+b*sqrt(D))/2`.
impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.b.is_negative() { '-' } else { '+' };
        let body = format!("{}{}{}*sqrt({})", self.a, op, self.b.abs(), self.d);
        if self.den == 2 {
            write!(f, "({body})/2")
        } else {
            f.write_str(&body)
        }
    }
}

impl std::ops::Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { d: self.d.clone(), a: -&self.a, b: -&self.b, den: self.den }
    }
}

impl std::ops::Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

// Operator forms panic on a field mismatch; the `checked_*` methods report it.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl std::ops::$tr<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: &QuadElem) -> QuadElem {
                self.$checked(rhs).expect("QuadElem operands from different fields")
            }
        }
        impl std::ops::$tr<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $m(self, rhs: QuadElem) -> QuadElem {
                (&self).$checked(&rhs).expect("QuadElem operands from different fields")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

/// Small-integer convenience used by tests and examples.
impl QuadElem {
    pub fn from_i64(d: i64, a: i64, b: i64, den: u8) -> Result<Self> {
        Self::new(BigInt::from(d), BigInt::from(a), BigInt::from(b), den)
    }

    pub fn to_i64_parts(&self) -> Option<(i64, i64, u8)> {
        Some((self.a.to_i64()?, self.b.to_i64()?, self.den))
    }
}
