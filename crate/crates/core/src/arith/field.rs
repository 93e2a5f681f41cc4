use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::elem::QuadElem;
use super::interval::{embed, Interval};
use super::intutil::surd_sign;

/// An element `a + b·√D` of ℚ(√D) with rational coordinates.
///
/// Used where denominators other than 1 and 2 appear: Gram matrices, their
/// inverses, and the completed-square decomposition of a form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    d: BigInt,
    a: BigRational,
    b: BigRational,
}

impl FieldElem {
    pub fn new(d: &BigInt, a: BigRational, b: BigRational) -> Self {
        FieldElem { d: d.clone(), a, b }
    }

    pub fn from_quad(x: &QuadElem) -> Self {
        let den = BigInt::from(x.den());
        FieldElem {
            d: x.d().clone(),
            a: BigRational::new(x.a().clone(), den.clone()),
            b: BigRational::new(x.b().clone(), den),
        }
    }

    pub fn from_integer(d: &BigInt, n: BigInt) -> Self {
        FieldElem::new(d, BigRational::from_integer(n), BigRational::zero())
    }

    pub fn zero(d: &BigInt) -> Self {
        FieldElem::new(d, BigRational::zero(), BigRational::zero())
    }

    pub fn one(d: &BigInt) -> Self {
        FieldElem::new(d, BigRational::one(), BigRational::zero())
    }

    pub fn sqrt_d(d: &BigInt) -> Self {
        FieldElem::new(d, BigRational::zero(), BigRational::one())
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        FieldElem::new(&self.d, self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        FieldElem::new(&self.d, &self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        FieldElem::new(&self.d, &self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> Self {
        FieldElem::new(&self.d, -&self.a, -&self.b)
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        let d = BigRational::from_integer(self.d.clone());
        FieldElem::new(
            &self.d,
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
        )
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        FieldElem::new(&self.d, &self.a * r, &self.b * r)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(FieldElem::new(&self.d, &self.a / &n, -&self.b / &n))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    fn cleared(&self) -> (BigInt, BigInt) {
        // Multiply by the positive common denominator; signs are unchanged.
        let l = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&l / self.a.denom());
        let b = self.b.numer() * (&l / self.b.denom());
        (a, b)
    }

    /// Sign under the identity embedding.
    pub fn sign(&self) -> Sign {
        let (a, b) = self.cleared();
        surd_sign(&a, &b, &self.d)
    }

    pub fn conjugate_sign(&self) -> Sign {
        let (a, b) = self.cleared();
        surd_sign(&a, &-b, &self.d)
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign() == Sign::Plus && self.conjugate_sign() == Sign::Plus
    }

    pub fn is_totally_nonnegative(&self) -> bool {
        self.sign() != Sign::Minus && self.conjugate_sign() != Sign::Minus
    }

    /// Converts back to a ring element when the value is integral.
    pub fn to_quad(&self) -> Option<QuadElem> {
        for den in [1u32, 2] {
            let a = &self.a * BigRational::from_integer(BigInt::from(den));
            let b = &self.b * BigRational::from_integer(BigInt::from(den));
            if a.is_integer() && b.is_integer() {
                return QuadElem::with_den(self.d.clone(), a.to_integer(), b.to_integer(), den).ok();
            }
        }
        None
    }

    /// Rigorous enclosure of the embedding (`conj = false`) or conjugate embedding.
    pub fn embedding(&self, conj: bool, prec: u64) -> Interval {
        let b = if conj { -&self.b } else { self.b.clone() };
        embed(&self.a, &b, &self.d, prec)
    }

    pub fn has_integer_coords(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*sqrt({})", self.a, op, self.b.abs(), self.d)
    }
}
