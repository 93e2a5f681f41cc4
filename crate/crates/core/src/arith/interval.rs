//! Outward-rounded rational intervals.
//!
//! Enumeration regions are bounded by square roots of embeddings, which are
//! irrational. Bounds are enclosed in intervals whose endpoints are dyadic
//! rationals; every operation rounds outward, so an integer range read off an
//! interval is always a superset of the true one. Membership of candidates is
//! decided separately with exact arithmetic.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn scale_pow2(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        x * BigRational::from_integer(pow2(e as u64))
    } else {
        x / BigRational::from_integer(pow2((-e) as u64))
    }
}

fn log2_estimate(x: &BigRational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// Largest dyadic with about `prec` significant bits that is `<= x`.
pub fn round_down(x: &BigRational, prec: u64) -> BigRational {
    if x.is_zero() || x.denom().is_one() && x.numer().bits() <= prec {
        return x.clone();
    }
    let e = prec as i64 - log2_estimate(x);
    let scaled = scale_pow2(x, e).floor();
    scale_pow2(&scaled, -e)
}

/// Smallest dyadic with about `prec` significant bits that is `>= x`.
pub fn round_up(x: &BigRational, prec: u64) -> BigRational {
    -round_down(&-x, prec)
}

/// A lower bound for √x, accurate to about `prec` bits.
pub fn sqrt_lower(x: &BigRational, prec: u64) -> BigRational {
    assert!(!x.is_negative(), "sqrt of negative value");
    if x.is_zero() {
        return BigRational::zero();
    }
    let e = prec as i64 - log2_estimate(x) / 2;
    let scaled = scale_pow2(x, 2 * e).floor().to_integer();
    let s = scaled.sqrt();
    scale_pow2(&BigRational::from_integer(s), -e)
}

/// An upper bound for √x, accurate to about `prec` bits.
pub fn sqrt_upper(x: &BigRational, prec: u64) -> BigRational {
    assert!(!x.is_negative(), "sqrt of negative value");
    if x.is_zero() {
        return BigRational::zero();
    }
    let e = prec as i64 - log2_estimate(x) / 2;
    let scaled = scale_pow2(x, 2 * e).ceil().to_integer();
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1;
    }
    scale_pow2(&BigRational::from_integer(s), -e)
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn symmetric(r: &BigRational) -> Self {
        Interval::new(-r, r.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Self {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_negative() {
            Interval::new(&self.hi * r, &self.lo * r)
        } else {
            Interval::new(&self.lo * r, &self.hi * r)
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `None` when the divisor straddles zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let inv = Interval::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn abs_upper(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Enclosure of the absolute value.
    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval::new(BigRational::zero(), self.abs_upper())
        } else if self.hi.is_positive() || self.hi.is_zero() && !self.lo.is_negative() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    /// Square root of the non-negative part of the interval.
    pub fn sqrt(&self, prec: u64) -> Self {
        let lo = if self.lo.is_positive() { sqrt_lower(&self.lo, prec) } else { BigRational::zero() };
        let hi = if self.hi.is_positive() { sqrt_upper(&self.hi, prec) } else { BigRational::zero() };
        Interval::new(lo, hi)
    }

    pub fn round_out(&self, prec: u64) -> Self {
        Interval::new(round_down(&self.lo, prec), round_up(&self.hi, prec))
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&o.lo).clone();
        let hi = (&self.hi).min(&o.hi).clone();
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    /// Smallest integer inside (or at) the lower end.
    pub fn ceil_lo(&self) -> BigInt {
        self.lo.ceil().to_integer()
    }

    pub fn floor_hi(&self) -> BigInt {
        self.hi.floor().to_integer()
    }
}

/// Enclosure of √d.
pub fn sqrt_d(d: &BigInt, prec: u64) -> Interval {
    let x = BigRational::from_integer(d.clone());
    Interval::new(sqrt_lower(&x, prec), sqrt_upper(&x, prec))
}

/// Enclosure of `a + b·√d` with good relative accuracy even when the two
/// terms nearly cancel: the small value is obtained as `N / (a - b√d)` from
/// the exact norm `N = a² − b²d`.
pub fn embed(a: &BigRational, b: &BigRational, d: &BigInt, prec: u64) -> Interval {
    let p = prec + 16;
    if b.is_zero() {
        return Interval::point(a.clone()).round_out(p);
    }
    let s = sqrt_d(d, p);
    let same_sign = a.is_zero() || a.is_positive() == b.is_positive();
    let v = if same_sign {
        Interval::point(a.clone()).add(&s.scale(b))
    } else {
        let other = Interval::point(a.clone()).add(&s.scale(&-b));
        let n = a * a - b * b * BigRational::from_integer(d.clone());
        Interval::point(n).div(&other).expect("no cancellation in the conjugate")
    };
    v.round_out(prec)
}

/// Sign of an interval when it is decided.
pub fn sign_of(iv: &Interval) -> Option<Sign> {
    if iv.lo.is_positive() {
        Some(Sign::Plus)
    } else if iv.hi.is_negative() {
        Some(Sign::Minus)
    } else if iv.lo.is_zero() && iv.hi.is_zero() {
        Some(Sign::NoSign)
    } else {
        None
    }
}
