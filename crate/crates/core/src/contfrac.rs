//! The periodic continued fraction of √D and its convergents.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{isqrt_int, QuadElem};
use crate::error::{Error, Result};

/// `√D = [k; u_1, …, u_{s−1}, 2k, u_1, …]` with its minimal period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdExpansion {
    d: BigInt,
    k: BigInt,
    period: Vec<BigInt>,
}

/// The convergent `p_i / q_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub i: usize,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub q: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FractionBounds {
    pub lower_holds: bool,
    pub upper_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormBounds {
    pub lower_holds: bool,
    pub upper_holds: bool,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub norm: BigInt,
}

/// Expands √D. Fails for `D < 2` and perfect squares.
pub fn expand_sqrt(d: &BigInt) -> Result<SurdExpansion> {
    expand_sqrt_bounded(d, usize::MAX)
}

/// Like [`expand_sqrt`], but gives up once the period exceeds `limit` terms.
pub fn expand_sqrt_bounded(d: &BigInt, limit: usize) -> Result<SurdExpansion> {
    if *d < BigInt::from(2) {
        return Err(Error::InvalidRadicand(d.clone()));
    }
    let k = isqrt_int(d);
    if &k * &k == *d {
        return Err(Error::InvalidRadicand(d.clone()));
    }
    let two_k = &k * 2;
    let mut m = BigInt::zero();
    let mut den = BigInt::one();
    let mut a = k.clone();
    let mut period = Vec::new();
    loop {
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&k + &m) / &den;
        period.push(a.clone());
        if a == two_k {
            break;
        }
        if period.len() >= limit {
            return Err(Error::PeriodTooLong { d: d.magnitude().clone(), limit });
        }
    }
    Ok(SurdExpansion { d: d.clone(), k, period })
}

impl SurdExpansion {
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    /// `(u_1, …, u_s)`, ending in `2k`.
    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    /// `(u_1, …, u_{s−1})`.
    pub fn symmetric_part(&self) -> &[BigInt] {
        &self.period[..self.period.len() - 1]
    }

    pub fn s(&self) -> usize {
        self.period.len()
    }

    /// `r = ⌈(s−1)/2⌉`.
    pub fn r(&self) -> usize {
        self.s() / 2
    }

    /// `u_i` of the infinite expansion, with `u_0 = k`.
    pub fn u(&self, i: usize) -> &BigInt {
        if i == 0 {
            &self.k
        } else {
            &self.period[(i - 1) % self.s()]
        }
    }

    pub fn convergent_iter(&self) -> ConvergentIter<'_> {
        ConvergentIter {
            e: self,
            i: 0,
            prev: (BigInt::one(), BigInt::zero()),
            cur: None,
        }
    }

    pub fn convergents(&self, n: usize) -> Vec<Convergent> {
        self.convergent_iter().take(n).collect()
    }

    pub fn convergent(&self, i: usize) -> Convergent {
        self.convergent_iter().nth(i).expect("convergent iterator is infinite")
    }

    /// `α_i = p_i + q_i√D`.
    pub fn alpha(&self, i: usize) -> QuadElem {
        self.alpha_of(&self.convergent(i))
    }

    pub fn alpha_of(&self, c: &Convergent) -> QuadElem {
        QuadElem::from_parts(&self.d, c.p.clone(), c.q.clone())
    }

    pub fn check_fraction_bounds(&self, i: usize) -> FractionBounds {
        self.fraction_bounds_at(&self.convergent(i))
    }

    /// Checks `1/((u+2)q²) < |p/q − √D| < 1/(u q²)` with `u = u_{i+1}`.
    ///
    /// With `N = p² − Dq²` and `|p − q√D| = |N|/(p + q√D)`, the upper bound is
    /// `u q |N| − p < q√D` and the lower bound is `(u+2) q |N| − p > q√D`.
    pub fn fraction_bounds_at(&self, c: &Convergent) -> FractionBounds {
        let u = self.u(c.i + 1);
        let n = (&c.p * &c.p - &self.d * &c.q * &c.q).abs();
        let q2d = &c.q * &c.q * &self.d;
        let l = u * &c.q * &n - &c.p;
        let upper_holds = l.is_negative() || &l * &l < q2d;
        let r = (u + 2u32) * &c.q * &n - &c.p;
        let lower_holds = r.is_positive() && q2d < &r * &r;
        FractionBounds { lower_holds, upper_holds }
    }

    pub fn check_norm_bounds(&self, i: usize) -> NormBounds {
        self.norm_bounds_at(&self.convergent(i))
    }

    /// Checks `2√D/(u+5/2) < |N(α_i)| < 2√D/(u−1/2)` with `u = u_{i+1}`, as
    /// `16D < (|N|(2u+5))²` and `(|N|(2u−1))² < 16D`.
    pub fn norm_bounds_at(&self, c: &Convergent) -> NormBounds {
        let u2 = self.u(c.i + 1) * 2u32;
        let norm = &c.p * &c.p - &self.d * &c.q * &c.q;
        let n = norm.abs();
        let d16 = &self.d * 16u32;
        let lo = &n * (&u2 + 5u32);
        let hi = &n * (&u2 - 1u32);
        NormBounds {
            lower_holds: d16 < &lo * &lo,
            upper_holds: &hi * &hi < d16,
            norm,
        }
    }

    /// Even convergents increase towards √D from below, odd ones decrease
    /// towards it from above, for all indices `< n`.
    pub fn interlacing_check(&self, n: usize) -> bool {
        let cs = self.convergents(n);
        let below = |c: &Convergent| &c.p * &c.p < &self.d * &c.q * &c.q;
        let less = |x: &Convergent, y: &Convergent| &x.p * &y.q < &y.p * &x.q;
        for (idx, c) in cs.iter().enumerate() {
            if below(c) != idx.is_even() {
                return false;
            }
            if let Some(next) = cs.get(idx + 2) {
                let ordered = if idx.is_even() { less(c, next) } else { less(next, c) };
                if !ordered {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for SurdExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sqrt({}) = [{}; ", self.d, self.k)?;
        let parts: Vec<String> = self.period.iter().map(|u| u.to_string()).collect();
        write!(f, "({})]", parts.join(", "))
    }
}

/// Infinite iterator over the convergents of a [`SurdExpansion`].
pub struct ConvergentIter<'a> {
    e: &'a SurdExpansion,
    i: usize,
    prev: (BigInt, BigInt),
    cur: Option<(BigInt, BigInt)>,
}

impl Iterator for ConvergentIter<'_> {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let (p, q) = match &self.cur {
            None => (self.e.k.clone(), BigInt::one()),
            Some((p, q)) => {
                let u = self.e.u(self.i);
                (u * p + &self.prev.0, u * q + &self.prev.1)
            }
        };
        if let Some(cur) = self.cur.take() {
            self.prev = cur;
        }
        self.cur = Some((p.clone(), q.clone()));
        let c = Convergent { i: self.i, p, q };
        self.i += 1;
        Some(c)
    }
}

/// `sign(N(α_i))` expected from the interlacing: `+` for odd `i`, `−` for even.
pub fn expected_norm_sign(i: usize) -> Sign {
    if i.is_odd() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
