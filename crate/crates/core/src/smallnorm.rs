//! Elements of small norm, ramified primes and powers of convergent elements.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::factorize;
use crate::arith::{isqrt, FactorBudget, QuadElem};
use crate::contfrac::{expand_sqrt, NormBounds, SurdExpansion};
use crate::error::{Error, Result};

/// Strict upper bound on `|N(μ)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormBound {
    /// `√D / 2`
    HalfRoot,
    /// `√D / 8`
    EighthRoot,
    Rational(BigRational),
}

impl NormBound {
    /// The square of the bound, which is rational in every case.
    pub fn squared(&self, d: &BigInt) -> BigRational {
        match self {
            NormBound::HalfRoot => BigRational::new(d.clone(), BigInt::from(4)),
            NormBound::EighthRoot => BigRational::new(d.clone(), BigInt::from(64)),
            NormBound::Rational(b) => b * b,
        }
    }

    /// `|n| < bound`, decided exactly.
    pub fn admits(&self, n: &BigInt, d: &BigInt) -> bool {
        let n2 = BigRational::from_integer(n * n);
        n2 < self.squared(d)
    }

    pub fn describe(&self, d: &BigInt) -> String {
        match self {
            NormBound::HalfRoot => format!("sqrt({d})/2"),
            NormBound::EighthRoot => format!("sqrt({d})/8"),
            NormBound::Rational(b) => b.to_string(),
        }
    }
}

/// Which ring the enumeration runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    /// `ℤ[√D]`
    Zsqrt,
    /// The full ring of integers: half-integer coordinates when `D ≡ 1 (mod 4)`.
    Integers,
}

/// `μ = n·α_i` or `μ = n·α_i′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Match {
    pub i: usize,
    pub conjugate: bool,
    /// The multiplier `n` as a reduced fraction.
    pub n: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallNormElement {
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub x: BigInt,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub y: BigInt,
    pub den: u8,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub norm: BigInt,
    #[serde(rename = "match")]
    pub classified_as: Option<Match>,
}

impl SmallNormElement {
    pub fn mu(&self, d: &BigInt) -> QuadElem {
        QuadElem::new(d.clone(), self.x.clone(), self.y.clone(), self.den).expect("enumerated element is integral")
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Primitive `μ = (x + y√D)/den` with `1 ≤ y ≤ y_max`, `μ > 0` and
/// `0 < |N(μ)| < bound`, sorted by `(y, x)`. Primitive means `μ` is not an
/// integer multiple `n ≥ 2` of another element of the ring.
///
/// Since `|x − y√D|·|x + y√D| = |N|·den²`, every solution with `x > 0` lies
/// within `W = ⌈bound·den²/(y√D)⌉` of `y√D`, and those with `x < 0` within
/// `W` of `−y√D`. Each window is widened by one on both sides.
pub fn enumerate_small_norm(d: &BigInt, bound: &NormBound, y_max: u64, ring: Ring) -> Vec<SmallNormElement> {
    let halves = ring == Ring::Integers && d.mod_floor(&BigInt::from(4)).is_one();
    let b2 = bound.squared(d);
    let mut out: Vec<SmallNormElement> = (1..=y_max)
        .into_par_iter()
        .flat_map_iter(|y| {
            let y = BigInt::from(y);
            let y2d = &y * &y * d;
            let x0 = BigInt::from(isqrt(y2d.magnitude()));
            let dens: &[u8] = if halves { &[1, 2] } else { &[1] };
            let mut found = Vec::new();
            for &den in dens {
                let den4 = BigInt::from(den as u32).pow(4);
                // W² ≥ bound²·den⁴/(y²D)
                let w2 = ceil_div(&(b2.numer() * &den4), &(b2.denom() * &y2d));
                let w = BigInt::from(isqrt(w2.magnitude())) + 2;
                for centre in [x0.clone(), -&x0] {
                    let mut x = &centre - &w;
                    while x <= &centre + &w + 1 {
                        if let Some(e) = candidate(d, &x, &y, den, &y2d, bound, halves) {
                            found.push(e);
                        }
                        x += 1;
                    }
                }
            }
            found
        })
        .collect();
    out.sort_by(|a, b| (&a.y, &a.x).cmp(&(&b.y, &b.x)));
    out.dedup_by(|a, b| a.x == b.x && a.y == b.y && a.den == b.den);
    out
}

fn candidate(
    d: &BigInt,
    x: &BigInt,
    y: &BigInt,
    den: u8,
    y2d: &BigInt,
    bound: &NormBound,
    halves: bool,
) -> Option<SmallNormElement> {
    if den == 2 && !(x.is_odd() && y.is_odd()) {
        return None;
    }
    if !x.gcd(y).is_one() {
        return None;
    }
    // x + y√D and x, y both odd is twice an element of the ring
    if den == 1 && halves && x.is_odd() && y.is_odd() {
        return None;
    }
    // positive leading embedding: x + y√D > 0
    if x.is_negative() && x * x >= *y2d {
        return None;
    }
    let num = x * x - y2d;
    if num.is_zero() {
        return None;
    }
    let dd = BigInt::from(den as u32 * den as u32);
    let (norm, rem) = num.div_rem(&dd);
    debug_assert!(rem.is_zero());
    if !bound.admits(&norm, d) {
        return None;
    }
    Some(SmallNormElement { x: x.clone(), y: y.clone(), den, norm, classified_as: None })
}

/// Exact lookup of convergent elements by `(p, q)`.
pub struct ConvergentIndex {
    map: HashMap<(BigInt, BigInt), usize>,
}

impl ConvergentIndex {
    /// All convergents with `q ≤ q_max`.
    pub fn new(e: &SurdExpansion, q_max: &BigInt) -> Self {
        let mut map = HashMap::new();
        for c in e.convergent_iter() {
            if &c.q > q_max {
                break;
            }
            map.insert((c.p, c.q), c.i);
        }
        ConvergentIndex { map }
    }

    pub fn find(&self, p: &BigInt, q: &BigInt) -> Option<usize> {
        self.map.get(&(p.clone(), q.clone())).copied()
    }
}

/// Writes `μ` as `n·α_i` or `n·α_i′` if possible.
pub fn classify(el: &SmallNormElement, index: &ConvergentIndex) -> Option<Match> {
    let g = el.x.gcd(&el.y);
    let p = el.x.abs() / &g;
    let q = &el.y / &g;
    let i = index.find(&p, &q)?;
    let conjugate = el.x.is_negative();
    let mut n = BigRational::new(g, BigInt::from(el.den as u32));
    if conjugate {
        n = -n;
    }
    Some(Match { i, conjugate, n: n.to_string() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditPart {
    pub bound: String,
    pub ring: Ring,
    pub elements: Vec<SmallNormElement>,
    pub unmatched: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    #[serde(rename = "D", serialize_with = "crate::json::ser_bigint")]
    pub d: BigInt,
    pub y_max: u64,
    pub parts: Vec<AuditPart>,
}

impl AuditReport {
    pub fn unmatched(&self) -> usize {
        self.parts.iter().map(|p| p.unmatched).sum()
    }
}

fn audit_part(d: &BigInt, e: &SurdExpansion, bound: NormBound, y_max: u64, ring: Ring) -> AuditPart {
    let mut elements = enumerate_small_norm(d, &bound, y_max, ring);
    let index = ConvergentIndex::new(e, &BigInt::from(y_max));
    for el in &mut elements {
        el.classified_as = classify(el, &index);
    }
    let unmatched = elements.iter().filter(|e| e.classified_as.is_none()).count();
    AuditPart { bound: bound.describe(d), ring, elements, unmatched }
}

/// Matches every small-norm element against the convergent elements: the
/// `√D/2` bound over `ℤ[√D]`, and for `D ≡ 1 (mod 4)` also the `√D/8` bound
/// over the full ring of integers. `D` is expected to be squarefree.
pub fn audit_lemma(d: &BigInt, y_max: u64) -> Result<AuditReport> {
    let e = expand_sqrt(d)?;
    let mut parts = vec![audit_part(d, &e, NormBound::HalfRoot, y_max, Ring::Zsqrt)];
    if d.mod_floor(&BigInt::from(4)).is_one() {
        parts.push(audit_part(d, &e, NormBound::EighthRoot, y_max, Ring::Integers));
    }
    Ok(AuditReport { d: d.clone(), y_max, parts })
}

/// The ramified primes of `ℚ(√D)`: divisors of `D`, and 2 when `D ≡ 2, 3 (mod 4)`.
pub fn ramified_primes(d: &BigInt, budget: FactorBudget) -> Result<Vec<BigUint>> {
    let f = factorize(d.magnitude(), budget).ok_or_else(|| Error::Undetermined { cofactor: d.magnitude().clone() })?;
    let mut ps: Vec<BigUint> = f.into_iter().map(|(p, _)| p).collect();
    let r = d.mod_floor(&BigInt::from(4)).to_u32().unwrap();
    if (r == 2 || r == 3) && !ps.contains(&BigUint::from(2u32)) {
        ps.push(BigUint::from(2u32));
    }
    ps.sort();
    Ok(ps)
}

/// Ramified primes whose prime ideal `P` divides `(x)`.
///
/// Membership `x ∈ P` is tested directly (`P = (p, √D)` for `p | D`, and
/// `P = (2, 1 + √D)` for `D ≡ 3 (mod 4)`) and cross-checked against `p | N(x)`,
/// which is equivalent because `P` is the only prime above `p`.
pub fn ramified_divisibility(x: &QuadElem, budget: FactorBudget) -> Result<Vec<BigUint>> {
    let d = x.d();
    let mut out = Vec::new();
    for p in ramified_primes(d, budget)? {
        let pb = BigInt::from(p.clone());
        let in_ideal = if (d % &pb).is_zero() {
            // x = (a + b√D)/den maps to a/den in O_K/P; den is a unit unless p = 2,
            // and p = 2 | D forces den = 1.
            (x.a() % &pb).is_zero()
        } else {
            (x.a() + x.b()).is_even()
        };
        let by_norm = (x.norm() % &pb).is_zero();
        if in_ideal != by_norm {
            return Err(Error::Internal(format!("ideal test disagrees with norm test for {x} at {p}")));
        }
        if in_ideal {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerTrace {
    pub i: usize,
    pub m: u32,
    #[serde(serialize_with = "ser_elem")]
    pub power: QuadElem,
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub norm: BigInt,
    pub primitive: bool,
    pub norm_ok: bool,
    pub greater_than_one: bool,
    pub located_index: Option<usize>,
    #[serde(serialize_with = "ser_opt_bigint")]
    pub u_next: Option<BigInt>,
    /// The norm bounds at the located index.
    pub bounds_at_j: Option<NormBounds>,
    /// `log u_{j+1} / log D`, for reporting only.
    pub exponent: Option<f64>,
}

fn ser_elem<S: serde::Serializer>(x: &QuadElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_bigint<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn log_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `α_i^m`, and its position among the convergent elements when it is
/// primitive and exceeds 1. A location is guaranteed when also `|N| < √D/2`.
pub fn power_trace(e: &SurdExpansion, i: usize, m: u32) -> PowerTrace {
    let d = e.d();
    let power = e.alpha(i).pow(m);
    let norm = power.norm();
    let primitive = power.a().gcd(power.b()).is_one();
    let norm_ok = NormBound::HalfRoot.admits(&norm, d);
    let greater_than_one = (&power - &QuadElem::one(d)).sign() == Sign::Plus;
    let mut trace = PowerTrace {
        i,
        m,
        power: power.clone(),
        norm,
        primitive,
        norm_ok,
        greater_than_one,
        located_index: None,
        u_next: None,
        bounds_at_j: None,
        exponent: None,
    };
    if !(primitive && greater_than_one) {
        return trace;
    }
    for c in e.convergent_iter() {
        if &c.q > power.b() {
            break;
        }
        if &c.p == power.a() && &c.q == power.b() {
            let u = e.u(c.i + 1).clone();
            trace.exponent = Some(log_big(&u) / log_big(d));
            trace.bounds_at_j = Some(e.norm_bounds_at(&c));
            trace.located_index = Some(c.i);
            trace.u_next = Some(u);
            break;
        }
    }
    trace
}

impl fmt::Display for SmallNormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 2 {
            write!(f, "({}+{}*sqrt(D))/2", self.x, self.y)
        } else {
            write!(f, "{}+{}*sqrt(D)", self.x, self.y)
        }
    }
}
