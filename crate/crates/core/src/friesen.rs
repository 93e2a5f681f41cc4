//! Fields with a prescribed symmetric period.
//!
//! For a symmetric sequence `(u_1, …, u_{s−1})`, the radicands `D` with
//! `√D = [k; u_1, …, u_{s−1}, 2k]` form the values of a quadratic in `k` along
//! an arithmetic progression. Every candidate is confirmed by re-expanding √D.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{squarefree_status, FactorBudget, SquarefreeMode, SquarefreeStatus};
use crate::contfrac::expand_sqrt_bounded;
use crate::error::{Error, Result};

/// A symmetric sequence `(u_1, …, u_{s−1})` of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymSequence {
    values: Vec<BigInt>,
}

impl SymSequence {
    pub fn new(values: Vec<BigInt>) -> Result<Self> {
        if values.iter().any(|u| !u.is_positive()) {
            return Err(Error::NonPositiveEntry);
        }
        if !values.iter().eq(values.iter().rev()) {
            return Err(Error::NotSymmetric);
        }
        Ok(SymSequence { values })
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&u| BigInt::from(u)).collect())
    }

    /// Parses a comma-separated list; the empty string is the empty sequence.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s).trim();
        if s.is_empty() {
            return Self::new(Vec::new());
        }
        let values = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                crate::json::parse_decimal(t).map_err(|_| Error::Parse(format!("bad sequence entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn s(&self) -> usize {
        self.values.len() + 1
    }

    /// `r = ⌈(s−1)/2⌉`.
    pub fn r(&self) -> usize {
        self.values.len().div_ceil(2)
    }

    /// `(q_{−1}, q_0, …, q_{s−1})`, independent of `k`.
    fn denominators(&self) -> Vec<BigInt> {
        let mut q = vec![BigInt::zero(), BigInt::one()];
        for u in &self.values {
            let n = q.len();
            let next = u * &q[n - 1] + &q[n - 2];
            q.push(next);
        }
        q
    }

    /// Product of `[[u, 1], [1, 0]]` over the sequence followed by `2k`.
    fn period_matrix(&self, k: &BigInt) -> [BigInt; 4] {
        let mut m = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
        for u in self.values.iter().chain(std::iter::once(&(k * 2))) {
            m = [u * &m[0] + &m[1], m[0].clone(), u * &m[2] + &m[3], m[2].clone()];
        }
        m
    }

    /// `(a, c, d)` from the product `[[a, b], [c, d]]` over the sequence alone.
    fn sequence_matrix(&self) -> (BigInt, BigInt, BigInt) {
        let mut m = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
        for u in &self.values {
            m = [u * &m[0] + &m[1], m[0].clone(), u * &m[2] + &m[3], m[2].clone()];
        }
        let [a, _, c, d] = m;
        (a, c, d)
    }
}

impl fmt::Display for SymSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|u| u.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Friesen's criterion: `q_{s−2}` is even, or `(q_{s−2}² − (−1)^s)/q_{s−1}` is.
pub fn parity_condition(seq: &SymSequence) -> Result<bool> {
    let q = seq.denominators();
    let n = q.len();
    let (q_sm2, q_sm1) = (&q[n - 2], &q[n - 1]);
    if q_sm2.is_even() {
        return Ok(true);
    }
    let sign = if seq.s().is_even() { BigInt::one() } else { -BigInt::one() };
    let num = q_sm2 * q_sm2 - sign;
    let (quot, rem) = num.div_rem(q_sm1);
    if !rem.is_zero() {
        return Err(Error::Internal(format!(
            "q_(s-2)^2 - (-1)^s is not divisible by q_(s-1) for {seq}"
        )));
    }
    Ok(quot.is_even())
}

/// The radicand `D` with `√D = [k; u_1, …, u_{s−1}, 2k]` and exactly that
/// minimal period, if one exists.
///
/// The purely periodic tail `x` is the fixed point of the period matrix
/// `[[A, B], [C, E]]`, so `√D = k + 1/x` forces `2Bk = A − E` and
/// `D = ((E − A)² + 4BC) / (4B²)`. The result is accepted only after
/// re-expanding √D.
pub fn derive_d(k: &BigInt, seq: &SymSequence) -> Option<BigInt> {
    if !k.is_positive() {
        return None;
    }
    let [a, b, c, e] = seq.period_matrix(k);
    if &b * k * 2 != &a - &e {
        return None;
    }
    let disc = (&e - &a) * (&e - &a) + &b * &c * 4u32;
    let den = &b * &b * 4u32;
    let (d, rem) = disc.div_rem(&den);
    if !rem.is_zero() {
        return None;
    }
    let ex = expand_sqrt_bounded(&d, seq.s() + 1).ok()?;
    let mut want = seq.values.clone();
    want.push(k * 2);
    (ex.k() == k && ex.period() == want.as_slice()).then_some(d)
}

/// A radicand found by [`search_k`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldHit {
    #[serde(serialize_with = "crate::json::ser_bigint")]
    pub k: BigInt,
    #[serde(rename = "D", serialize_with = "crate::json::ser_bigint")]
    pub d: BigInt,
    /// `None` when the factoring budget ran out before a verdict.
    #[serde(serialize_with = "ser_sf")]
    pub squarefree: Option<SquarefreeStatus>,
    pub roundtrip_verified: bool,
}

fn ser_sf<S: serde::Serializer>(x: &Option<SquarefreeStatus>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        None => s.serialize_str("undetermined"),
        Some(st) => s.serialize_str(&st.to_string()),
    }
}

/// The `k` for which `D` is integral: `k ≡ k0 (mod step)`, if any.
///
/// With `[[a, b], [c, d]]` the matrix of the sequence alone,
/// `D = k² + (2ck + d)/a`.
pub fn k_progression(seq: &SymSequence) -> Option<(BigInt, BigInt)> {
    let (a, c, d) = seq.sequence_matrix();
    let two_c = &c * 2u32;
    let g = two_c.gcd(&a);
    if !(&d % &g).is_zero() {
        return None;
    }
    let step = &a / &g;
    if step.is_one() {
        return Some((BigInt::zero(), step));
    }
    let ext = (&two_c / &g).extended_gcd(&step);
    let k0 = (-(&d / &g) * ext.x).mod_floor(&step);
    Some((k0, step))
}

fn candidate_d(k: &BigInt, seq_matrix: &(BigInt, BigInt, BigInt)) -> BigInt {
    let (a, c, d) = seq_matrix;
    k * k + (c * k * 2 + d) / a
}

fn probe(k: &BigInt, seq: &SymSequence, mode: SquarefreeMode, budget: FactorBudget) -> Option<FieldHit> {
    let d = derive_d(k, seq)?;
    let squarefree = squarefree_status(d.magnitude(), mode, budget).ok();
    Some(FieldHit { k: k.clone(), d, squarefree, roundtrip_verified: true })
}

const CHUNK: u64 = 256;

/// All `k` in `lo..=hi` for which [`derive_d`] succeeds, sorted by `k`, each
/// annotated with its squarefree status. Returns an error if the progression
/// holds more than `max_candidates` values in the range.
pub fn search_k(
    seq: &SymSequence,
    lo: &BigInt,
    hi: &BigInt,
    mode: SquarefreeMode,
    budget: FactorBudget,
    max_candidates: u64,
) -> Result<Vec<FieldHit>> {
    let Some((k0, step)) = k_progression(seq) else {
        return Ok(Vec::new());
    };
    let lo = lo.max(&BigInt::one()).clone();
    if hi < &lo {
        return Ok(Vec::new());
    }
    let first = &lo + (&k0 - &lo).mod_floor(&step);
    if &first > hi {
        return Ok(Vec::new());
    }
    let count = (hi - &first) / &step + 1u32;
    let count = count
        .to_u64()
        .filter(|&c| c <= max_candidates)
        .ok_or(Error::EnumerationBudget(max_candidates))?;
    let mut hits: Vec<FieldHit> = (0..count)
        .into_par_iter()
        .filter_map(|j| probe(&(&first + &step * j), seq, mode, budget))
        .collect();
    hits.sort_by(|x, y| x.k.cmp(&y.k));
    Ok(hits)
}

/// The first `k >= start` in the progression whose radicand passes the round
/// trip and `accept`, scanning at most `max_candidates` progression values.
pub fn search_first(
    seq: &SymSequence,
    start: &BigInt,
    mode: SquarefreeMode,
    budget: FactorBudget,
    max_candidates: u64,
    accept: impl Fn(&FieldHit) -> bool + Sync,
) -> Result<FieldHit> {
    let (k0, step) = k_progression(seq)
        .ok_or_else(|| Error::NoFieldHit(format!("no k makes D integral for {seq}")))?;
    let start = start.max(&BigInt::one()).clone();
    let first = &start + (&k0 - &start).mod_floor(&step);
    let seq_matrix = seq.sequence_matrix();
    let mut done = 0u64;
    while done < max_candidates {
        let n = CHUNK.min(max_candidates - done);
        let found = (done..done + n)
            .into_par_iter()
            .filter_map(|j| {
                let k = &first + &step * j;
                // Cheap pre-filter: below this bound the period cannot be intact.
                if candidate_d(&k, &seq_matrix) < BigInt::from(2) {
                    return None;
                }
                probe(&k, seq, mode, budget).filter(|h| accept(h))
            })
            .min_by(|x, y| x.k.cmp(&y.k));
        if let Some(hit) = found {
            return Ok(hit);
        }
        done += n;
    }
    Err(Error::NoFieldHit(format!(
        "no admissible k among {max_candidates} progression values from {start} for {seq}"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    /// `u_1 = 2`, `u_{i+1} = u_i³`.
    Minimal,
    /// `u_i = 3^{3^{i−1}}` with `s ≡ 2 (mod 3)`.
    Threes,
}

impl std::str::FromStr for Base {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(Base::Minimal),
            "threes" => Ok(Base::Threes),
            _ => Err(Error::Parse(format!("unknown base {s:?}; expected minimal or threes"))),
        }
    }
}

/// Output of [`construct_sequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub seq: SymSequence,
    pub m: usize,
    pub base: Base,
    /// Factor applied to the central entry to satisfy the parity condition.
    pub central_scale: u64,
    pub parity: bool,
}

/// `u_1 ≥ 2` and `u_{i+1} ≥ u_i³` for `1 ≤ i ≤ r−1`.
pub fn growth_condition(seq: &SymSequence) -> bool {
    let v = seq.values();
    let r = seq.r();
    if r == 0 {
        return false;
    }
    v[0] >= BigInt::from(2) && (1..r).all(|i| v[i] >= v[i - 1].pow(3))
}

const SCALE_WINDOW: u64 = 64;

/// A symmetric sequence with `r = ⌈(s−1)/2⌉ ≥ 2M+2`, rapidly increasing up
/// to its centre, and satisfying the parity condition.
///
/// The first half `u_1, …, u_r` comes from the chosen base and is mirrored
/// around a single central entry `u_r`, so `s = 2r`. With `Threes`, `r` is the
/// least value `≥ 2M+2` with `r ≡ 1 (mod 3)`, giving `s ≡ 2 (mod 3)`. If the
/// parity condition fails, the central entry is multiplied by `t = 2, 3, …`.
pub fn construct_sequence(m: usize, base: Base) -> Result<Construction> {
    if m == 0 {
        return Err(Error::NoAdmissibleSequence("M must be at least 1".into()));
    }
    let mut r = 2 * m + 2;
    if base == Base::Threes {
        while r % 3 != 1 {
            r += 1;
        }
    }
    let half: Vec<BigInt> = match base {
        Base::Minimal => std::iter::successors(Some(BigInt::from(2)), |u| Some(u.pow(3))).take(r).collect(),
        Base::Threes => (0..r).map(|i| BigInt::from(3).pow(3u32.pow(i as u32))).collect(),
    };
    for t in 1..=SCALE_WINDOW {
        let mut values = half.clone();
        values[r - 1] *= t;
        values.extend(half[..r - 1].iter().rev().cloned());
        let seq = SymSequence::new(values)?;
        debug_assert_eq!(seq.r(), r);
        if !growth_condition(&seq) {
            continue;
        }
        if parity_condition(&seq)? {
            return Ok(Construction { seq, m, base, central_scale: t, parity: true });
        }
    }
    Err(Error::NoAdmissibleSequence(format!(
        "parity condition fails for every central scale up to {SCALE_WINDOW} (M = {m}, r = {r})"
    )))
}
