//! Re-checks a certificate from its stored inputs alone.
//!
//! This path shares only the big-integer library, the squarefree tester and
//! the text parsers with the generator. The continued fraction, convergents
//! and pair enumeration are recomputed here with a different lattice basis:
//! pairs are scanned in coordinates `w = m_1·α_t + m_2·α_{t+1}` of two
//! consecutive convergent elements, which form a `ℤ`-basis of `ℤ[√D]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::record::{statement, Certificate, Soundness, VerdictName, CERTIFICATE_VERSION};
use crate::arith::primes::FactorBudget;
use crate::arith::{squarefree_status, QuadElem, SquarefreeStatus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted { soundness: Soundness },
    Rejected(String),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted { soundness } => write!(f, "accepted ({})", soundness_name(*soundness)),
            Verdict::Rejected(why) => write!(f, "rejected: {why}"),
        }
    }
}

fn soundness_name(s: Soundness) -> &'static str {
    match s {
        Soundness::Proved => "proved",
        Soundness::Conditional => "conditional",
        Soundness::Refuted => "refuted",
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub factor_budget: FactorBudget,
    /// Lattice points scanned per pair before rejecting.
    pub scan_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { factor_budget: FactorBudget::default(), scan_budget: 200_000_000 }
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Verdict::Rejected(format!($($fmt)+));
        }
    };
}

pub fn verify_certificate(cert: &Certificate) -> Verdict {
    verify_with(cert, &VerifyOptions::default())
}

pub fn verify_with(cert: &Certificate, opts: &VerifyOptions) -> Verdict {
    ensure!(cert.version == CERTIFICATE_VERSION, "unsupported version {}", cert.version);
    let d = &cert.d;
    ensure!(d > &BigInt::one(), "D = {d} must exceed 1");
    let root = d.sqrt();
    ensure!(&root * &root != *d, "D = {d} is a perfect square");

    // Squarefree status at the stated mode.
    let mode = match cert.squarefree.mode() {
        Ok(m) => m,
        Err(e) => return Verdict::Rejected(format!("squarefree check: {e}")),
    };
    let status = match squarefree_status(d.magnitude(), mode, opts.factor_budget) {
        Ok(s) => s,
        Err(e) => return Verdict::Rejected(format!("squarefree check: {e}")),
    };
    let (verdict, witness) = match &status {
        SquarefreeStatus::Proved => (VerdictName::Proved, None),
        SquarefreeStatus::NotSquarefree { witness } => (VerdictName::NotSquarefree, Some(witness)),
        SquarefreeStatus::ProbablySquarefree { .. } => (VerdictName::ProbablySquarefree, None),
    };
    ensure!(
        verdict == cert.squarefree.verdict && witness == cert.squarefree.witness.as_ref(),
        "squarefree check: recomputed {status}, certificate says {:?}",
        cert.squarefree.verdict
    );
    ensure!(verdict != VerdictName::NotSquarefree, "squarefree check: {d} is not squarefree ({status})");

    // Continued fraction round trip.
    ensure!(cert.k == root, "k = {} but ⌊√D⌋ = {root}", cert.k);
    let seq = &cert.sequence;
    ensure!(seq.iter().all(|u| u.is_positive()), "sequence has a non-positive entry");
    ensure!(seq.iter().eq(seq.iter().rev()), "sequence is not symmetric");
    let Some(period) = period_of(d, &root, seq.len() + 1) else {
        return Verdict::Rejected(format!("expansion of √{d} is not (k; sequence, 2k)"));
    };
    ensure!(
        period.len() == seq.len() + 1 && period[..seq.len()] == seq[..] && period[seq.len()] == &root * 2,
        "expansion of √{d} is not (k; sequence, 2k)"
    );

    // Witnesses.
    let w = cert.witnesses.len();
    ensure!(cert.m >= 1 && w == cert.m as usize + 1, "M = {} needs {} witnesses, found {w}", cert.m, cert.m + 1);
    let idx: Vec<usize> = cert.witnesses.iter().map(|x| x.i).collect();
    ensure!(idx.iter().all(|i| i % 2 == 1), "witness indices {idx:?} must be odd");
    ensure!(idx.windows(2).all(|p| p[0] < p[1]), "witness indices {idx:?} must increase");
    let last = *idx.last().unwrap();
    let conv = Convergents::new(&root, &period, last + 3);
    let mut alphas = Vec::with_capacity(w);
    for x in &cert.witnesses {
        let (p, q) = conv.at(x.i as isize);
        ensure!(x.p == *p && x.q == *q, "witness mismatch at i = {}: stored ({}, {}), computed ({p}, {q})", x.i, x.p, x.q);
        alphas.push((p.clone(), q.clone()));
    }

    // Pairs.
    let expected: Vec<(usize, usize)> = (0..w).flat_map(|x| (x + 1..w).map(move |y| (x, y))).collect();
    ensure!(cert.pairs.len() == expected.len(), "{} pairs stored, {} expected", cert.pairs.len(), expected.len());
    let mut any_violator = false;
    for (rec, &(x, y)) in cert.pairs.iter().zip(&expected) {
        ensure!(
            rec.i == idx[x] && rec.j == idx[y],
            "pair ({}, {}) out of order; expected ({}, {})",
            rec.i,
            rec.j,
            idx[x],
            idx[y]
        );
        let scan = match scan_pair(d, &alphas[x], &alphas[y], &conv, opts.scan_budget) {
            Ok(s) => s,
            Err(e) => return Verdict::Rejected(format!("pair ({}, {}): {e}", rec.i, rec.j)),
        };
        ensure!(
            scan.candidates == rec.candidates,
            "pair ({}, {}): {} candidates recomputed, {} stored",
            rec.i,
            rec.j,
            scan.candidates,
            rec.candidates
        );
        let mut stored = Vec::with_capacity(rec.violators.len());
        for s in &rec.violators {
            match QuadElem::parse_in(s, d) {
                Ok(c) if c.to_string() == *s => {
                    let f = BigInt::from(2 / c.den() as u32);
                    stored.push((c.a() * &f, c.b() * &f));
                }
                _ => return Verdict::Rejected(format!("pair ({}, {}): bad violator {s:?}", rec.i, rec.j)),
            }
        }
        stored.sort();
        let before = stored.len();
        stored.dedup();
        ensure!(stored.len() == before, "pair ({}, {}): duplicate violators", rec.i, rec.j);
        ensure!(stored == scan.violators, "pair ({}, {}): violator sets differ", rec.i, rec.j);
        any_violator |= !scan.violators.is_empty();
    }

    // Conclusion.
    let soundness = if any_violator {
        Soundness::Refuted
    } else if verdict == VerdictName::Proved {
        Soundness::Proved
    } else {
        Soundness::Conditional
    };
    let c = &cert.conclusion;
    ensure!(c.soundness == soundness, "soundness {:?} stored, {:?} recomputed", c.soundness, soundness);
    let rank = if any_violator { 0 } else { cert.m };
    ensure!(c.excluded_rank_le == rank, "excluded rank {} stored, {rank} recomputed", c.excluded_rank_le);
    ensure!(c.statement == statement(d, cert.m, soundness), "conclusion statement does not match");
    if any_violator {
        return Verdict::Rejected("violators present: some witness pair admits c ≠ 0".into());
    }
    Verdict::Accepted { soundness }
}

/// Partial quotients `a_1, a_2, …` of `√D` up to and including the first
/// `2k`, or `None` if that takes more than `limit` terms.
fn period_of(d: &BigInt, k: &BigInt, limit: usize) -> Option<Vec<BigInt>> {
    let two_k = k * 2;
    let (mut m, mut q) = (BigInt::zero(), BigInt::one());
    let mut a = k.clone();
    let mut out = Vec::new();
    while out.len() < limit {
        m = &q * &a - &m;
        q = (d - &m * &m) / &q;
        a = (k + &m) / &q;
        out.push(a.clone());
        if a == two_k {
            return Some(out);
        }
    }
    None
}

/// `(p_i, q_i)` for `i = −1, 0, …, n`.
struct Convergents {
    pq: Vec<(BigInt, BigInt)>,
}

impl Convergents {
    fn new(k: &BigInt, period: &[BigInt], n: usize) -> Self {
        let mut pq = vec![(BigInt::one(), BigInt::zero()), (k.clone(), BigInt::one())];
        for i in 1..=n {
            let a = &period[(i - 1) % period.len()];
            let (p1, q1) = &pq[i];
            let (p0, q0) = &pq[i - 1];
            let next = (a * p1 + p0, a * q1 + q0);
            pq.push(next);
        }
        Convergents { pq }
    }

    fn at(&self, i: isize) -> &(BigInt, BigInt) {
        &self.pq[(i + 1) as usize]
    }

    fn len(&self) -> isize {
        self.pq.len() as isize - 1
    }
}

struct PairScan {
    candidates: u64,
    /// `(X, Y)` of `2c = X + Y√D`, sorted.
    violators: Vec<(BigInt, BigInt)>,
}

// (p + q√D)(r + s√D)
fn mul(d: &BigInt, x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&x.0 * &y.0 + d * &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn norm(d: &BigInt, x: &(BigInt, BigInt)) -> BigInt {
    &x.0 * &x.0 - d * &x.1 * &x.1
}

/// `x + y√D ≥ 0` and `x − y√D ≥ 0`.
fn totally_nonneg(d: &BigInt, x: &BigInt, y: &BigInt) -> bool {
    !x.is_negative() && x * x >= d * y * y
}

/// Bound on `|m|` for the coefficient of one basis element, where `e` is the
/// other one: `m² ≤ (Tr(β·e'²) + 2|N(e)|√N(β)) / D`.
fn coeff_bound(d: &BigInt, beta: &(BigInt, BigInt), n_beta: &BigInt, e: &(BigInt, BigInt)) -> BigInt {
    let e_conj = (e.0.clone(), -&e.1);
    let t = mul(d, beta, &mul(d, &e_conj, &e_conj));
    let num = &t.0 * 2 + norm(d, e).abs() * 2 * (n_beta.sqrt() + 1);
    let q: BigInt = num / d;
    q.sqrt() + 1
}

fn scan_pair(
    d: &BigInt,
    a: &(BigInt, BigInt),
    b: &(BigInt, BigInt),
    conv: &Convergents,
    budget: u64,
) -> Result<PairScan, String> {
    let ab = mul(d, a, b);
    let beta = (&ab.0 * 4, &ab.1 * 4);
    if !(totally_nonneg(d, &beta.0, &beta.1) && !beta.0.is_zero()) {
        return Err("4·α_i·α_j is not totally positive".into());
    }
    let n_beta = norm(d, &beta);
    let gamma = (&beta.0 * 4, &beta.1 * 4);

    // Cheapest consecutive pair of convergent elements as a basis.
    let mut best: Option<(BigInt, isize, BigInt, BigInt)> = None;
    for t in -1..conv.len() - 1 {
        let e1 = conv.at(t);
        let e2 = conv.at(t + 1);
        let b1 = coeff_bound(d, &beta, &n_beta, e2);
        let b2 = coeff_bound(d, &beta, &n_beta, e1);
        let cost = (&b1 * 2 + 1) * (&b2 * 2 + 1);
        if best.as_ref().map_or(true, |(c, ..)| &cost < c) {
            best = Some((cost, t, b1, b2));
        }
    }
    let (cost, t, b1, b2) = best.expect("at least one basis");
    if cost > BigInt::from(budget) {
        return Err(format!("scan of {cost} points exceeds budget {budget}"));
    }
    let (e1, e2) = (conv.at(t), conv.at(t + 1));
    let d_is_1_mod_4 = d.mod_floor(&BigInt::from(4)).is_one();

    let mut candidates = 0u64;
    let mut violators = Vec::new();
    let mut m2 = -&b2;
    while m2 <= b2 {
        let mut m1 = -&b1;
        while m1 <= b1 {
            let x = &m1 * &e1.0 + &m2 * &e2.0;
            let y = &m1 * &e1.1 + &m2 * &e2.1;
            let sq = mul(d, &(x.clone(), y.clone()), &(x.clone(), y.clone()));
            if totally_nonneg(d, &(&gamma.0 - &sq.0), &(&gamma.1 - &sq.1)) {
                candidates += 1;
                let in_ok = if d_is_1_mod_4 { x.is_even() == y.is_even() } else { x.is_even() && y.is_even() };
                if in_ok && !(x.is_zero() && y.is_zero()) {
                    violators.push((x, y));
                }
            }
            m1 += 1;
        }
        m2 += 1;
    }
    violators.sort();
    Ok(PairScan { candidates, violators })
}
