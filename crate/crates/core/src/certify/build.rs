use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use super::pair::{pair_refute, select_witnesses, witnesses_at, PairCheck, WitnessSet};
use super::record::{
    statement, Certificate, Conclusion, PairRecord, Soundness, SquarefreeRecord, WitnessRecord, CERTIFICATE_VERSION,
};
use crate::arith::primes::FactorBudget;
use crate::arith::{squarefree_status, SquarefreeMode, SquarefreeStatus};
use crate::contfrac::{expand_sqrt, expand_sqrt_bounded, SurdExpansion};
use crate::error::{Error, Result};
use crate::friesen::{construct_sequence, search_first, Base, Construction, FieldHit};

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub m: usize,
    pub base: Base,
    pub mode: SquarefreeMode,
    pub factor_budget: FactorBudget,
    /// Smallest `k` tried.
    pub k_start: BigInt,
    /// Progression values of `k` scanned before giving up.
    pub max_k_candidates: u64,
    /// Lattice points tested per pair before giving up.
    pub enum_budget: u64,
}

impl BuildOptions {
    /// Exact squarefreeness for `M = 1`, probable with trial division to
    /// `10^7` otherwise.
    pub fn new(m: usize) -> Self {
        let mode = if m <= 1 { SquarefreeMode::Exact } else { SquarefreeMode::Probable(10_000_000) };
        BuildOptions {
            m,
            base: Base::Minimal,
            mode,
            factor_budget: FactorBudget::default(),
            k_start: BigInt::one(),
            max_k_candidates: 100_000,
            enum_budget: 50_000_000,
        }
    }
}

/// A certificate with the intermediate results that produced it.
#[derive(Clone, Debug)]
pub struct Built {
    pub certificate: Certificate,
    pub construction: Option<Construction>,
    pub hit: Option<FieldHit>,
    pub witnesses: WitnessSet,
    /// `(i, j, check)` over witness indices, in lexicographic order.
    pub checks: Vec<(usize, usize, PairCheck)>,
}

/// Builds a certificate for a field from the sequence construction.
pub fn build_certificate(opts: &BuildOptions) -> Result<Built> {
    let construction = construct_sequence(opts.m, opts.base)?;
    let mode = opts.mode;
    let hit = search_first(
        &construction.seq,
        &opts.k_start,
        mode,
        opts.factor_budget,
        opts.max_k_candidates,
        |h| match (&h.squarefree, mode) {
            (Some(SquarefreeStatus::Proved), _) => true,
            (Some(SquarefreeStatus::ProbablySquarefree { .. }), SquarefreeMode::Probable(_)) => true,
            _ => false,
        },
    )?;
    let status = hit.squarefree.clone().expect("accepted hits have a verdict");
    let e = expand_sqrt_bounded(&hit.d, construction.seq.s() + 1)?;
    if e.symmetric_part() != construction.seq.values() {
        return Err(Error::Internal(format!("D = {} does not reproduce the sequence", hit.d)));
    }
    let witnesses = select_witnesses(&e, opts.m)?;
    let mut built = assemble(&e, witnesses, mode, &status, opts.enum_budget)?;
    built.construction = Some(construction);
    built.hit = Some(hit);
    Ok(built)
}

/// Builds a certificate for a given `D`, using witness `indices` or the
/// default schema `1, 3, …, 2M+1`.
pub fn certify_field(
    d: &BigInt,
    m: usize,
    indices: Option<&[usize]>,
    mode: SquarefreeMode,
    factor_budget: FactorBudget,
    enum_budget: u64,
) -> Result<Built> {
    let status = squarefree_status(d.magnitude(), mode, factor_budget)?;
    if let SquarefreeStatus::NotSquarefree { witness } = status {
        return Err(Error::NotSquarefree(witness));
    }
    let e = expand_sqrt(d)?;
    let witnesses = match indices {
        Some(ix) => {
            if ix.len() != m + 1 {
                return Err(Error::BadIndices(format!("{} indices given, M + 1 = {} needed", ix.len(), m + 1)));
            }
            witnesses_at(&e, ix)?
        }
        None => select_witnesses(&e, m)?,
    };
    assemble(&e, witnesses, mode, &status, enum_budget)
}

fn assemble(
    e: &SurdExpansion,
    witnesses: WitnessSet,
    mode: SquarefreeMode,
    status: &SquarefreeStatus,
    enum_budget: u64,
) -> Result<Built> {
    let w = witnesses.indices.len();
    let pairs: Vec<(usize, usize)> = (0..w).flat_map(|x| (x + 1..w).map(move |y| (x, y))).collect();
    let checks = pairs
        .par_iter()
        .map(|&(x, y)| {
            let pc = pair_refute(&witnesses.witnesses[x], &witnesses.witnesses[y], enum_budget)?;
            Ok((witnesses.indices[x], witnesses.indices[y], pc))
        })
        .collect::<Result<Vec<_>>>()?;

    let refuted = checks.iter().any(|(_, _, pc)| !pc.violators.is_empty());
    let soundness = if refuted {
        Soundness::Refuted
    } else if status.is_proved() {
        Soundness::Proved
    } else {
        Soundness::Conditional
    };
    let m = (w - 1) as u32;
    let certificate = Certificate {
        version: CERTIFICATE_VERSION,
        sequence: e.symmetric_part().to_vec(),
        k: e.k().clone(),
        d: e.d().clone(),
        squarefree: SquarefreeRecord::new(mode, status),
        m,
        witnesses: witnesses
            .indices
            .iter()
            .zip(&witnesses.convergents)
            .map(|(&i, (p, q))| WitnessRecord { i, p: p.clone(), q: q.clone() })
            .collect(),
        pairs: checks
            .iter()
            .map(|(i, j, pc)| PairRecord {
                i: *i,
                j: *j,
                candidates: pc.candidates,
                violators: pc.violators.iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
        conclusion: Conclusion {
            excluded_rank_le: if refuted { 0 } else { m },
            soundness,
            statement: statement(e.d(), m, soundness),
        },
    };
    Ok(Built { certificate, construction: None, hit: None, witnesses, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::QuadElem;

    #[test]
    fn forced_d13_is_refuted() {
        let b = certify_field(&BigInt::from(13), 1, Some(&[1, 3]), SquarefreeMode::Exact, FactorBudget::default(), 1_000_000)
            .unwrap();
        let c = &b.certificate;
        assert_eq!(c.conclusion.soundness, Soundness::Refuted);
        let v = QuadElem::from_i64(13, 3, 1, 2).unwrap().to_string();
        assert!(c.pairs[0].violators.contains(&v));
        assert_eq!(c.sequence, vec![BigInt::from(1); 4]);
    }

    #[test]
    fn forced_non_squarefree_fails() {
        let r = certify_field(&BigInt::from(12), 1, Some(&[1, 3]), SquarefreeMode::Exact, FactorBudget::default(), 1000);
        assert!(matches!(r, Err(Error::NotSquarefree(_))));
    }

    #[test]
    fn m1_certificate_is_proved() {
        let b = build_certificate(&BuildOptions::new(1)).unwrap();
        let c = &b.certificate;
        assert_eq!(c.conclusion.soundness, Soundness::Proved);
        assert_eq!(c.conclusion.excluded_rank_le, 1);
        assert_eq!(c.witnesses.iter().map(|w| w.i).collect::<Vec<_>>(), vec![1, 3]);
        assert!(c.pairs[0].violators.is_empty());
        assert!(c.pairs[0].candidates >= 1);
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), *c);
    }
}
