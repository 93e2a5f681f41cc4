use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::arith::{FieldElem, QuadElem};
use crate::contfrac::SurdExpansion;
use crate::error::{Error, Result};
use crate::lattice::{enumerate, Lattice, Region};

/// Totally positive convergent elements `α_{i_1}, …, α_{i_w}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSet {
    pub d: BigInt,
    pub indices: Vec<usize>,
    pub witnesses: Vec<QuadElem>,
    /// `(p_i, q_i)` for each index.
    pub convergents: Vec<(BigInt, BigInt)>,
}

/// The default witnesses `α_1, α_3, …, α_{2M+1}`; needs `r ≥ 2M+1`.
pub fn select_witnesses(e: &SurdExpansion, m: usize) -> Result<WitnessSet> {
    let needed = 2 * m + 1;
    if e.r() < needed {
        return Err(Error::PeriodTooShort { r: e.r(), needed });
    }
    witnesses_at(e, &(0..=m).map(|t| 2 * t + 1).collect::<Vec<_>>())
}

/// Witnesses at explicit odd, strictly increasing indices.
pub fn witnesses_at(e: &SurdExpansion, indices: &[usize]) -> Result<WitnessSet> {
    if indices.len() < 2 {
        return Err(Error::BadIndices("at least two witnesses are needed".into()));
    }
    if indices.iter().any(|i| i.is_even()) {
        return Err(Error::BadIndices(format!("{indices:?}: indices must be odd")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndices(format!("{indices:?}: indices must be strictly increasing")));
    }
    let last = *indices.last().unwrap();
    let cs = e.convergents(last + 1);
    let convergents: Vec<(BigInt, BigInt)> = indices.iter().map(|&i| (cs[i].p.clone(), cs[i].q.clone())).collect();
    let witnesses: Vec<QuadElem> = indices.iter().map(|&i| e.alpha_of(&cs[i])).collect();
    debug_assert!(witnesses.iter().all(|w| w.is_totally_positive()));
    Ok(WitnessSet { d: e.d().clone(), indices: indices.to_vec(), witnesses, convergents })
}

/// Exhaustive search for `c ≠ 0` with `4ab ⪰ c²`.
#[derive(Clone, Debug)]
pub struct PairCheck {
    pub beta: QuadElem,
    /// Points `w ∈ ℤ[√D]` with `16ab − w² ⪰ 0`, i.e. candidates `c = w/2`.
    pub candidates: u64,
    /// Lattice points tested by the enumerator.
    pub tested: u64,
    pub violators: Vec<QuadElem>,
    pub basis: [QuadElem; 2],
    pub m2_range: (BigInt, BigInt),
}

/// Finds every `c ∈ 𝒪_K`, `c ≠ 0`, with `4ab − c² ⪰ 0`.
///
/// The search runs over `w = 2c ∈ ℤ[√D]`, which covers the half-integral
/// elements of `𝒪_K` when `D ≡ 1 (mod 4)`; points whose half is not in `𝒪_K`
/// count as candidates but never as violators. `a = b` is allowed here.
pub fn pair_refute(a: &QuadElem, b: &QuadElem, budget: u64) -> Result<PairCheck> {
    if a.d() != b.d() {
        return Err(Error::FieldMismatch(a.d().clone(), b.d().clone()));
    }
    for x in [a, b] {
        if !x.is_totally_positive() {
            return Err(Error::NotTotallyPositive(x.to_string()));
        }
    }
    let d = a.d();
    let beta = (a * b).scale(&BigInt::from(4));
    let region = Region {
        gamma: FieldElem::from_quad(&beta.scale(&BigInt::from(4))),
        center: FieldElem::zero(d),
        lattice: Lattice::Zsqrt,
    };
    let en = enumerate(&region, budget)?;
    let d_mod4_is_one = d.mod_floor(&BigInt::from(4)).is_one();
    let violators = en
        .points
        .iter()
        .filter(|w| !w.is_zero())
        .filter(|w| {
            let (x, y) = (w.a(), w.b());
            if d_mod4_is_one {
                x.is_even() == y.is_even()
            } else {
                x.is_even() && y.is_even()
            }
        })
        .map(|w| {
            let c = QuadElem::new(d.clone(), w.a().clone(), w.b().clone(), 2).expect("parity checked");
            debug_assert!(beta.succeq(&(&c * &c)).unwrap());
            c
        })
        .collect();
    debug_assert!(en.points.iter().any(|w| w.is_zero()) || beta.is_zero());
    Ok(PairCheck {
        beta,
        candidates: en.points.len() as u64,
        tested: en.tested,
        violators,
        basis: en.basis,
        m2_range: en.m2_range,
    })
}
