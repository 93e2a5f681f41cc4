//! The serialized certificate.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith::{SquarefreeMode, SquarefreeStatus};
use crate::error::{Error, Result};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: u32,
    /// `(u_1, …, u_{s−1})`.
    #[serde(serialize_with = "crate::json::ser_bigint_vec", deserialize_with = "crate::json::de_bigint_vec")]
    pub sequence: Vec<BigInt>,
    #[serde(serialize_with = "crate::json::ser_bigint", deserialize_with = "crate::json::de_bigint")]
    pub k: BigInt,
    #[serde(rename = "D", serialize_with = "crate::json::ser_bigint", deserialize_with = "crate::json::de_bigint")]
    pub d: BigInt,
    pub squarefree: SquarefreeRecord,
    #[serde(rename = "M")]
    pub m: u32,
    pub witnesses: Vec<WitnessRecord>,
    pub pairs: Vec<PairRecord>,
    pub conclusion: Conclusion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Probable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictName {
    Proved,
    NotSquarefree,
    ProbablySquarefree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquarefreeRecord {
    pub mode: ModeName,
    /// Trial-division bound of probable mode; `null` in exact mode.
    pub bound: Option<u64>,
    pub verdict: VerdictName,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_biguint",
        deserialize_with = "de_opt_biguint"
    )]
    pub witness: Option<BigUint>,
}

fn ser_opt_biguint<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn de_opt_biguint<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<BigUint>, D::Error> {
    crate::json::de_biguint(d).map(Some)
}

impl SquarefreeRecord {
    pub fn new(mode: SquarefreeMode, status: &SquarefreeStatus) -> Self {
        let (mode, bound) = match mode {
            SquarefreeMode::Exact => (ModeName::Exact, None),
            SquarefreeMode::Probable(b) => (ModeName::Probable, Some(b)),
        };
        let (verdict, witness) = match status {
            SquarefreeStatus::Proved => (VerdictName::Proved, None),
            SquarefreeStatus::NotSquarefree { witness } => (VerdictName::NotSquarefree, Some(witness.clone())),
            SquarefreeStatus::ProbablySquarefree { .. } => (VerdictName::ProbablySquarefree, None),
        };
        SquarefreeRecord { mode, bound, verdict, witness }
    }

    pub fn mode(&self) -> Result<SquarefreeMode> {
        match (self.mode, self.bound) {
            (ModeName::Exact, None) => Ok(SquarefreeMode::Exact),
            (ModeName::Probable, Some(b)) if b >= 2 => Ok(SquarefreeMode::Probable(b)),
            _ => Err(Error::Parse("inconsistent squarefree mode and bound".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessRecord {
    pub i: usize,
    #[serde(serialize_with = "crate::json::ser_bigint", deserialize_with = "crate::json::de_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::json::ser_bigint", deserialize_with = "crate::json::de_bigint")]
    pub q: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    /// Number of `w ∈ ℤ[√D]` with `16·α_i·α_j − w² ⪰ 0`.
    pub candidates: u64,
    /// Every `c = w/2 ∈ 𝒪_K`, `c ≠ 0`, among them, in canonical text form.
    pub violators: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Soundness {
    /// Squarefreeness proved and no violators.
    Proved,
    /// No violators, squarefreeness only probable.
    Conditional,
    /// Some pair has violators; nothing is excluded.
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conclusion {
    pub excluded_rank_le: u32,
    pub soundness: Soundness,
    pub statement: String,
}

/// The conclusion text for a field and rank.
pub fn statement(d: &BigInt, m: u32, soundness: Soundness) -> String {
    match soundness {
        Soundness::Proved => {
            format!("ℚ(√{d}) admits no universal totally positive form or 𝒪_K-lattice of rank ≤ {m}")
        }
        Soundness::Conditional => format!(
            "if {d} is squarefree, ℚ(√{d}) admits no universal totally positive form or 𝒪_K-lattice of rank ≤ {m}"
        ),
        Soundness::Refuted => format!("no conclusion: some witness pair admits c ≠ 0 with 4·α_i·α_j ⪰ c² in ℚ(√{d})"),
    }
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
