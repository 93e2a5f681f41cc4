//! Certificates that ℚ(√D) admits no universal totally positive form of
//! small rank, their independent verification, and exhaustive
//! representability decisions for explicit forms.

mod build;
mod form;
mod pair;
mod record;
mod verify;

pub use build::{build_certificate, certify_field, BuildOptions, Built};
pub use form::{decide_represent, totally_positive_up_to, QuadraticForm, Representation, SearchLog};
pub use pair::{pair_refute, select_witnesses, witnesses_at, PairCheck, WitnessSet};
pub use record::{
    statement, Certificate, Conclusion, ModeName, PairRecord, Soundness, SquarefreeRecord, VerdictName, WitnessRecord,
    CERTIFICATE_VERSION,
};
pub use verify::{verify_certificate, verify_with, Verdict, VerifyOptions};
