//! Exact arithmetic toolkit for real quadratic fields ℚ(√D).
//!
//! The crate covers four layers:
//!
//! * [`arith`]: elements of the ring of integers, integer utilities, squarefree
//!   testing and the rational-coordinate field arithmetic used by forms.
//! * [`contfrac`]: the periodic continued fraction of √D, its convergents
//!   p_i/q_i and the elements α_i = p_i + q_i√D, with exact checks of the
//!   approximation and norm bounds.
//! * [`friesen`], [`smallnorm`]: field search from prescribed symmetric periods
//!   and the small-norm audits.
//! * [`certify`]: generation and independent verification of certificates that
//!   a field admits no universal totally positive form of small rank, plus an
//!   exhaustive representability decider.
//!
//! Nothing in a decision path uses floating point.

pub mod arith;
pub mod certify;
pub mod contfrac;
mod error;
pub mod friesen;
pub mod json;
pub mod lattice;
pub mod smallnorm;

pub use arith::{FieldElem, QuadElem, SquarefreeMode, SquarefreeStatus};
pub use contfrac::{expand_sqrt, Convergent, SurdExpansion};
pub use error::{Error, Result};
