//! Exact arithmetic in ℚ(√D) and its ring of integers.

mod elem;
mod field;
pub mod interval;
mod intutil;
pub mod primes;
mod squarefree;

pub use elem::QuadElem;
pub use field::FieldElem;
pub use intutil::{is_square, isqrt, isqrt_int, surd_sign};
pub use primes::FactorBudget;
pub use squarefree::{squarefree_status, SquarefreeMode, SquarefreeStatus};
