use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::intutil::is_square;
use super::primes::{primes_up_to, prove_prime, rem_u32, rho_split, small_primes, FactorBudget, TRIAL_LIMIT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SquarefreeMode {
    Exact,
    /// Trial division by the primes up to the given bound.
    Probable(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SquarefreeStatus {
    Proved,
    /// `witness²` divides the input. The witness is prime except when the
    /// square root of a square cofactor could not be split within budget.
    NotSquarefree { witness: BigUint },
    ProbablySquarefree { trial_bound: u64 },
}

impl SquarefreeStatus {
    pub fn is_proved(&self) -> bool {
        matches!(self, SquarefreeStatus::Proved)
    }

    pub fn is_not_squarefree(&self) -> bool {
        matches!(self, SquarefreeStatus::NotSquarefree { .. })
    }
}

impl fmt::Display for SquarefreeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquarefreeStatus::Proved => write!(f, "squarefree (proved)"),
            SquarefreeStatus::NotSquarefree { witness } => write!(f, "not squarefree ({witness}^2 divides)"),
            SquarefreeStatus::ProbablySquarefree { trial_bound } => {
                write!(f, "probably squarefree (trial division to {trial_bound})")
            }
        }
    }
}

enum Trial {
    Square(u32),
    Cofactor(BigUint),
}

fn trial_divide(n: &BigUint, primes: &[u32]) -> Trial {
    let mut n = n.clone();
    for &p in primes {
        if n.is_one() {
            break;
        }
        if n.bits() <= 64 && (p as u128) * (p as u128) > n.to_u64().unwrap() as u128 {
            break;
        }
        if rem_u32(&n, p) == 0 {
            n /= p;
            if rem_u32(&n, p) == 0 {
                return Trial::Square(p);
            }
        }
    }
    Trial::Cofactor(n)
}

/// Best-effort prime divisor of `m`, falling back to `m` itself.
fn some_prime_divisor(m: &BigUint, steps: &mut u64) -> BigUint {
    let mut m = m.clone();
    loop {
        match prove_prime(&m, steps) {
            Some(false) => match rho_split(&m, steps) {
                Some(g) => {
                    let h = &m / &g;
                    m = g.min(h);
                }
                None => return m,
            },
            _ => return m,
        }
    }
}

/// Decides whether `n` is squarefree.
///
/// Exact mode removes primes up to 10⁷ and then works on the cofactor, all of
/// whose prime factors exceed B = 10⁷: a piece below B² is prime, a non-square
/// piece below B³ is a prime or a product of two distinct primes, and larger
/// pieces are proved prime or split with rho. Splits whose halves share a
/// factor expose a square. If the budget runs out, the result is
/// [`Error::Undetermined`].
pub fn squarefree_status(n: &BigUint, mode: SquarefreeMode, budget: FactorBudget) -> Result<SquarefreeStatus> {
    if n.is_one() || n.bits() == 0 {
        return Ok(SquarefreeStatus::Proved);
    }
    let (bound, owned);
    let primes: &[u32] = match mode {
        SquarefreeMode::Exact => {
            bound = TRIAL_LIMIT as u64;
            small_primes()
        }
        SquarefreeMode::Probable(b) if b <= TRIAL_LIMIT as u64 => {
            bound = b;
            let end = small_primes().partition_point(|&p| p as u64 <= b);
            &small_primes()[..end]
        }
        SquarefreeMode::Probable(b) => {
            bound = b;
            let b32 = u32::try_from(b).map_err(|_| Error::Parse(format!("trial bound {b} too large")))?;
            owned = primes_up_to(b32);
            &owned
        }
    };
    let mut steps = budget.rho_steps;
    let cofactor = match trial_divide(n, primes) {
        Trial::Square(p) => return Ok(SquarefreeStatus::NotSquarefree { witness: BigUint::from(p) }),
        Trial::Cofactor(c) => c,
    };
    if cofactor.is_one() {
        return Ok(SquarefreeStatus::Proved);
    }
    let b = BigUint::from(bound);
    let b2 = &b * &b;
    if cofactor <= b2 {
        // Every remaining prime factor exceeds the trial bound.
        return Ok(SquarefreeStatus::Proved);
    }
    if is_square(&cofactor) {
        let root = cofactor.sqrt();
        return Ok(SquarefreeStatus::NotSquarefree { witness: some_prime_divisor(&root, &mut steps) });
    }
    if let SquarefreeMode::Probable(_) = mode {
        return Ok(SquarefreeStatus::ProbablySquarefree { trial_bound: bound });
    }
    let b3 = &b2 * &b;
    let mut pending = vec![cofactor];
    while let Some(m) = pending.pop() {
        if m <= b2 {
            continue;
        }
        if is_square(&m) {
            let root = m.sqrt();
            return Ok(SquarefreeStatus::NotSquarefree { witness: some_prime_divisor(&root, &mut steps) });
        }
        if m < b3 {
            continue;
        }
        match prove_prime(&m, &mut steps) {
            Some(true) => continue,
            Some(false) => {}
            None => return Err(Error::Undetermined { cofactor: m }),
        }
        let g = rho_split(&m, &mut steps).ok_or_else(|| Error::Undetermined { cofactor: m.clone() })?;
        let h = &m / &g;
        let common = g.gcd(&h);
        if !common.is_one() {
            return Ok(SquarefreeStatus::NotSquarefree { witness: some_prime_divisor(&common, &mut steps) });
        }
        pending.push(g);
        pending.push(h);
    }
    Ok(SquarefreeStatus::Proved)
}
