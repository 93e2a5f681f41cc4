//! Small-prime sieve, primality proving and Pollard–Brent splitting.

use std::sync::LazyLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Trial-division limit used by exact squarefree testing.
pub const TRIAL_LIMIT: u32 = 10_000_000;

static PRIMES: LazyLock<Vec<u32>> = LazyLock::new(|| primes_up_to(TRIAL_LIMIT));

/// Every prime `<= n`.
pub fn primes_up_to(n: u32) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::with_capacity(n / 10 + 8);
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The cached primes up to [`TRIAL_LIMIT`].
pub fn small_primes() -> &'static [u32] {
    &PRIMES
}

pub(crate) fn rem_u32(n: &BigUint, p: u32) -> u32 {
    let p = p as u128;
    let mut r: u128 = 0;
    for limb in n.iter_u64_digits().rev() {
        r = ((r << 64) | limb as u128) % p;
    }
    r as u32
}

// Bases 2..41 are deterministic below this bound (Sorenson–Webster).
const MR_DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

static MR_LIMIT: LazyLock<BigUint> = LazyLock::new(|| MR_DETERMINISTIC_LIMIT.parse().unwrap());

fn mr_round(n: &BigUint, d: &BigUint, s: u32, a: &BigUint) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Miller–Rabin with the fixed prime bases 2..41 followed by `extra` further
/// prime bases. Deterministic below about 3.3·10²⁴.
pub fn miller_rabin(n: &BigUint, extra: usize) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in MR_BASES.iter() {
        if n == &BigUint::from(p) {
            return true;
        }
        if rem_u32(n, p) == 0 {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0) as u32;
    let d = &n1 >> s;
    let bases = MR_BASES.iter().copied().chain(small_primes()[13..].iter().copied().take(extra));
    for b in bases {
        let a = BigUint::from(b);
        if &a >= n {
            break;
        }
        if !mr_round(n, &d, s, &a) {
            return false;
        }
    }
    true
}

/// Work budget for factoring, in modular multiplications spent by rho.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_steps: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { rho_steps: 20_000_000 }
    }
}

/// Primality with proof: `Some(true)` proved prime, `Some(false)` proved
/// composite, `None` when the budget ran out before a Pocklington
/// certificate was found.
pub fn prove_prime(n: &BigUint, steps: &mut u64) -> Option<bool> {
    if !miller_rabin(n, 8) {
        return Some(false);
    }
    if n < &*MR_LIMIT {
        return Some(true);
    }
    pocklington(n, steps)
}

fn pocklington(n: &BigUint, steps: &mut u64) -> Option<bool> {
    let n1 = n - 1u32;
    let mut rest = n1.clone();
    let mut f = BigUint::one();
    let mut primes_of_f: Vec<BigUint> = Vec::new();
    for &p in small_primes().iter().take(100_000) {
        if rem_u32(&rest, p) == 0 {
            primes_of_f.push(BigUint::from(p));
            while rem_u32(&rest, p) == 0 {
                rest /= p;
                f *= p;
            }
        }
    }
    let mut pending = vec![rest];
    while &f * &f <= *n {
        let m = pending.pop()?;
        if m.is_one() {
            continue;
        }
        match prove_prime(&m, steps) {
            Some(true) => {
                let mut m = m;
                let mut rest: Vec<BigUint> = Vec::new();
                for piece in pending.drain(..) {
                    let mut piece = piece;
                    while (&piece % &m).is_zero() {
                        piece /= &m;
                        f *= &m;
                    }
                    rest.push(piece);
                }
                pending = rest;
                f *= &m;
                primes_of_f.push(std::mem::take(&mut m));
            }
            Some(false) => {
                let g = rho_split(&m, steps)?;
                let h = &m / &g;
                pending.push(g);
                pending.push(h);
            }
            None => return None,
        }
    }
    for q in &primes_of_f {
        let e = &n1 / q;
        let mut ok = false;
        for a in 2u32..200 {
            let a = BigUint::from(a);
            if !a.modpow(&n1, n).is_one() {
                return Some(false);
            }
            let t = a.modpow(&e, n);
            if t.is_zero() {
                continue;
            }
            if (t - 1u32).gcd(n).is_one() {
                ok = true;
                break;
            }
        }
        if !ok {
            return None;
        }
    }
    Some(true)
}

fn abs_diff(x: &BigUint, y: &BigUint) -> BigUint {
    if x >= y {
        x - y
    } else {
        y - x
    }
}

fn brent(n: &BigUint, c: u32, steps: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let f = |x: &BigUint| (x * x + c) % n;
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r: u64 = 1;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let m = BATCH.min(r - k);
            if *steps < m {
                return None;
            }
            *steps -= m;
            for _ in 0..m {
                y = f(&y);
                q = q * abs_diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            if *steps == 0 {
                return None;
            }
            *steps -= 1;
            ys = f(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// A nontrivial divisor of the composite `n`, or `None` on budget exhaustion.
pub fn rho_split(n: &BigUint, steps: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u32.. {
        if *steps == 0 {
            return None;
        }
        if let Some(g) = brent(n, c, steps) {
            return Some(g);
        }
        if c > 64 {
            return None;
        }
    }
    None
}

/// Complete factorization into proved primes, sorted, with multiplicities.
pub fn factorize(n: &BigUint, budget: FactorBudget) -> Option<Vec<(BigUint, u32)>> {
    let mut steps = budget.rho_steps;
    let mut n = n.clone();
    let mut out: Vec<BigUint> = Vec::new();
    for &p in small_primes() {
        if n.is_one() {
            break;
        }
        if (p as u64) * (p as u64) > n.to_u64().unwrap_or(u64::MAX) {
            break;
        }
        while rem_u32(&n, p) == 0 {
            n /= p;
            out.push(BigUint::from(p));
        }
    }
    let mut pending = vec![n];
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        match prove_prime(&m, &mut steps)? {
            true => out.push(m),
            false => {
                let g = rho_split(&m, &mut steps)?;
                pending.push(&m / &g);
                pending.push(g);
            }
        }
    }
    out.sort();
    let mut grouped: Vec<(BigUint, u32)> = Vec::new();
    for p in out {
        match grouped.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => grouped.push((p, 1)),
        }
    }
    Some(grouped)
}
