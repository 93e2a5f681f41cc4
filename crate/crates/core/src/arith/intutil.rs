use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Signed;

/// ⌊√n⌋ for an arbitrary-size non-negative integer.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

/// ⌊√n⌋ for a signed integer; panics on negative input.
pub fn isqrt_int(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative number");
    BigInt::from(n.magnitude().sqrt())
}

pub fn is_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Sign of `a + b·√d` for a non-square `d > 0`, decided by comparing `a²`
/// with `b²·d` when the two parts disagree in sign.
pub fn surd_sign(a: &BigInt, b: &BigInt, d: &BigInt) -> Sign {
    let sa = a.sign();
    let sb = b.sign();
    match (sa, sb) {
        (Sign::NoSign, Sign::NoSign) => Sign::NoSign,
        (Sign::NoSign, s) | (s, Sign::NoSign) => s,
        (x, y) if x == y => x,
        _ => {
            let a2 = a * a;
            let b2d = b * b * d;
            if a2 > b2d {
                sa
            } else {
                // a² = b²d is impossible for non-square d and b ≠ 0.
                sb
            }
        }
    }
}
