use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use quadcert::arith::primes::FactorBudget;
use quadcert::arith::{squarefree_status, FieldElem, SquarefreeMode, SquarefreeStatus};
use quadcert::certify::{decide_represent, pair_refute, QuadraticForm, Representation};
use quadcert::contfrac::expand_sqrt;
use quadcert::lattice::{enumerate, enumerate_widened, Lattice, Region};
use quadcert::QuadElem;

const FIELDS: [i64; 12] = [2, 3, 5, 6, 7, 10, 13, 17, 21, 29, 101, 9973];

fn elem(d: i64, a: i64, b: i64, half: bool) -> QuadElem {
    let d4 = d.rem_euclid(4) == 1;
    if half && d4 {
        // a ≡ b (mod 2) for a half-integral element
        let b = if (a - b).rem_euclid(2) == 1 { b + 1 } else { b };
        QuadElem::from_i64(d, a, b, 2).unwrap()
    } else {
        QuadElem::from_i64(d, a, b, 1).unwrap()
    }
}

fn arb_elem(d: i64, r: i64) -> impl Strategy<Value = QuadElem> {
    (-r..=r, -r..=r, any::<bool>()).prop_map(move |(a, b, h)| elem(d, a, b, h))
}

fn arb_pair() -> impl Strategy<Value = (QuadElem, QuadElem)> {
    prop::sample::select(&FIELDS[..]).prop_flat_map(|d| (arb_elem(d, 1_000_000), arb_elem(d, 1_000_000)))
}

fn arb_triple() -> impl Strategy<Value = (QuadElem, QuadElem, QuadElem)> {
    prop::sample::select(&FIELDS[..]).prop_flat_map(|d| (arb_elem(d, 50), arb_elem(d, 50), arb_elem(d, 50)))
}

/// Sign of `(a + b√D)/den` from a 60-digit decimal bracket of `√D`, falling
/// back to exact comparison only for zero.
fn decimal_sign(x: &QuadElem) -> Sign {
    let scale = BigInt::from(10u32).pow(60);
    let s = (x.d() * &scale * &scale).sqrt();
    let lo = x.a() * &scale + x.b() * &s;
    let hi = x.a() * &scale + x.b() * (&s + 1);
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if lo.is_positive() {
        Sign::Plus
    } else if hi.is_negative() {
        Sign::Minus
    } else {
        assert!(x.is_zero(), "bracket too wide for {x}");
        Sign::NoSign
    }
}

fn naive_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sign_agrees_with_decimal_bracket((x, y) in arb_pair()) {
        prop_assert_eq!(x.sign(), decimal_sign(&x));
        prop_assert_eq!(y.conjugate_sign(), decimal_sign(&y.conjugate()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn norm_is_multiplicative((x, y) in arb_pair()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x * &y).trace(), (&x * &y).conjugate().trace());
    }

    #[test]
    fn text_round_trip((x, _) in arb_pair()) {
        prop_assert_eq!(QuadElem::parse(&x.to_string()).unwrap(), x.clone());
        prop_assert_eq!(QuadElem::parse_in(&x.to_string(), x.d()).unwrap(), x);
    }

    #[test]
    fn order_is_a_partial_order((x, y, z) in arb_triple()) {
        let ge = |a: &QuadElem, b: &QuadElem| a.succeq(b).unwrap();
        prop_assert!(ge(&x, &x));
        prop_assert!(!x.succ(&x).unwrap());
        if ge(&x, &y) && ge(&y, &x) {
            prop_assert_eq!(&x, &y);
        }
        if ge(&x, &y) && ge(&y, &z) {
            prop_assert!(ge(&x, &z));
        }
        if x.succ(&y).unwrap() {
            prop_assert!(ge(&x, &y));
            prop_assert!((&x - &y).is_totally_positive());
        }
        prop_assert_eq!(ge(&x, &y), ge(&(&x + &z), &(&y + &z)));
    }

    #[test]
    fn squarefree_matches_trial_division(n in 1u64..10_000_000_000) {
        let st = squarefree_status(&BigUint::from(n), SquarefreeMode::Exact, FactorBudget::default()).unwrap();
        prop_assert_eq!(st.is_proved(), naive_squarefree(n));
        if let SquarefreeStatus::NotSquarefree { witness } = st {
            prop_assert!((BigUint::from(n) % (&witness * &witness)).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn continued_fraction_identities(d in 2i64..200_000) {
        let dd = BigInt::from(d);
        prop_assume!(expand_sqrt(&dd).is_ok());
        let e = expand_sqrt(&dd).unwrap();
        let s = e.s();
        let period = e.period();
        prop_assert_eq!(&period[s - 1], &(e.k() * 2));
        let sym = e.symmetric_part();
        prop_assert!(sym.iter().eq(sym.iter().rev()));
        let cs = e.convergents(2 * s + 2);
        for w in cs.windows(2) {
            let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
            let want = if w[1].i % 2 == 1 { 1 } else { -1 };
            prop_assert_eq!(det, BigInt::from(want));
        }
        for c in &cs {
            let n = e.alpha_of(c).norm();
            prop_assert_eq!(n.is_positive(), c.i % 2 == 1);
        }
        prop_assert_eq!(e.alpha(s - 1).norm().abs(), BigInt::from(1));
    }

    #[test]
    fn lattice_enumeration_matches_scan(
        d in prop::sample::select(&FIELDS[..8]),
        ga in 1i64..400,
        gb in -60i64..60,
        integers in any::<bool>(),
        ca in -6i64..6,
        cb in -6i64..6,
    ) {
        let gamma = QuadElem::from_i64(d, ga, gb, 1).unwrap();
        prop_assume!(gamma.is_totally_positive());
        let lattice = if integers { Lattice::Integers } else { Lattice::Zsqrt };
        let center = FieldElem::from_quad(&QuadElem::from_i64(d, ca, cb, 1).unwrap())
            .scale(&num_rational::BigRational::new(1.into(), 3.into()));
        let region = Region { gamma: FieldElem::from_quad(&gamma), center: center.clone(), lattice };
        let got = enumerate(&region, 10_000_000).unwrap().points;
        let wide = enumerate_widened(&region, 10_000_000, 2).unwrap().points;
        prop_assert_eq!(&got, &wide);
        // |σ(x)| ≤ √σ(γ) + |σ(z)| < 36, so |X| ≤ 72 and |Y| ≤ 51 for x = (X + Y√D)/den.
        let sd = (d as f64).sqrt();
        let emb = |a: f64, b: f64| [a + b * sd, a - b * sd];
        let z = emb(ca as f64 / 3.0, cb as f64 / 3.0);
        let g = emb(ga as f64, gb as f64);
        let mut want = Vec::new();
        for a in -75i64..=75 {
            for b in -51i64..=51 {
                for den in [1u8, 2] {
                    if den == 2 && !integers {
                        continue;
                    }
                    let x = emb(a as f64 / den as f64, b as f64 / den as f64);
                    if (0..2).any(|h| (x[h] - z[h]).powi(2) > g[h] + 1e-6) {
                        continue;
                    }
                    let Ok(x) = QuadElem::from_i64(d, a, b, den) else { continue };
                    if den == 2 && x.den() == 1 {
                        continue;
                    }
                    let t = FieldElem::from_quad(&x).sub(&center);
                    if region.gamma.sub(&t.mul(&t)).is_totally_nonnegative() {
                        want.push(x);
                    }
                }
            }
        }
        want.sort_by_key(quadcert::lattice::doubled_key);
        want.dedup();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pair_violators_satisfy_the_condition(d in prop::sample::select(&FIELDS[..8]), i in 0usize..3, j in 1usize..4) {
        let e = expand_sqrt(&BigInt::from(d)).unwrap();
        let (i, j) = (2 * i + 1, 2 * (i + j) + 1);
        let (a, b) = (e.alpha(i), e.alpha(j));
        let pc = pair_refute(&a, &b, 10_000_000).unwrap();
        let four_ab = (&a * &b).scale(&BigInt::from(4));
        for c in &pc.violators {
            prop_assert!(!c.is_zero());
            prop_assert!(four_ab.succeq(&(c * c)).unwrap());
        }
        prop_assert!(pc.candidates >= 1 + pc.violators.len() as u64);
    }

    #[test]
    fn binary_forms_agree_with_brute_force(
        d in prop::sample::select(&[2i64, 3, 5][..]),
        a in 1i64..5,
        b in -2i64..3,
        c in 1i64..5,
        t in 1i64..14,
        tb in -3i64..4,
    ) {
        let dd = BigInt::from(d);
        let form = QuadraticForm::new(&dd, vec![
            vec![QuadElem::from_i64(d, a, 0, 1).unwrap(), QuadElem::from_i64(d, b, 0, 1).unwrap()],
            vec![QuadElem::from_i64(d, c, 0, 1).unwrap()],
        ]).unwrap();
        prop_assume!(form.is_totally_positive_definite());
        let target = QuadElem::from_i64(d, t, tb, 1).unwrap();
        prop_assume!(target.is_totally_positive());
        let (rep, _) = decide_represent(&form, &target, 1_000_000).unwrap();
        // Any solution has |σ_h(x)|² ≤ σ_h(t)·(G⁻¹)_ii ≤ 20·16/3 < 110 in both embeddings.
        let sd = (d as f64).sqrt();
        let mut elems = Vec::new();
        for x in -22i64..=22 {
            for y in -10i64..=10 {
                for den in [1u8, 2] {
                    let Ok(e) = QuadElem::from_i64(d, x, y, den) else { continue };
                    let s = [(x as f64 + y as f64 * sd) / den as f64, (x as f64 - y as f64 * sd) / den as f64];
                    if s.iter().all(|v| v * v < 110.0) {
                        elems.push((e, s));
                    }
                }
            }
        }
        let ts = [t as f64 + tb as f64 * sd, t as f64 - tb as f64 * sd];
        let (af, bf, cf) = (a as f64, b as f64, c as f64);
        let brute = elems.iter().any(|(x, sx)| {
            elems.iter().any(|(y, sy)| {
                (0..2).all(|h| (af * sx[h] * sx[h] + bf * sx[h] * sy[h] + cf * sy[h] * sy[h] - ts[h]).abs() < 1e-6)
                    && form.eval(&[x.clone(), y.clone()]) == target
            })
        });
        match rep {
            Representation::Found(ref v) => prop_assert_eq!(form.eval(v), target.clone()),
            Representation::Impossible => prop_assert!(!brute),
        }
        if brute {
            prop_assert!(matches!(rep, Representation::Found(_)));
        }
    }
}

#[test]
fn halves_only_for_one_mod_four() {
    for d in FIELDS {
        let ok = QuadElem::from_i64(d, 1, 1, 2).is_ok();
        assert_eq!(ok, d.mod_floor(&4) == 1, "D = {d}");
    }
}
