//! Exhaustive enumeration of lattice points in `{w : γ − (w − z)² ⪰ 0}`.
//!
//! Under the two real embeddings the region is a box with half-widths
//! `ρ_h = √σ_h(γ)`. The box is rescaled to a square, the lattice basis is
//! Lagrange-reduced in that metric, and the points are enumerated row by row
//! in reduced coordinates. Search ranges are rigorous interval enclosures;
//! every candidate is then tested for membership with exact arithmetic, so the
//! reduction itself only affects speed, never the result.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::interval::{round_down, sqrt_lower, sqrt_upper, Interval};
use crate::arith::{FieldElem, QuadElem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lattice {
    /// `ℤ[√D]`
    Zsqrt,
    /// The full ring of integers.
    Integers,
}

impl Lattice {
    fn basis(self, d: &BigInt) -> [QuadElem; 2] {
        let one = QuadElem::one(d);
        let omega = match self {
            Lattice::Integers if d.mod_floor(&BigInt::from(4)).is_one() => {
                QuadElem::new(d.clone(), BigInt::one(), BigInt::one(), 2).expect("(1+√D)/2 is integral")
            }
            _ => QuadElem::sqrt_d(d.clone()).expect("valid radicand"),
        };
        [one, omega]
    }

    fn contains(self, x: &QuadElem) -> bool {
        self == Lattice::Integers || x.den() == 1
    }
}

/// `{w ∈ lattice : γ − (w − z)² ⪰ 0}`.
#[derive(Clone, Debug)]
pub struct Region {
    pub gamma: FieldElem,
    pub center: FieldElem,
    pub lattice: Lattice,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Members of the region, sorted by the coordinates of `2w`.
    pub points: Vec<QuadElem>,
    /// Candidates tested for membership.
    pub tested: u64,
    pub basis: [QuadElem; 2],
    /// Inclusive range of the second reduced coordinate.
    pub m2_range: (BigInt, BigInt),
}

/// Sort key: coordinates `(B, A)` of `2x = A + B√D`.
pub fn doubled_key(x: &QuadElem) -> (BigInt, BigInt) {
    let f = BigInt::from(2 / x.den() as u32);
    (x.b() * &f, x.a() * &f)
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn is_member(region: &Region, w: &QuadElem) -> bool {
    let t = FieldElem::from_quad(w).sub(&region.center);
    region.gamma.sub(&t.mul(&t)).is_totally_nonnegative()
}

fn precision(region: &Region) -> u64 {
    let bits = |x: &BigRational| x.numer().bits() + x.denom().bits();
    let g = &region.gamma;
    let z = &region.center;
    128 + region.gamma.d().bits() + bits(g.a()) + bits(g.b()) + bits(z.a()) + bits(z.b())
}

fn approx(f: &FieldElem, rho: &[BigRational; 2], prec: u64) -> [BigRational; 2] {
    [false, true].map(|conj| {
        let v = f.embedding(conj, prec).mid() / &rho[conj as usize];
        round_down(&v, 96)
    })
}

fn dot(u: &[BigRational; 2], v: &[BigRational; 2]) -> BigRational {
    &u[0] * &v[0] + &u[1] * &v[1]
}

fn round_nearest(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

fn lagrange_reduce(basis: [QuadElem; 2], rho: &[BigRational; 2], prec: u64) -> [QuadElem; 2] {
    let [mut f1, mut f2] = basis;
    for _ in 0..100_000 {
        let v1 = approx(&FieldElem::from_quad(&f1), rho, prec);
        let v2 = approx(&FieldElem::from_quad(&f2), rho, prec);
        let (n1, n2) = (dot(&v1, &v1), dot(&v2, &v2));
        if n2 < n1 {
            std::mem::swap(&mut f1, &mut f2);
            continue;
        }
        let mu = round_nearest(&(dot(&v1, &v2) / &n1));
        if mu.is_zero() {
            break;
        }
        let g2 = &f2 - &f1.scale(&mu);
        // Rounded embeddings can make a tie look like progress.
        let w2 = approx(&FieldElem::from_quad(&g2), rho, prec);
        if dot(&w2, &w2) >= n2 {
            break;
        }
        f2 = g2;
    }
    [f1, f2]
}

/// Enumerates the region exhaustively, giving up with
/// [`Error::EnumerationBudget`] after `budget` candidates.
pub fn enumerate(region: &Region, budget: u64) -> Result<Enumeration> {
    enumerate_widened(region, budget, 1)
}

/// Same as [`enumerate`] with every search window stretched by `widen` about
/// its centre. The result never depends on `widen`.
pub fn enumerate_widened(region: &Region, budget: u64, widen: u32) -> Result<Enumeration> {
    let d = region.gamma.d().clone();
    let basis = region.lattice.basis(&d);
    if region.gamma.is_zero() {
        let points: Vec<QuadElem> = region
            .center
            .to_quad()
            .filter(|z| region.lattice.contains(z))
            .into_iter()
            .collect();
        return Ok(Enumeration { points, tested: 1, basis, m2_range: (BigInt::zero(), BigInt::zero()) });
    }
    if !region.gamma.is_totally_positive() {
        return Ok(Enumeration { points: Vec::new(), tested: 0, basis, m2_range: (BigInt::one(), BigInt::zero()) });
    }
    let prec = precision(region);
    let sig_gamma = [region.gamma.embedding(false, prec), region.gamma.embedding(true, prec)];
    let rho_hi = [sqrt_upper(&sig_gamma[0].hi, prec), sqrt_upper(&sig_gamma[1].hi, prec)];
    let rho_mid = [sqrt_lower(&sig_gamma[0].mid(), prec), sqrt_lower(&sig_gamma[1].mid(), prec)];

    let [f1, f2] = lagrange_reduce(basis, &rho_mid, prec);
    let (g1, g2) = (FieldElem::from_quad(&f1), FieldElem::from_quad(&f2));
    let s1 = [g1.embedding(false, prec), g1.embedding(true, prec)];
    let s2 = [g2.embedding(false, prec), g2.embedding(true, prec)];

    // z = ζ1·f1 + ζ2·f2
    let z = &region.center;
    let det = g1.a() * g2.b() - g2.a() * g1.b();
    if det.is_zero() {
        return Err(Error::Internal("reduced basis is degenerate".into()));
    }
    let zeta1 = (z.a() * g2.b() - g2.a() * z.b()) / &det;
    let zeta2 = (g1.a() * z.b() - z.a() * g1.b()) / &det;

    // |t2| ≤ (|σ1(f1)|ρ2 + |σ2(f1)|ρ1) / |δ| with δ = −2·det·√D
    let delta_lo = det.abs() * rat(BigInt::from(2)) * sqrt_lower(&rat(d.clone()), prec);
    let t2_max = (s1[0].abs_upper() * &rho_hi[1] + s1[1].abs_upper() * &rho_hi[0]) / delta_lo;
    let t2_max = t2_max * rat(BigInt::from(widen));
    let m2_lo = (&zeta2 - &t2_max).ceil().to_integer();
    let m2_hi = (&zeta2 + &t2_max).floor().to_integer();
    if &m2_hi - &m2_lo > BigInt::from(budget) {
        return Err(Error::EnumerationBudget(budget));
    }

    let mut points = Vec::new();
    let mut tested: u64 = 0;
    let mut m2 = m2_lo.clone();
    while m2 <= m2_hi {
        let t2 = rat(m2.clone()) - &zeta2;
        let mut range: Option<Interval> = None;
        for h in 0..2 {
            let span = Interval::symmetric(&rho_hi[h]).sub(&s2[h].scale(&t2));
            let Some(j) = span.div(&s1[h]) else {
                return Err(Error::Internal("basis element with zero embedding".into()));
            };
            let j = j.round_out(prec);
            range = Some(match range {
                None => j,
                Some(r) => match r.intersect(&j) {
                    Some(x) => x,
                    None => {
                        range = None;
                        break;
                    }
                },
            });
        }
        if let Some(r) = range {
            let c = r.mid();
            let half = (&r.hi - &r.lo) / rat(BigInt::from(2)) * rat(BigInt::from(widen));
            let lo = (&c - &half + &zeta1).ceil().to_integer();
            let hi = (&c + &half + &zeta1).floor().to_integer();
            let mut m1 = lo;
            while m1 <= hi {
                tested += 1;
                if tested > budget {
                    return Err(Error::EnumerationBudget(budget));
                }
                let w = &f1.scale(&m1) + &f2.scale(&m2);
                if is_member(region, &w) {
                    points.push(w);
                }
                m1 += 1;
            }
        }
        m2 += 1;
    }
    points.sort_by_key(doubled_key);
    Ok(Enumeration { points, tested, basis: [f1, f2], m2_range: (m2_lo, m2_hi) })
}
