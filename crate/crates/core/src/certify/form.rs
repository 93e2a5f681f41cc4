use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::{FieldElem, QuadElem};
use crate::error::{Error, Result};
use crate::lattice::{enumerate, Lattice, Region};

/// `Q(x) = Σ_{i ≤ j} a_ij x_i x_j` with `a_ij ∈ 𝒪_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    d: BigInt,
    n: usize,
    /// Row-major upper triangle: `coeffs[i][j - i]` is `a_ij` (0-based).
    coeffs: Vec<Vec<QuadElem>>,
}

impl QuadraticForm {
    /// From the upper-triangular coefficients `a_ij`, given as rows of
    /// decreasing length.
    pub fn new(d: &BigInt, coeffs: Vec<Vec<QuadElem>>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::Parse("a form needs at least one variable".into()));
        }
        for (i, row) in coeffs.iter().enumerate() {
            if row.len() != n - i {
                return Err(Error::Parse(format!("row {} has {} entries, expected {}", i + 1, row.len(), n - i)));
            }
            if let Some(x) = row.iter().find(|x| x.d() != d) {
                return Err(Error::FieldMismatch(d.clone(), x.d().clone()));
            }
        }
        Ok(QuadraticForm { d: d.clone(), n, coeffs })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `a_ij` for `i ≤ j`, 0-based.
    pub fn coeff(&self, i: usize, j: usize) -> &QuadElem {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        &self.coeffs[i][j - i]
    }

    /// `⟨a_1, …, a_n⟩`.
    pub fn diagonal(d: &BigInt, diag: &[QuadElem]) -> Result<Self> {
        let n = diag.len();
        let coeffs =
            (0..n).map(|i| (i..n).map(|j| if i == j { diag[i].clone() } else { QuadElem::zero(d) }).collect()).collect();
        Self::new(d, coeffs)
    }

    /// Parses `a11 x1^2 + a12 x1 x2 + …`.
    ///
    /// Coefficients are integers or parenthesized elements such as
    /// `((1+sqrt(5))/2)`; variables are `x1, x2, …` or the letters `x, y, z, w`.
    /// Repeated monomials are added up.
    pub fn parse(s: &str, d: &BigInt) -> Result<Self> {
        let terms = parse_terms(s, d)?;
        let n = terms.iter().map(|(_, _, j)| j + 1).max().unwrap_or(0);
        let mut coeffs: Vec<Vec<QuadElem>> = (0..n).map(|i| vec![QuadElem::zero(d); n - i]).collect();
        for (c, i, j) in terms {
            let slot = &mut coeffs[i][j - i];
            *slot = &*slot + &c;
        }
        Self::new(d, coeffs)
    }

    /// The Gram matrix `b_ii = a_ii`, `b_ij = a_ij / 2`.
    pub fn gram(&self) -> Vec<Vec<FieldElem>> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let a = FieldElem::from_quad(self.coeff(i, j));
                        if i == j {
                            a
                        } else {
                            a.scale(&half)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `Q(v)`.
    pub fn eval(&self, v: &[QuadElem]) -> QuadElem {
        assert_eq!(v.len(), self.n);
        let mut s = QuadElem::zero(&self.d);
        for i in 0..self.n {
            for j in i..self.n {
                s = &s + &(&(self.coeff(i, j) * &v[i]) * &v[j]);
            }
        }
        s
    }

    /// Pivots `d_i` and multipliers `c_ij` (`j > i`) of
    /// `Q = Σ d_i (x_i + Σ_{j>i} c_ij x_j)²`.
    fn ldl(&self) -> Result<(Vec<FieldElem>, Vec<Vec<FieldElem>>)> {
        let mut g = self.gram();
        let n = self.n;
        let mut piv = Vec::with_capacity(n);
        let mut c = vec![vec![FieldElem::zero(&self.d); n]; n];
        for i in 0..n {
            let p = g[i][i].clone();
            if !p.is_totally_positive() {
                return Err(Error::IndefiniteForm);
            }
            let inv = p.inv().expect("totally positive pivot is invertible");
            for j in i + 1..n {
                c[i][j] = g[i][j].mul(&inv);
            }
            for j in i + 1..n {
                for l in i + 1..n {
                    g[j][l] = g[j][l].sub(&c[i][j].mul(&g[i][l]));
                }
            }
            piv.push(p);
        }
        Ok((piv, c))
    }

    /// Positive definite under both real embeddings.
    pub fn is_totally_positive_definite(&self) -> bool {
        self.ldl().is_ok()
    }

    /// Diagonal of the inverse Gram matrix.
    fn inverse_diagonal(&self) -> Vec<FieldElem> {
        let n = self.n;
        let mut a = self.gram();
        let mut inv: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { FieldElem::one(&self.d) } else { FieldElem::zero(&self.d) }).collect())
            .collect();
        for col in 0..n {
            let p = a[col][col].inv().expect("definite Gram matrix has nonzero leading minors");
            for j in 0..n {
                a[col][j] = a[col][j].mul(&p);
                inv[col][j] = inv[col][j].mul(&p);
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                        inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                    }
                }
            }
        }
        (0..n).map(|i| inv[i][i].clone()).collect()
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..self.n {
            for j in i..self.n {
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                let neg = c.is_rational() && c.a().is_negative();
                match (first, neg) {
                    (true, true) => f.write_str("-")?,
                    (false, true) => f.write_str(" - ")?,
                    (false, false) => f.write_str(" + ")?,
                    (true, false) => {}
                }
                first = false;
                let coef = match c.is_rational() {
                    true if c.a().abs().is_one() => String::new(),
                    true => format!("{} ", c.a().abs()),
                    false => format!("({c}) "),
                };
                if i == j {
                    write!(f, "{coef}x{}^2", i + 1)?;
                } else {
                    write!(f, "{coef}x{} x{}", i + 1, j + 1)?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn parse_terms(s: &str, d: &BigInt) -> Result<Vec<(QuadElem, usize, usize)>> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |msg: &str| Error::Parse(format!("{msg} in form {s:?}"));
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let mut neg = false;
        match chars[i] {
            '+' => i += 1,
            '-' => {
                neg = true;
                i += 1
            }
            _ if out.is_empty() => {}
            _ => return Err(err("expected + or -")),
        }
        let mut coef = QuadElem::one(d);
        if i < chars.len() && chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = chars[start..i].iter().collect::<String>().parse().map_err(|_| err("bad integer"))?;
            coef = QuadElem::from_int(d.clone(), n)?;
        } else if i < chars.len() && chars[i] == '(' {
            let start = i;
            let mut depth = 0i32;
            while i < chars.len() {
                match chars[i] {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                i += 1;
                if depth == 0 {
                    break;
                }
            }
            if depth != 0 {
                return Err(err("unbalanced parentheses"));
            }
            let inner: String = chars[start + 1..i - 1].iter().collect();
            coef = QuadElem::parse_in(&inner, d)?;
        }
        if neg {
            coef = -coef;
        }
        let mut vars = Vec::new();
        loop {
            if i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            let Some(&c) = chars.get(i) else { break };
            let idx = match c {
                'x' if chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) => {
                    i += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let k: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| err("bad index"))?;
                    if k == 0 {
                        return Err(err("variables are numbered from 1"));
                    }
                    k - 1
                }
                'x' | 'y' | 'z' | 'w' => {
                    i += 1;
                    "xyzw".find(c).unwrap()
                }
                _ => break,
            };
            vars.push(idx);
            if chars.get(i) == Some(&'^') {
                if chars.get(i + 1) != Some(&'2') {
                    return Err(err("only squares are allowed"));
                }
                i += 2;
                vars.push(idx);
            }
        }
        match vars.as_slice() {
            [a, b] => out.push((coef, *a.min(b), *a.max(b))),
            _ => return Err(err("every term must be quadratic")),
        }
    }
    if out.is_empty() {
        return Err(err("empty form"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representation {
    Found(Vec<QuadElem>),
    Impossible,
}

/// The search bounds and effort behind a decision.
#[derive(Clone, Debug, Serialize)]
pub struct SearchLog {
    /// `target·(G⁻¹)_ii`, the bound on `x_i²` in both embeddings.
    pub coordinate_bounds: Vec<String>,
    /// The same bounds as decimal approximations in the two embeddings.
    pub coordinate_bounds_approx: Vec<(f64, f64)>,
    pub nodes: u64,
    pub exhausted: bool,
}

fn approx(x: &FieldElem, conj: bool) -> f64 {
    use num_traits::ToPrimitive;
    x.embedding(conj, 64).mid().to_f64().unwrap_or(f64::NAN)
}

/// Decides whether `Q(x) = target` has a solution `x ∈ 𝒪_K^n`.
///
/// The search completes the square, `Q = Σ d_i (x_i − z_i)²`, and picks
/// `x_n, …, x_1` in turn; each `x_i` ranges over the exact solution set of
/// `d_i (x_i − z_i)² ⪯ T` with `T` the part of the target still unaccounted
/// for. Every candidate is also checked against `x_i² ⪯ target·(G⁻¹)_ii`.
pub fn decide_represent(form: &QuadraticForm, target: &QuadElem, budget: u64) -> Result<(Representation, SearchLog)> {
    if target.d() != form.d() {
        return Err(Error::FieldMismatch(form.d().clone(), target.d().clone()));
    }
    if !target.is_totally_positive() {
        return Err(Error::NotTotallyPositive(target.to_string()));
    }
    let (piv, c) = form.ldl()?;
    let t = FieldElem::from_quad(target);
    let bounds: Vec<FieldElem> = form.inverse_diagonal().iter().map(|g| g.mul(&t)).collect();
    let mut log = SearchLog {
        coordinate_bounds: bounds.iter().map(|b| b.to_string()).collect(),
        coordinate_bounds_approx: bounds.iter().map(|b| (approx(b, false), approx(b, true))).collect(),
        nodes: 0,
        exhausted: false,
    };
    let n = form.arity();
    let mut x = vec![QuadElem::zero(form.d()); n];
    let search = Search { piv: &piv, c: &c, bounds: &bounds, budget };
    let found = search.dfs(n, t, &mut x, &mut log.nodes)?;
    match found {
        true => {
            if form.eval(&x) != *target {
                return Err(Error::Internal(format!("Q({x:?}) differs from the target")));
            }
            Ok((Representation::Found(x), log))
        }
        false => {
            log.exhausted = true;
            Ok((Representation::Impossible, log))
        }
    }
}

struct Search<'a> {
    piv: &'a [FieldElem],
    c: &'a [Vec<FieldElem>],
    bounds: &'a [FieldElem],
    budget: u64,
}

impl Search<'_> {
    /// Assigns `x_{level−1}, …, x_0` given the remainder `rest`.
    fn dfs(&self, level: usize, rest: FieldElem, x: &mut [QuadElem], nodes: &mut u64) -> Result<bool> {
        if level == 0 {
            return Ok(rest.is_zero());
        }
        let i = level - 1;
        let d = rest.d().clone();
        let mut z = FieldElem::zero(&d);
        for j in level..x.len() {
            z = z.sub(&self.c[i][j].mul(&FieldElem::from_quad(&x[j])));
        }
        let gamma = rest.div(&self.piv[i]).expect("pivots are nonzero");
        let region = Region { gamma, center: z.clone(), lattice: Lattice::Integers };
        let mut points = enumerate(&region, self.budget)?.points;
        points.sort_by_key(|p| {
            let f = BigInt::from(2 / p.den() as u32);
            let (a, b) = (p.a() * &f, p.b() * &f);
            (b.abs(), a.abs(), b.is_negative(), a.is_negative())
        });
        for v in points {
            *nodes += 1;
            if *nodes > self.budget {
                return Err(Error::EnumerationBudget(self.budget));
            }
            let fv = FieldElem::from_quad(&v);
            if !self.bounds[i].sub(&fv.mul(&fv)).is_totally_nonnegative() {
                return Err(Error::Internal(format!("x_{} = {v} exceeds its coordinate bound", i + 1)));
            }
            let t = fv.sub(&z);
            let next = rest.sub(&self.piv[i].mul(&t.mul(&t)));
            x[i] = v;
            if self.dfs(i, next, x, nodes)? {
                return Ok(true);
            }
        }
        x[i] = QuadElem::zero(&d);
        Ok(false)
    }
}

/// Totally positive elements of `𝒪_K` with trace at most `trace_bound`,
/// sorted by trace, then norm, then coordinates.
pub fn totally_positive_up_to(d: &BigInt, trace_bound: u64) -> Vec<QuadElem> {
    let halves = d.mod_floor(&BigInt::from(4)).is_one();
    let mut out = Vec::new();
    // x = (A + B√D)/2 with A = Tr(x)
    for a in 1..=trace_bound {
        let a = BigInt::from(a);
        if !halves && a.is_odd() {
            continue;
        }
        let a2 = &a * &a;
        let bmax = (&a2 / d).sqrt();
        let mut b = -&bmax;
        while b <= bmax {
            let ok_parity = if halves { a.is_even() == b.is_even() } else { b.is_even() };
            if ok_parity && &b * &b * d < a2 {
                let x = QuadElem::new(d.clone(), a.clone(), b.clone(), 2).expect("parity checked");
                debug_assert!(x.is_totally_positive());
                out.push(x);
            }
            b += 1;
        }
    }
    out.sort_by(|x, y| {
        (x.trace(), x.norm(), x.b().clone(), x.a().clone()).cmp(&(y.trace(), y.norm(), y.b().clone(), y.a().clone()))
    });
    out
}
