//! Exact homogeneous polynomials, Laplacians, and harmonic projection.
//!
//! Polynomials are maps from exponent vectors to rational coefficients in a
//! fixed graded-lexicographic order.  Harmonicity is always with respect to
//! a [`Metric`]: the Euclidean one for coordinate lattices, or the inverse
//! Gram matrix for lattices presented by a Gram matrix, where points carry
//! basis coefficients and Δ_G = Σ (G⁻¹)ᵢⱼ ∂ᵢ∂ⱼ is the pullback of the
//! ambient Laplacian.
//!
//! Projection onto the harmonic part uses the radial ansatz
//! P₀ = f + Σ_{j≥1} aⱼ·r^{2j}·Δʲf with the aⱼ solved exactly from
//! Δ(P₀) = 0, and the result is re-checked against the Laplacian before it
//! is returned.

use crate::error::Error;
use crate::linalg::{self, SolveOutcome};
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Homogeneous polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    degree: u32,
    terms: BTreeMap<Vec<u8>, BigRational>,
}

impl Polynomial {
    /// The zero polynomial, tagged with a nominal degree.
    pub fn zero(dim: usize, degree: u32) -> Self {
        Polynomial {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A single monomial `coeff · x^exponents`.
    pub fn monomial(dim: usize, exponents: &[u8], coeff: BigRational) -> Self {
        assert_eq!(exponents.len(), dim);
        let degree = exponents.iter().map(|&e| e as u32).sum();
        let mut p = Polynomial::zero(dim, degree);
        p.add_term(exponents.to_vec(), coeff);
        p
    }

    /// Build from integer-coefficient terms; all terms must share a degree.
    pub fn from_integer_terms(dim: usize, terms: &[(&[u8], i64)]) -> Self {
        let mut it = terms.iter();
        let first = it.next().expect("at least one term");
        let mut p = Polynomial::monomial(
            dim,
            first.0,
            BigRational::from(BigInt::from(first.1)),
        );
        for (e, c) in it {
            assert_eq!(
                e.iter().map(|&x| x as u32).sum::<u32>(),
                p.degree,
                "terms must be homogeneous of one degree"
            );
            p.add_term(e.to_vec(), BigRational::from(BigInt::from(*c)));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, exps: Vec<u8>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.dim);
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Sum of two polynomials of the same dimension and degree (a zero
    /// polynomial adapts to the other operand's degree).
    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.dim != other.dim || (!self.is_zero() && !other.is_zero() && self.degree != other.degree) {
            return Err(Error::DimensionMismatch(format!(
                "cannot add degree-{} in {} variables to degree-{} in {}",
                self.degree, self.dim, other.degree, other.dim
            )));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim, self.degree);
        }
        Polynomial {
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Product; degrees add.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, other.dim);
        let mut out = Polynomial::zero(self.dim, self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Exact partial derivative ∂/∂xᵢ.
    pub fn derivative(&self, i: usize) -> Polynomial {
        assert!(i < self.dim);
        let mut out = Polynomial::zero(self.dim, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] >= 1 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c * BigRational::from(BigInt::from(e[i])));
            }
        }
        out
    }

    /// P(coords) as an exact rational (coords unscaled).
    pub fn eval_raw(&self, coords: &[i64]) -> BigRational {
        assert_eq!(coords.len(), self.dim);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = BigInt::one();
            let mut skip = false;
            for (x, &p) in coords.iter().zip(e.iter()) {
                if p == 0 {
                    continue;
                }
                if *x == 0 {
                    skip = true;
                    break;
                }
                m *= BigInt::from(*x).pow(p as u32);
            }
            if !skip {
                acc += c * BigRational::from(m);
            }
        }
        acc
    }

    /// Precompose with the signed permutation x_i ↦ sign_i · x_{perm[i]}.
    pub fn apply_signed_permutation(&self, perm: &[usize], negate: &[bool]) -> Polynomial {
        assert_eq!(perm.len(), self.dim);
        assert_eq!(negate.len(), self.dim);
        let mut out = Polynomial::zero(self.dim, self.degree);
        for (e, c) in &self.terms {
            let mut ne = vec![0u8; self.dim];
            let mut sign = false;
            for i in 0..self.dim {
                ne[perm[i]] += e[i];
                if negate[i] && e[i] % 2 == 1 {
                    sign = !sign;
                }
            }
            let coeff = if sign { -c.clone() } else { c.clone() };
            out.add_term(ne, coeff);
        }
        out
    }

    /// JSON export: a list of `{exponents, num, den}` objects.
    pub fn to_json(&self) -> Value {
        let list: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                json!({
                    "exponents": e.iter().map(|&x| x as u64).collect::<Vec<_>>(),
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect();
        Value::Array(list)
    }

    /// Inverse of [`Polynomial::to_json`]; the list must be non-empty and
    /// homogeneous.
    pub fn from_json(v: &Value) -> Result<Polynomial> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial JSON: expected a list".into()))?;
        if arr.is_empty() {
            return Err(Error::Parse("polynomial JSON: empty term list".into()));
        }
        let mut poly: Option<Polynomial> = None;
        for t in arr {
            let exps = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("polynomial JSON: missing exponents".into()))?;
            let e: Vec<u8> = exps
                .iter()
                .map(|x| {
                    x.as_u64()
                        .filter(|&v| v <= u8::MAX as u64)
                        .map(|v| v as u8)
                        .ok_or_else(|| Error::Parse("polynomial JSON: bad exponent".into()))
                })
                .collect::<Result<_>>()?;
            let num: BigInt = t
                .get("num")
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("polynomial JSON: bad num".into()))?;
            let den: BigInt = t
                .get("den")
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("polynomial JSON: bad den".into()))?;
            if den.is_zero() {
                return Err(Error::Parse("polynomial JSON: zero denominator".into()));
            }
            let c = BigRational::new(num, den);
            match &mut poly {
                None => poly = Some(Polynomial::monomial(e.len(), &e, c)),
                Some(p) => {
                    if e.len() != p.dim
                        || e.iter().map(|&x| x as u32).sum::<u32>() != p.degree
                    {
                        return Err(Error::Parse(
                            "polynomial JSON: terms are not homogeneous".into(),
                        ));
                    }
                    p.add_term(e, c);
                }
            }
        }
        Ok(poly.unwrap())
    }
}

/// The quadratic structure harmonicity is measured against: r² as a
/// polynomial and the coefficient matrix of the second-order operator.
#[derive(Debug, Clone)]
pub struct Metric {
    dim: usize,
    ginv: Vec<Vec<BigRational>>,
    r2: Polynomial,
}

impl Metric {
    /// Standard Euclidean structure on ℝ^d.
    pub fn euclidean(dim: usize) -> Metric {
        let ginv: Vec<Vec<BigRational>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut r2 = Polynomial::zero(dim, 2);
        for i in 0..dim {
            let mut e = vec![0u8; dim];
            e[i] = 2;
            r2.add_term(e, BigRational::one());
        }
        Metric { dim, ginv, r2 }
    }

    /// Structure pulled back through a Gram matrix: r² = xᵀGx and the
    /// operator matrix is G⁻¹.
    pub fn from_gram(gram: &[Vec<i64>]) -> Metric {
        let dim = gram.len();
        let g: Vec<Vec<BigRational>> = gram
            .iter()
            .map(|row| row.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
            .collect();
        let ginv = linalg::invert(&g).expect("Gram matrix must be invertible");
        let mut r2 = Polynomial::zero(dim, 2);
        for i in 0..dim {
            for j in 0..dim {
                if gram[i][j] != 0 {
                    let mut e = vec![0u8; dim];
                    e[i] += 1;
                    e[j] += 1;
                    r2.add_term(e, BigRational::from(BigInt::from(gram[i][j])));
                }
            }
        }
        Metric { dim, ginv, r2 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The squared-radius polynomial of this structure.
    pub fn r2(&self) -> &Polynomial {
        &self.r2
    }

    /// Apply the second-order operator Σ (G⁻¹)ᵢⱼ ∂ᵢ∂ⱼ.
    pub fn laplacian(&self, p: &Polynomial) -> Polynomial {
        assert_eq!(p.dim, self.dim, "dimension mismatch");
        let mut out = Polynomial::zero(p.dim, p.degree.saturating_sub(2));
        for (e, c) in &p.terms {
            for i in 0..p.dim {
                if e[i] == 0 {
                    continue;
                }
                for j in 0..p.dim {
                    let g = &self.ginv[i][j];
                    if g.is_zero() {
                        continue;
                    }
                    if i == j {
                        if e[i] >= 2 {
                            let mut ne = e.clone();
                            ne[i] -= 2;
                            let f = BigRational::from(BigInt::from(
                                e[i] as i64 * (e[i] as i64 - 1),
                            ));
                            out.add_term(ne, c * f * g);
                        }
                    } else if e[j] >= 1 {
                        let mut ne = e.clone();
                        ne[i] -= 1;
                        ne[j] -= 1;
                        let f = BigRational::from(BigInt::from(e[i] as i64 * e[j] as i64));
                        out.add_term(ne, c * f * g);
                    }
                }
            }
        }
        out
    }
}

/// Euclidean Laplacian Σ ∂²/∂xᵢ².
pub fn laplacian(p: &Polynomial) -> Polynomial {
    Metric::euclidean(p.dim).laplacian(p)
}

/// dim Harm_ℓ(ℝ^d) = C(d+ℓ−1, ℓ) − C(d+ℓ−3, ℓ−2).
pub fn harm_dim(d: usize, l: u32) -> usize {
    assert!(d >= 1);
    let l = l as usize;
    let full = binom(d + l - 1, l);
    if l < 2 {
        full
    } else {
        full - binom(d + l - 3, l - 2)
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial fits usize")
}

/// All degree-ℓ exponent vectors in d variables, lexicographically.
pub fn monomials(d: usize, l: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(binom(d + l as usize - 1, l as usize));
    let mut cur = vec![0u8; d];
    fill_monomials(&mut cur, 0, l as u8, &mut out);
    out
}

fn fill_monomials(cur: &mut Vec<u8>, pos: usize, left: u8, out: &mut Vec<Vec<u8>>) {
    if pos == cur.len() - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        fill_monomials(cur, pos + 1, left - v, out);
    }
    cur[pos] = 0;
}

/// Exact basis of the degree-ℓ harmonic polynomials.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub dim: usize,
    pub degree: u32,
    pub polys: Vec<Polynomial>,
    pub certified_dim: usize,
}

/// Kernel basis of the Laplacian on degree-ℓ homogeneous polynomials,
/// refusing monomial spaces larger than `cap`.
pub fn harmonic_basis_with_cap(d: usize, l: u32, cap: usize) -> Result<HarmonicBasis> {
    let monos = monomials(d, l);
    if monos.len() > cap {
        return Err(Error::BasisCapExceeded {
            size: monos.len(),
            cap,
        });
    }
    let expected = harm_dim(d, l);
    if l < 2 {
        let polys: Vec<Polynomial> = monos
            .iter()
            .map(|e| Polynomial::monomial(d, e, BigRational::one()))
            .collect();
        return Ok(HarmonicBasis {
            dim: d,
            degree: l,
            polys,
            certified_dim: expected,
        });
    }
    let lower = monomials(d, l - 2);
    let row_index: BTreeMap<&[u8], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    // Columns are degree-ℓ monomials; rows are the degree-(ℓ−2) coefficients
    // of their Laplacians.
    let mut mat = vec![vec![BigInt::zero(); monos.len()]; lower.len()];
    for (col, e) in monos.iter().enumerate() {
        for i in 0..d {
            if e[i] >= 2 {
                let mut ne = e.clone();
                ne[i] -= 2;
                let row = row_index[ne.as_slice()];
                mat[row][col] += BigInt::from(e[i] as i64 * (e[i] as i64 - 1));
            }
        }
    }
    let kernel = linalg::nullspace_int(&mat, monos.len());
    let polys: Vec<Polynomial> = kernel
        .iter()
        .map(|v| {
            let mut p = Polynomial::zero(d, l);
            for (e, c) in monos.iter().zip(v) {
                p.add_term(e.clone(), BigRational::from(c.clone()));
            }
            assert!(laplacian(&p).is_zero());
            p
        })
        .collect();
    assert_eq!(polys.len(), expected, "kernel dimension mismatch");
    Ok(HarmonicBasis {
        dim: d,
        degree: l,
        polys,
        certified_dim: expected,
    })
}

/// [`harmonic_basis_with_cap`] at the default cap of 3000 monomials.
pub fn harmonic_basis(d: usize, l: u32) -> Result<HarmonicBasis> {
    harmonic_basis_with_cap(d, l, 3000)
}

/// Harmonic part of `f` with respect to `metric`: the unique harmonic P₀
/// with f − P₀ divisible by r².  Computed from the radial ansatz
/// P₀ = f + Σ aⱼ r^{2j} Δʲf by an exact linear solve, then re-checked.
pub fn project_in(metric: &Metric, f: &Polynomial) -> Polynomial {
    if f.degree < 2 || f.is_zero() {
        return f.clone();
    }
    let l = f.degree;
    let capacity = (l / 2) as usize;
    let mut powers = Vec::with_capacity(capacity);
    let mut g = f.clone();
    let mut r2j = metric.r2().clone();
    for _ in 1..=capacity {
        g = metric.laplacian(&g);
        if g.is_zero() {
            break;
        }
        powers.push(r2j.mul(&g));
        r2j = r2j.mul(metric.r2());
    }
    if powers.is_empty() {
        let check = metric.laplacian(f);
        assert!(check.is_zero());
        return f.clone();
    }
    let columns: Vec<Polynomial> = powers.iter().map(|p| metric.laplacian(p)).collect();
    let rhs_poly = metric.laplacian(f);
    let mut rows: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for p in columns.iter().chain(std::iter::once(&rhs_poly)) {
        for (e, _) in p.terms() {
            let next = rows.len();
            rows.entry(e.to_vec()).or_insert(next);
        }
    }
    let mut mat = vec![vec![BigRational::zero(); columns.len()]; rows.len()];
    let mut b = vec![BigRational::zero(); rows.len()];
    for (j, p) in columns.iter().enumerate() {
        for (e, c) in p.terms() {
            mat[rows[e]][j] = c.clone();
        }
    }
    for (e, c) in rhs_poly.terms() {
        b[rows[e]] = -c.clone();
    }
    let coeffs = solve(&mat, &b, columns.len());
    let mut out = f.clone();
    for (a, p) in coeffs.iter().zip(&powers) {
        if !a.is_zero() {
            out = out.add(&p.scale(a)).expect("same degree");
        }
    }
    assert!(
        metric.laplacian(&out).is_zero(),
        "projection failed its Laplacian check"
    );
    out
}

fn solve(mat: &[Vec<BigRational>], b: &[BigRational], ncols: usize) -> Vec<BigRational> {
    match linalg::solve_exact(mat, b, ncols) {
        SolveOutcome::Unique(x) | SolveOutcome::Underdetermined(x) => x,
        SolveOutcome::Inconsistent => unreachable!("radial ansatz is always solvable"),
    }
}

/// Euclidean harmonic projection.
pub fn harmonic_project(f: &Polynomial) -> Polynomial {
    project_in(&Metric::euclidean(f.dim), f)
}

/// Deterministic random harmonic polynomial: the harmonic projection of a
/// sparse random integer-coefficient homogeneous polynomial.  Zero results
/// retry with the seed incremented.
pub fn random_harmonic_in(metric: &Metric, l: u32, seed: u64) -> Polynomial {
    assert!(l >= 1);
    let d = metric.dim();
    let mut attempt = seed;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let k = (l as usize + 4).min(binom(d + l as usize - 1, l as usize));
        let mut f = Polynomial::zero(d, l);
        for _ in 0..k {
            let mut e = vec![0u8; d];
            for _ in 0..l {
                e[rng.gen_range(0..d)] += 1;
            }
            let mut c = 0i64;
            while c == 0 {
                c = rng.gen_range(-9..=9);
            }
            f.add_term(e, BigRational::from(BigInt::from(c)));
        }
        let p = project_in(metric, &f);
        if !p.is_zero() {
            return p;
        }
        attempt += 1;
    }
}

/// Euclidean [`random_harmonic_in`].
pub fn random_harmonic(d: usize, l: u32, seed: u64) -> Polynomial {
    random_harmonic_in(&Metric::euclidean(d), l, seed)
}

/// Degree-ℓ harmonics supported on the two coordinates (a, b) alone.
///
/// The metric's Laplacian maps such polynomials to polynomials in the same
/// two coordinates (every other partial derivative kills them), and the
/// restricted operator is elliptic because a principal 2×2 block of a
/// positive-definite matrix is positive definite, so the kernel on the
/// ℓ+1 two-variable monomials has dimension exactly 2 for ℓ ≥ 1.  These
/// make very sparse harmonic witnesses: at most ℓ+1 terms each.
pub fn pair_harmonics(metric: &Metric, l: u32, a: usize, b: usize) -> Vec<Polynomial> {
    let d = metric.dim();
    assert!(a < d && b < d && a != b);
    let mono = |i: u32| -> Vec<u8> {
        let mut e = vec![0u8; d];
        e[a] = i as u8;
        e[b] = (l - i) as u8;
        e
    };
    if l < 2 {
        return (0..=l)
            .map(|i| Polynomial::monomial(d, &mono(i), BigRational::one()))
            .collect();
    }
    let cols = (l + 1) as usize;
    let mut mat = vec![vec![BigRational::zero(); cols]; (l - 1) as usize];
    for j in 0..=l {
        let lap = metric.laplacian(&Polynomial::monomial(d, &mono(j), BigRational::one()));
        for (e, c) in lap.terms() {
            mat[e[a] as usize][j as usize] += c;
        }
    }
    let int_rows: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for c in row {
                lcm = lcm.lcm(c.denom());
            }
            row.iter()
                .map(|c| (c * BigRational::from(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    let kernel = linalg::nullspace_int(&int_rows, cols);
    assert_eq!(kernel.len(), 2, "elliptic pair operator has a rank-2 kernel");
    kernel
        .iter()
        .map(|v| {
            let mut p = Polynomial::zero(d, l);
            for (j, coeff) in v.iter().enumerate() {
                if !coeff.is_zero() {
                    p.add_term(mono(j as u32), BigRational::from(coeff.clone()));
                }
            }
            assert!(metric.laplacian(&p).is_zero());
            p
        })
        .collect()
}

/// P(coords / scaleDenom) = P(coords) / scaleDenom^ℓ, exactly.
pub fn evaluate(p: &Polynomial, coords: &[i64], scale_denom: i64) -> Result<BigRational> {
    if coords.len() != p.dim {
        return Err(Error::DimensionMismatch(format!(
            "polynomial in {} variables evaluated at a {}-coordinate point",
            p.dim,
            coords.len()
        )));
    }
    let raw = p.eval_raw(coords);
    if scale_denom == 1 {
        return Ok(raw);
    }
    let scale = BigInt::from(scale_denom).pow(p.degree);
    Ok(raw / BigRational::from(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn br(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    /// 7Σxᵢ⁴ − 6Σ_{i<j}xᵢ²xⱼ² in `d` variables.
    fn quartic_invariant(d: usize) -> Polynomial {
        let mut p = Polynomial::zero(d, 4);
        for i in 0..d {
            let mut e = vec![0u8; d];
            e[i] = 4;
            p.add_term(e, br(7));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let mut e = vec![0u8; d];
                e[i] = 2;
                e[j] = 2;
                p.add_term(e, br(-6));
            }
        }
        p
    }

    #[test]
    fn laplacian_basics() {
        let p = Polynomial::from_integer_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        assert!(laplacian(&p).is_zero());
        let q = Polynomial::from_integer_terms(2, &[(&[2, 0], 1)]);
        let lq = laplacian(&q);
        assert_eq!(lq.num_terms(), 1);
        assert_eq!(lq.terms().next().unwrap().1, &br(2));
    }

    #[test]
    fn quartic_invariant_is_harmonic_in_dimension_eight() {
        let p4 = quartic_invariant(8);
        // Cross-check the two pieces separately: Δ(7Σxᵢ⁴) = 84Σxᵢ² and
        // Δ(6Σᵢ<ⱼxᵢ²xⱼ²) = 12(d−1)Σxᵢ² = 84Σxᵢ² in d = 8.
        let mut quartic = Polynomial::zero(8, 4);
        let mut cross = Polynomial::zero(8, 4);
        for (e, c) in p4.terms() {
            if c == &br(7) {
                quartic.add_term(e.to_vec(), c.clone());
            } else {
                cross.add_term(e.to_vec(), -c.clone());
            }
        }
        assert_eq!(laplacian(&quartic), laplacian(&cross));
        assert!(laplacian(&p4).is_zero());
        assert!(!laplacian(&quartic_invariant(7)).is_zero());
    }

    #[test]
    fn dimension_formula() {
        for l in 1..=8 {
            assert_eq!(harm_dim(2, l), 2);
        }
        assert_eq!(harm_dim(2, 0), 1);
        assert_eq!(harm_dim(3, 2), 5);
        assert_eq!(harm_dim(4, 2), 9);
        assert_eq!(harm_dim(8, 4), 294);
        assert_eq!(harm_dim(5, 0), 1);
        assert_eq!(harm_dim(5, 1), 5);
    }

    #[test]
    fn kernel_basis_counts_match_formula() {
        for d in 2..=5 {
            for l in 2..=6 {
                let basis = harmonic_basis(d, l).unwrap();
                assert_eq!(basis.polys.len(), harm_dim(d, l), "d={d} l={l}");
                assert_eq!(basis.certified_dim, basis.polys.len());
            }
        }
    }

    #[test]
    fn planar_cubic_basis_spans_the_classical_pair() {
        let basis = harmonic_basis(2, 3).unwrap();
        assert_eq!(basis.polys.len(), 2);
        // x³−3xy² and 3x²y−y³ must lie in the span: the combined
        // coefficient matrix keeps rank 2.
        let classical = [
            Polynomial::from_integer_terms(2, &[(&[3, 0], 1), (&[1, 2], -3)]),
            Polynomial::from_integer_terms(2, &[(&[2, 1], 3), (&[0, 3], -1)]),
        ];
        let monos = monomials(2, 3);
        let mut rows = Vec::new();
        for p in basis.polys.iter().chain(classical.iter()) {
            let mut row = vec![BigRational::zero(); monos.len()];
            for (e, c) in p.terms() {
                let idx = monos.iter().position(|m| m.as_slice() == e).unwrap();
                row[idx] = c.clone();
            }
            rows.push(row);
        }
        assert_eq!(linalg::rank_rational(&rows), 2);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            harmonic_basis_with_cap(8, 10, 3000),
            Err(Error::BasisCapExceeded { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        // Harmonic input is a fixed point.
        let h = Polynomial::from_integer_terms(2, &[(&[3, 0], 1), (&[1, 2], -3)]);
        assert_eq!(harmonic_project(&h), h);
        // Pure radial input projects to zero.
        let m = Metric::euclidean(4);
        assert!(harmonic_project(m.r2()).is_zero());
        // x₁⁴ in d=4 projects to a nonzero harmonic; idempotent.
        let f = Polynomial::from_integer_terms(4, &[(&[4, 0, 0, 0], 1)]);
        let p = harmonic_project(&f);
        assert!(!p.is_zero());
        assert!(laplacian(&p).is_zero());
        assert_eq!(harmonic_project(&p), p);
        // The radial remainder f − P₀ is r²·(degree ℓ−2 polynomial): its
        // evaluation vanishes wherever r² does — checked structurally by
        // projecting the remainder to zero.
        let remainder = f.sub(&p).unwrap();
        assert!(harmonic_project(&remainder).is_zero());
    }

    #[test]
    fn random_harmonics_are_harmonic_and_vary_by_seed() {
        for seed in 0..6u64 {
            let p = random_harmonic(4, 6, seed);
            assert!(laplacian(&p).is_zero());
            assert_eq!(p.degree(), 6);
        }
        let a = random_harmonic(4, 6, 1);
        let b = random_harmonic(4, 6, 2);
        // Independence: the two coefficient vectors span rank 2.
        let monos = monomials(4, 6);
        let mut rows = Vec::new();
        for p in [&a, &b] {
            let mut row = vec![BigRational::zero(); monos.len()];
            for (e, c) in p.terms() {
                let idx = monos.iter().position(|m| m.as_slice() == e).unwrap();
                row[idx] = c.clone();
            }
            rows.push(row);
        }
        assert_eq!(linalg::rank_rational(&rows), 2);
    }

    #[test]
    fn evaluation_examples() {
        let p4 = quartic_invariant(8);
        let root = [1i64, 1, 0, 0, 0, 0, 0, 0];
        assert_eq!(evaluate(&p4, &root, 1).unwrap(), br(8));
        let x1sq = Polynomial::from_integer_terms(4, &[(&[2, 0, 0, 0], 1)]);
        assert_eq!(evaluate(&x1sq, &[2, 0, 0, 0], 2).unwrap(), br(1));
        assert!(evaluate(&x1sq, &[1, 0], 1).is_err());
        // Odd degree over an antipodal pair cancels.
        let odd = random_harmonic(4, 5, 3);
        let x = [3i64, -1, 2, 0];
        let neg: Vec<i64> = x.iter().map(|v| -v).collect();
        let total = evaluate(&odd, &x, 1).unwrap() + evaluate(&odd, &neg, 1).unwrap();
        assert!(total.is_zero());
    }

    #[test]
    fn gram_metric_matches_pullback_structure() {
        let gram = vec![vec![2i64, -1], vec![-1, 2]];
        let m = Metric::from_gram(&gram);
        // Δ_G(xᵀGx) = 2·tr(G⁻¹G) = 2d.
        let lr2 = m.laplacian(m.r2());
        assert_eq!(lr2.terms().next().unwrap().1, &br(4));
        // Projection with respect to the Gram structure is harmonic for it.
        let f = Polynomial::from_integer_terms(2, &[(&[4, 0], 1), (&[0, 4], 2)]);
        let p = project_in(&m, &f);
        assert!(!p.is_zero());
        assert!(m.laplacian(&p).is_zero());
        // And differs from the Euclidean projection.
        assert_ne!(p, harmonic_project(&f));
    }

    #[test]
    fn gram_random_harmonics() {
        let e6 = crate::lattices::LatticeSpec::e6();
        let m = Metric::from_gram(e6.gram().unwrap());
        for seed in 0..3 {
            let p = random_harmonic_in(&m, 4, seed);
            assert!(m.laplacian(&p).is_zero());
            assert!(!laplacian(&p).is_zero() || p.is_zero());
        }
    }

    #[test]
    fn signed_permutations_preserve_harmonicity() {
        let p = random_harmonic(4, 6, 11);
        let perms = [
            (vec![1usize, 0, 2, 3], vec![true, false, false, false]),
            (vec![3, 2, 1, 0], vec![true, true, false, true]),
            (vec![2, 0, 3, 1], vec![false, true, true, true]),
        ];
        for (perm, neg) in &perms {
            let q = p.apply_signed_permutation(perm, neg);
            assert!(laplacian(&q).is_zero());
            assert_eq!(q.degree(), p.degree());
        }
    }

    #[test]
    fn json_round_trip() {
        let p = random_harmonic(3, 4, 7);
        let v = p.to_json();
        let back = Polynomial::from_json(&v).unwrap();
        assert_eq!(p, back);
        assert!(Polynomial::from_json(&json!([])).is_err());
    }

    #[test]
    fn pair_harmonics_are_sparse_kernel_bases() {
        let e = Metric::euclidean(4);
        let pair = pair_harmonics(&e, 3, 0, 2);
        assert_eq!(pair.len(), 2);
        for p in &pair {
            assert!(p.num_terms() <= 4);
            assert!(p
                .terms()
                .all(|(exps, _)| exps[1] == 0 && exps[3] == 0));
        }
        // In two dimensions the pair kernel is the whole harmonic space:
        // degree 3 recovers the span of x³−3xy² and 3x²y−y³.
        let planar = pair_harmonics(&Metric::euclidean(2), 3, 0, 1);
        for p in &planar {
            assert!(laplacian(p).is_zero());
        }
        let hex = Metric::from_gram(&[vec![2, -1], vec![-1, 2]]);
        for l in [1u32, 2, 4, 6] {
            let ws = pair_harmonics(&hex, l, 0, 1);
            assert_eq!(ws.len(), 2);
            for w in &ws {
                assert!(hex.laplacian(w).is_zero());
                assert!(w.num_terms() <= l as usize + 1);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// Every sampled polynomial is annihilated by the Euclidean
        /// Laplacian, is homogeneous of the requested degree, and is not
        /// the zero polynomial.
        #[test]
        fn sampled_harmonics_are_harmonic(d in 2usize..5, l in 1u32..5, seed in 0u64..1000) {
            let metric = Metric::euclidean(d);
            let p = random_harmonic_in(&metric, l, seed);
            prop_assert!(!p.is_zero());
            prop_assert_eq!(p.degree(), l);
            prop_assert!(laplacian(&p).is_zero());
        }

        /// The same holds for the Laplacian attached to a Gram matrix.
        #[test]
        fn gram_samples_vanish_under_the_metric_laplacian(l in 1u32..5, seed in 0u64..500) {
            let hex = Metric::from_gram(&[vec![2, -1], vec![-1, 2]]);
            let p = random_harmonic_in(&hex, l, seed);
            prop_assert!(!p.is_zero());
            prop_assert!(hex.laplacian(&p).is_zero());
        }
    }
}
