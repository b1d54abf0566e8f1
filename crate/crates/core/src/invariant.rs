//! Harmonic polynomials invariant under coordinate signed permutations,
//! held in a compressed power-sum form.
//!
//! Shells of the coordinate lattices are stable under all signed
//! permutations (and the even-sign ones for the doubled model), so for any
//! polynomial P and any such symmetry σ the shell sums of P and P∘σ agree.
//! Averaging over the group therefore preserves every shell sum, and shell
//! sums over all harmonics of a degree are already determined by the
//! invariant harmonics of that degree.  Those live in a tiny space: plain
//! terms are monomials in the even power sums s_k = Σᵢ xᵢ^{2k}, and the
//! alternating terms carry one extra factor e = x₁⋯x_d (invariant under
//! even sign changes only).  A degree-24 computation that is hopeless as a
//! dense polynomial in 8 variables is a handful of partition-indexed terms
//! here, and evaluation at a point reuses one shared table of power sums.
//!
//! The Laplacian acts by exact combinatorial rules on this form, with
//! s₀ = d as a scalar:
//!
//! Δ(s^a)   = Σ_k 2k(2k−1)·a_k·s_{k−1}·s^{a−e_k}
//!          + Σ_{k,j} 4kj·a_k(a_j−δ_{kj})·s_{k+j−1}·s^{a−e_k−e_j},
//! Δ(e·s^a) = e·[Δ(s^a) + Σ_k 4k·a_k·s_{k−1}·s^{a−e_k}].

use crate::error::Error;
use crate::harmonics::Polynomial;
use crate::linalg::{self, SolveOutcome};
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Exponent vector over s₁, s₂, …; index i holds the exponent of s_{i+1}.
/// Trailing zeros are trimmed, so the empty vector is the constant 1.
type Exps = Vec<u8>;

fn canon(mut v: Exps) -> Exps {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn weight(e: &[u8]) -> u32 {
    e.iter()
        .enumerate()
        .map(|(i, &a)| (i as u32 + 1) * a as u32)
        .sum()
}

/// Polynomial in the even power sums, optionally times e = x₁⋯x_d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    dim: usize,
    plain: BTreeMap<Exps, BigRational>,
    alt: BTreeMap<Exps, BigRational>,
}

impl SymPoly {
    pub fn zero(dim: usize) -> SymPoly {
        SymPoly {
            dim,
            plain: BTreeMap::new(),
            alt: BTreeMap::new(),
        }
    }

    /// A single term `coeff · s^exps`, or `coeff · e · s^exps`.
    pub fn term(dim: usize, exps: &[u8], alt: bool, coeff: BigRational) -> SymPoly {
        let mut p = SymPoly::zero(dim);
        p.add_term(alt, canon(exps.to_vec()), coeff);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.plain.is_empty() && self.alt.is_empty()
    }

    /// Terms as (has_e_factor, exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (bool, &[u8], &BigRational)> {
        self.plain
            .iter()
            .map(|(e, c)| (false, e.as_slice(), c))
            .chain(self.alt.iter().map(|(e, c)| (true, e.as_slice(), c)))
    }

    pub fn num_terms(&self) -> usize {
        self.plain.len() + self.alt.len()
    }

    /// Realized homogeneous degree; panics if terms disagree.
    pub fn degree(&self) -> u32 {
        let mut deg: Option<u32> = None;
        for (alt, e, _) in self.terms() {
            let d = 2 * weight(e) + if alt { self.dim as u32 } else { 0 };
            match deg {
                None => deg = Some(d),
                Some(x) => assert_eq!(x, d, "inhomogeneous power-sum polynomial"),
            }
        }
        deg.unwrap_or(0)
    }

    fn add_term(&mut self, alt: bool, exps: Exps, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let map = if alt { &mut self.alt } else { &mut self.plain };
        match map.entry(exps) {
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

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (alt, e, c) in other.terms() {
            out.add_term(alt, e.to_vec(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.dim);
        }
        SymPoly {
            dim: self.dim,
            plain: self.plain.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            alt: self.alt.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiply by s₁ (the squared radius).
    pub fn times_r2(&self) -> SymPoly {
        let bump = |e: &Exps| {
            let mut ne = e.clone();
            if ne.is_empty() {
                ne.push(1);
            } else {
                ne[0] += 1;
            }
            ne
        };
        SymPoly {
            dim: self.dim,
            plain: self.plain.iter().map(|(e, c)| (bump(e), c.clone())).collect(),
            alt: self.alt.iter().map(|(e, c)| (bump(e), c.clone())).collect(),
        }
    }

    /// Exact Laplacian in power-sum form.
    pub fn laplacian(&self) -> SymPoly {
        let d = self.dim;
        let mut out = SymPoly::zero(d);
        for (alt, e, c) in self.terms() {
            for (i, &ai) in e.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                let k = i as i64 + 1;
                // 2k(2k−1)·a_k·s_{k−1}·s^{a−e_k}, plus the gradient cross
                // term 4k·a_k·s_{k−1}·s^{a−e_k} against the e factor.
                let mut base = e.to_vec();
                base[i] -= 1;
                let mut f = BigRational::from(BigInt::from(2 * k * (2 * k - 1) * ai as i64));
                if alt {
                    f += BigRational::from(BigInt::from(4 * k * ai as i64));
                }
                out.add_term(alt, mul_power_sum(&base, k - 1, d, &mut f), c * f.clone());
                // 4kj·a_k(a_j−δ)·s_{k+j−1}·s^{a−e_k−e_j}.
                for (j, &aj) in e.iter().enumerate() {
                    let l = j as i64 + 1;
                    let count = if i == j { ai as i64 - 1 } else { aj as i64 };
                    if count <= 0 {
                        continue;
                    }
                    let mut second = e.to_vec();
                    second[i] -= 1;
                    second[j] -= 1;
                    let mut f2 = BigRational::from(BigInt::from(4 * k * l * ai as i64 * count));
                    out.add_term(alt, mul_power_sum(&second, k + l - 1, d, &mut f2), c * f2);
                }
            }
        }
        out
    }

    /// Expand into a dense polynomial in the coordinates.
    pub fn realize(&self) -> Polynomial {
        let d = self.dim;
        let deg = self.degree();
        let mut out = Polynomial::zero(d, deg);
        for (alt, e, c) in self.terms() {
            let mut part = if alt {
                Polynomial::monomial(d, &vec![1u8; d], BigRational::one())
            } else {
                Polynomial::monomial(d, &vec![0u8; d], BigRational::one())
            };
            for (i, &a) in e.iter().enumerate() {
                let k = i + 1;
                for _ in 0..a {
                    let mut sk = Polynomial::zero(d, 2 * k as u32);
                    for v in 0..d {
                        let mut m = vec![0u8; d];
                        m[v] = (2 * k) as u8;
                        sk = sk
                            .add(&Polynomial::monomial(d, &m, BigRational::one()))
                            .unwrap();
                    }
                    part = part.mul(&sk);
                }
            }
            out = out.add(&part.scale(c)).unwrap();
        }
        out
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for (_, _, c) in self.terms() {
            l = num_integer::lcm(l, c.denom().clone());
        }
        l
    }

    /// JSON export: one record per term, exponents indexed so that entry k
    /// is the power of s_{k+1}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "terms": self
                .terms()
                .map(|(alt, e, c)| {
                    serde_json::json!({
                        "alt": alt,
                        "exponents": e,
                        "num": c.numer().to_string(),
                        "den": c.denom().to_string(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }

    /// Evaluate given the shared power-sum table t[k−1] = Σᵢ xᵢ^{2k} and
    /// the product e = Πᵢ xᵢ of the same point.
    pub fn eval_with_power_sums(&self, t: &[BigInt], e_val: &BigInt) -> BigRational {
        let mut acc = BigRational::zero();
        for (alt, e, c) in self.terms() {
            let mut m = BigInt::one();
            for (i, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    m *= &t[i];
                }
            }
            if alt {
                m *= e_val;
            }
            acc += c * BigRational::from(m);
        }
        acc
    }
}

/// Multiply an exponent vector by s_k (k ≥ 0); s₀ contributes the scalar d
/// to the coefficient instead.
fn mul_power_sum(e: &[u8], k: i64, d: usize, coeff: &mut BigRational) -> Exps {
    let mut out = e.to_vec();
    if k == 0 {
        *coeff *= BigRational::from(BigInt::from(d as i64));
    } else {
        let idx = (k - 1) as usize;
        if out.len() <= idx {
            out.resize(idx + 1, 0);
        }
        out[idx] += 1;
    }
    canon(out)
}

/// Power-sum table for a point: t[k−1] = Σᵢ cᵢ^{2k} for k = 1..=k_max.
pub fn power_sums(coords: &[i64], k_max: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); k_max];
    for &c in coords {
        let sq = BigInt::from(c) * BigInt::from(c);
        let mut p = BigInt::one();
        for slot in t.iter_mut() {
            p *= &sq;
            *slot += &p;
        }
    }
    t
}

/// Πᵢ cᵢ, the alternating factor of a point.
pub fn alternating_product(coords: &[i64]) -> BigInt {
    coords.iter().map(|&c| BigInt::from(c)).product()
}

/// Partitions of `total` into parts of size ≤ `max_part`, as exponent
/// vectors over s₁..s_{max_part}.
fn partitions(total: u32, max_part: u32) -> Vec<Exps> {
    fn rec(left: u32, max_part: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if left == 0 {
            out.push(canon(cur.clone()));
            return;
        }
        for part in (1..=max_part.min(left)).rev() {
            cur[(part - 1) as usize] += 1;
            rec(left - part, part, cur, out);
            cur[(part - 1) as usize] -= 1;
        }
    }
    let mut out = Vec::new();
    if total == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut cur = vec![0u8; max_part as usize];
    rec(total, max_part, &mut cur, &mut out);
    out
}

/// Dimension of the degree-ℓ invariant space (before removing radial
/// multiples): partition-counted monomials in s₁..s_d, plus the e·s^b
/// terms when they are admitted.
fn invariant_dim(d: usize, l: u32, with_alt: bool) -> usize {
    if l % 2 == 1 {
        // Odd degrees only occur through the e factor in odd dimension.
        return if with_alt && d % 2 == 1 && l >= d as u32 {
            partitions((l - d as u32) / 2, d as u32).len()
        } else {
            0
        };
    }
    let mut n = partitions(l / 2, d as u32).len();
    if with_alt && d % 2 == 0 && l >= d as u32 {
        n += partitions((l - d as u32) / 2, d as u32).len();
    }
    n
}

/// Dimension of the degree-ℓ invariant harmonics.
pub fn harmonic_dim(d: usize, l: u32, with_alt: bool) -> usize {
    let full = invariant_dim(d, l, with_alt);
    if l < 2 {
        return full;
    }
    let radial = invariant_dim(d, l - 2, with_alt);
    assert!(full >= radial);
    full - radial
}

/// Harmonic part of an invariant polynomial: the radial ansatz
/// P₀ = f + Σ aⱼ·s₁ʲ·Δʲf solved exactly in power-sum form, re-checked
/// against the Laplacian.
pub fn project(f: &SymPoly) -> SymPoly {
    if f.is_zero() || f.degree() < 2 {
        return f.clone();
    }
    let mut powers = Vec::new();
    let mut g = f.clone();
    for _ in 1..=(f.degree() / 2) {
        g = g.laplacian();
        if g.is_zero() {
            break;
        }
        let mut p = g.clone();
        for _ in 0..powers.len() + 1 {
            p = p.times_r2();
        }
        powers.push(p);
    }
    if powers.is_empty() {
        return f.clone();
    }
    let columns: Vec<SymPoly> = powers.iter().map(SymPoly::laplacian).collect();
    let rhs = f.laplacian();
    let mut rows: BTreeMap<(bool, Exps), usize> = BTreeMap::new();
    for p in columns.iter().chain(std::iter::once(&rhs)) {
        for (alt, e, _) in p.terms() {
            let next = rows.len();
            rows.entry((alt, e.to_vec())).or_insert(next);
        }
    }
    let mut mat = vec![vec![BigRational::zero(); columns.len()]; rows.len()];
    let mut b = vec![BigRational::zero(); rows.len()];
    for (j, p) in columns.iter().enumerate() {
        for (alt, e, c) in p.terms() {
            mat[rows[&(alt, e.to_vec())]][j] = c.clone();
        }
    }
    for (alt, e, c) in rhs.terms() {
        b[rows[&(alt, e.to_vec())]] = -c.clone();
    }
    let coeffs = match linalg::solve_exact(&mat, &b, columns.len()) {
        SolveOutcome::Unique(x) | SolveOutcome::Underdetermined(x) => x,
        SolveOutcome::Inconsistent => unreachable!("radial ansatz is always solvable"),
    };
    let mut out = f.clone();
    for (a, p) in coeffs.iter().zip(&powers) {
        if !a.is_zero() {
            out = out.add(&p.scale(a));
        }
    }
    assert!(
        out.laplacian().is_zero(),
        "invariant projection failed its Laplacian check"
    );
    out
}

/// Spanning set of the degree-ℓ invariant harmonics: the harmonic
/// projections of every admissible power-sum monomial (and e·monomial when
/// `with_alt`).  The projections span because projection is onto; zero
/// projections are dropped.
pub fn harmonic_spanning_set(d: usize, l: u32, with_alt: bool) -> Vec<SymPoly> {
    let mut out = Vec::new();
    if l % 2 == 0 {
        for e in partitions(l / 2, d as u32) {
            let p = project(&SymPoly::term(d, &e, false, BigRational::one()));
            if !p.is_zero() {
                out.push(p);
            }
        }
    }
    if with_alt && l >= d as u32 && (l - d as u32) % 2 == 0 {
        for e in partitions((l - d as u32) / 2, d as u32) {
            let p = project(&SymPoly::term(d, &e, true, BigRational::one()));
            if !p.is_zero() {
                out.push(p);
            }
        }
    }
    out
}

/// Deterministic random invariant harmonic, or None when the space is
/// zero-dimensional.  Zero projections retry with the seed incremented.
pub fn random_harmonic(d: usize, l: u32, seed: u64, with_alt: bool) -> Option<SymPoly> {
    if harmonic_dim(d, l, with_alt) == 0 {
        return None;
    }
    let mut attempt = seed;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let mut f = SymPoly::zero(d);
        let terms = 4 + l as usize / 2;
        for _ in 0..terms {
            let alt = with_alt
                && l >= d as u32
                && (l - d as u32) % 2 == 0
                && (l % 2 == 1 || rng.gen_bool(0.5));
            let budget = if alt { (l - d as u32) / 2 } else { l / 2 };
            if !alt && l % 2 == 1 {
                continue;
            }
            let mut e: Exps = Vec::new();
            let mut left = budget;
            while left > 0 {
                let part = rng.gen_range(1..=left.min(d as u32));
                let idx = (part - 1) as usize;
                if e.len() <= idx {
                    e.resize(idx + 1, 0);
                }
                e[idx] += 1;
                left -= part;
            }
            let mut c = 0i64;
            while c == 0 {
                c = rng.gen_range(-9..=9);
            }
            f.add_term(alt, canon(e), BigRational::from(BigInt::from(c)));
        }
        if !f.is_zero() {
            let p = project(&f);
            if !p.is_zero() {
                return Some(p);
            }
        }
        attempt += 1;
    }
}

/// Evaluate P(coords / scale_denom) through the shared power-sum table.
pub fn evaluate(p: &SymPoly, coords: &[i64], scale_denom: i64) -> Result<BigRational> {
    if coords.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "power-sum polynomial in {} variables evaluated at a {}-coordinate point",
            p.dim(),
            coords.len()
        )));
    }
    let deg = p.degree();
    let k_max = p.terms().map(|(_, e, _)| e.len()).max().unwrap_or(0);
    let t = power_sums(coords, k_max);
    let e_val = if p.terms().any(|(alt, _, _)| alt) {
        alternating_product(coords)
    } else {
        BigInt::one()
    };
    let raw = p.eval_with_power_sums(&t, &e_val);
    if scale_denom == 1 {
        return Ok(raw);
    }
    Ok(raw / BigRational::from(BigInt::from(scale_denom).pow(deg)))
}
