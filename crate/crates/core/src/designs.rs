//! Direct spherical design verification on explicit point sets: exact
//! harmonic-sum and Gegenbauer-kernel criteria, the sphere-moment
//! averaging identity, Fisher-type lower bounds, antipodal half sets and
//! inner-product sets, and the closed-form strengths of three-point
//! circle configurations.
//!
//! Points are stored unnormalized as integer coordinate vectors with a
//! common denominator and a common squared norm, so every criterion runs
//! in exact rational arithmetic; each check is formulated
//! scale-invariantly and never needs the irrational radius itself.

use crate::error::Error;
use crate::harmonics;
use crate::lattices::Shell;
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// A finite subset of a sphere: integer coordinate rows over a common
/// denominator, pairwise distinct, all of one squared norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    denom: i64,
    norm2_scaled: i64,
    points: Vec<Vec<i64>>,
}

impl PointSet {
    /// Validates and canonicalizes raw rows: the true points are
    /// `points[i] / denom`, which must be nonempty, duplicate-free, of
    /// equal dimension, and share one positive squared norm.
    pub fn new(mut points: Vec<Vec<i64>>, denom: i64) -> Result<PointSet> {
        if denom < 1 {
            return Err(Error::Parse(format!(
                "point set denominator must be positive, got {denom}"
            )));
        }
        let first = points
            .first()
            .ok_or_else(|| Error::Parse("point set is empty".to_string()))?;
        let dim = first.len();
        let norm2_scaled: i64 = first.iter().map(|x| x * x).sum();
        if norm2_scaled == 0 {
            return Err(Error::Parse(
                "point set lies at the origin, not on a sphere".to_string(),
            ));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Parse(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            let n: i64 = p.iter().map(|x| x * x).sum();
            if n != norm2_scaled {
                return Err(Error::Parse(format!(
                    "points of squared norm {n} and {norm2_scaled} cannot share a sphere"
                )));
            }
        }
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("point set has duplicate points".to_string()));
        }
        Ok(PointSet {
            dim,
            denom,
            norm2_scaled,
            points,
        })
    }

    /// The points of an enumerated lattice shell.  Gram-model lattices
    /// are rejected: their stored coordinates are basis coefficients, not
    /// the Euclidean coordinates the design criteria need.
    pub fn from_shell(shell: &Shell) -> Result<PointSet> {
        if shell.lattice.gram().is_some() {
            return Err(Error::UnsupportedLattice(
                shell.lattice.name().to_string(),
                "design verification needs Euclidean coordinates".to_string(),
            ));
        }
        if shell.points.is_empty() {
            return Err(Error::EmptyShell {
                lattice: shell.lattice.name().to_string(),
                norm2: shell.two_m,
            });
        }
        PointSet::new(
            shell.points.iter().map(|p| p.coords.clone()).collect(),
            shell.lattice.scale_denom(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Squared norm of the integer rows (= ρ² · denom²).
    pub fn norm2_scaled(&self) -> i64 {
        self.norm2_scaled
    }

    /// Squared radius ρ² of the sphere the true points live on.
    pub fn rho2(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.norm2_scaled),
            BigInt::from(self.denom) * BigInt::from(self.denom),
        )
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// The image under an exact orthogonal map: coordinate i moves to
    /// slot `perm[i]`, negated where `negate[i]` is set.
    pub fn apply_signed_permutation(&self, perm: &[usize], negate: &[bool]) -> PointSet {
        assert_eq!(perm.len(), self.dim);
        assert_eq!(negate.len(), self.dim);
        let mut points: Vec<Vec<i64>> = self
            .points
            .iter()
            .map(|p| {
                let mut q = vec![0i64; self.dim];
                for i in 0..self.dim {
                    q[perm[i]] = if negate[i] { -p[i] } else { p[i] };
                }
                q
            })
            .collect();
        points.sort_unstable();
        PointSet {
            dim: self.dim,
            denom: self.denom,
            norm2_scaled: self.norm2_scaled,
            points,
        }
    }

    /// A(X): inner products ⟨x,y⟩/ρ² over distinct points, exact.
    pub fn inner_product_set(&self) -> BTreeSet<BigRational> {
        let denom = BigInt::from(self.norm2_scaled);
        let mut set = BTreeSet::new();
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let ip: i64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                set.insert(BigRational::new(BigInt::from(ip), denom.clone()));
                set.insert(BigRational::new(BigInt::from(-ip), denom.clone()));
            }
        }
        set
    }
}

/// Whether every point's negation is also in the set.
pub fn is_antipodal(x: &PointSet) -> bool {
    let index: BTreeSet<&[i64]> = x.points.iter().map(|p| p.as_slice()).collect();
    x.points
        .iter()
        .all(|p| index.contains(p.iter().map(|v| -v).collect::<Vec<_>>().as_slice()))
}

/// The lexicographically positive representative of each antipodal pair.
pub fn half_set(x: &PointSet) -> Result<PointSet> {
    if !is_antipodal(x) {
        return Err(Error::NotAntipodal(format!(
            "{} points with no matching negations",
            x.len()
        )));
    }
    let points: Vec<Vec<i64>> = x
        .points
        .iter()
        .filter(|p| {
            let neg: Vec<i64> = p.iter().map(|v| -v).collect();
            **p > neg
        })
        .cloned()
        .collect();
    Ok(PointSet {
        dim: x.dim,
        denom: x.denom,
        norm2_scaled: x.norm2_scaled,
        points,
    })
}

/// Exact sum of P over the raw integer points, for every P in a certified
/// harmonic basis; vanishing is scale-invariant for homogeneous P.
pub fn harmonic_sum_design(x: &PointSet, l: u32) -> Result<bool> {
    assert!(l >= 1);
    let basis = harmonics::harmonic_basis(x.dim, l)?;
    for p in &basis.polys {
        let mut total = BigRational::zero();
        for point in &x.points {
            total += p.eval_raw(point);
        }
        if !total.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficients (constant first) of the degree-ℓ zonal kernel polynomial:
/// Gegenbauer C_ℓ^{(λ)} with λ = (d−2)/2 for d ≥ 3, Chebyshev T_ℓ for
/// d = 2, via their shared three-term recurrence
/// (n+1)·C_{n+1} = 2(n+λ)·t·C_n − (n+2λ−1)·C_{n−1}.
fn zonal_coeffs(d: usize, l: u32) -> Vec<BigRational> {
    assert!(d >= 2 && l >= 1);
    if d == 2 {
        // λ → 0 collapses the Gegenbauer family; the S¹ zonal function is
        // cos(ℓθ) = T_ℓ(cos θ).
        let mut prev = vec![BigRational::one()];
        let mut cur = vec![BigRational::zero(), BigRational::one()];
        for _ in 1..l {
            let mut next = vec![BigRational::zero(); cur.len() + 1];
            for (k, c) in cur.iter().enumerate() {
                next[k + 1] += BigRational::from(BigInt::from(2)) * c;
            }
            for (k, c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            prev = cur;
            cur = next;
        }
        return cur;
    }
    let lambda = BigRational::new(BigInt::from(d as i64 - 2), BigInt::from(2));
    let mut prev = vec![BigRational::one()];
    let mut cur = vec![
        BigRational::zero(),
        BigRational::from(BigInt::from(2)) * &lambda,
    ];
    for n in 1..l as i64 {
        let a = (BigRational::from(BigInt::from(2 * n)) + BigRational::from(BigInt::from(2)) * &lambda)
            / BigRational::from(BigInt::from(n + 1));
        let b = (BigRational::from(BigInt::from(n - 1)) + BigRational::from(BigInt::from(2)) * &lambda)
            / BigRational::from(BigInt::from(n + 1));
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += &a * c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= &b * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn horner(coeffs: &[BigRational], t: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// The exact double sum Σ_{x,y∈X} C_ℓ(⟨x,y⟩/ρ²), diagonal included.  The
/// kernel is positive semidefinite, so the value is ≥ 0 and vanishes
/// exactly when X is a design at degree ℓ.
pub fn kernel_sum_value(x: &PointSet, l: u32) -> BigRational {
    assert!(l >= 1 && x.dim >= 2);
    let coeffs = zonal_coeffs(x.dim, l);
    let denom = BigInt::from(x.norm2_scaled);
    // ⟨x,y⟩ is symmetric, so sum the diagonal once and double the rest.
    let mut total = BigRational::zero();
    for (i, p) in x.points.iter().enumerate() {
        let self_ip: i64 = p.iter().map(|a| a * a).sum();
        total += horner(&coeffs, &BigRational::new(BigInt::from(self_ip), denom.clone()));
        for q in &x.points[i + 1..] {
            let ip: i64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
            let t = BigRational::new(BigInt::from(ip), denom.clone());
            total += BigRational::from(BigInt::from(2)) * horner(&coeffs, &t);
        }
    }
    assert!(
        !total.is_negative(),
        "positive-semidefinite kernel sum came out negative"
    );
    total
}

/// Kernel-route design test: the double sum vanishes.
pub fn kernel_sum_design(x: &PointSet, l: u32) -> bool {
    kernel_sum_value(x, l).is_zero()
}

/// Whether every degree-ℓ harmonic sums to zero over X, by the harmonic
/// route, falling back to the kernel route when the monomial space is too
/// large to build a basis.
pub fn is_design_at_degree(x: &PointSet, l: u32) -> Result<bool> {
    assert!(l >= 1);
    match harmonic_sum_design(x, l) {
        Ok(v) => Ok(v),
        Err(Error::BasisCapExceeded { .. }) => Ok(kernel_sum_design(x, l)),
        Err(e) => Err(e),
    }
}

/// Which routes a design verification runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignMethod {
    HarmonicSum,
    KernelSum,
    Both,
}

impl DesignMethod {
    fn as_str(self) -> &'static str {
        match self {
            DesignMethod::HarmonicSum => "harmonic-sum",
            DesignMethod::KernelSum => "kernel-sum",
            DesignMethod::Both => "both",
        }
    }
}

/// Exact evidence for one degree of a [`DesignVerdict`].
#[derive(Debug, Clone)]
pub struct DegreeCertificate {
    pub degree: u32,
    pub member: bool,
    /// Size of the harmonic basis whose sums were checked, when that
    /// route ran.
    pub harmonic_dim: Option<usize>,
    /// The exact kernel double sum (zero iff member), when that route ran.
    pub kernel_sum: Option<BigRational>,
}

impl DegreeCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "member": self.member,
            "harmonicDim": self.harmonic_dim,
            "kernelSum": self.kernel_sum.as_ref().map(|v| v.to_string()),
        })
    }
}

/// Design membership across a set of degrees, with per-degree evidence.
#[derive(Debug, Clone)]
pub struct DesignVerdict {
    pub degrees_checked: Vec<u32>,
    pub members: Vec<u32>,
    pub method: DesignMethod,
    pub certificates: Vec<DegreeCertificate>,
}

impl DesignVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "degreesChecked": self.degrees_checked,
            "members": self.members,
            "method": self.method.as_str(),
            "certificates": self.certificates.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Runs the selected route(s) at every degree.  With [`DesignMethod::Both`]
/// the two independent criteria must agree degree by degree.
pub fn verify_design(x: &PointSet, degrees: &[u32], method: DesignMethod) -> Result<DesignVerdict> {
    let mut certificates = Vec::with_capacity(degrees.len());
    let mut members = Vec::new();
    for &l in degrees {
        let harmonic = match method {
            DesignMethod::HarmonicSum | DesignMethod::Both => Some(harmonic_sum_design(x, l)?),
            DesignMethod::KernelSum => None,
        };
        let kernel = match method {
            DesignMethod::KernelSum | DesignMethod::Both => Some(kernel_sum_value(x, l)),
            DesignMethod::HarmonicSum => None,
        };
        let member = match (&harmonic, &kernel) {
            (Some(h), Some(k)) => {
                assert_eq!(
                    *h,
                    k.is_zero(),
                    "harmonic-sum and kernel-sum verdicts disagree at degree {l}"
                );
                *h
            }
            (Some(h), None) => *h,
            (None, Some(k)) => k.is_zero(),
            (None, None) => unreachable!(),
        };
        if member {
            members.push(l);
        }
        certificates.push(DegreeCertificate {
            degree: l,
            member,
            harmonic_dim: harmonic
                .is_some()
                .then(|| harmonics::harm_dim(x.dim, l)),
            kernel_sum: kernel,
        });
    }
    Ok(DesignVerdict {
        degrees_checked: degrees.to_vec(),
        members,
        method,
        certificates,
    })
}

fn double_factorial_odd(n: u8) -> BigInt {
    // (n−1)!! for even n, i.e. 1·3·5⋯(n−1).
    let mut acc = BigInt::one();
    let mut k = 1u8;
    while k < n {
        acc *= BigInt::from(k);
        k += 2;
    }
    acc
}

/// Verifies the exact sphere-moment identity for every monomial of total
/// degree ≤ t: the average of (x/ρ)^α over X equals zero when any αᵢ is
/// odd, and ∏(αᵢ−1)!! / ∏_{j<|α|/2}(d+2j) when all are even.  Requires X
/// to be a design at every degree 1..=t and reports the first failing
/// degree otherwise.
pub fn verify_averaging(x: &PointSet, t: u32) -> Result<bool> {
    for l in 1..=t {
        if !is_design_at_degree(x, l)? {
            return Err(Error::NotADesign(l));
        }
    }
    let count = BigInt::from(x.len() as u64);
    for total in 1..=t {
        for alpha in harmonics::monomials(x.dim, total) {
            let mut lhs = BigInt::zero();
            for p in &x.points {
                let mut term = BigInt::one();
                for (xi, &e) in p.iter().zip(&alpha) {
                    for _ in 0..e {
                        term *= BigInt::from(*xi);
                    }
                }
                lhs += term;
            }
            if alpha.iter().any(|&e| e % 2 == 1) {
                if !lhs.is_zero() {
                    return Ok(false);
                }
                continue;
            }
            let s = total / 2;
            let mut moment_num = BigInt::one();
            for &e in &alpha {
                moment_num *= double_factorial_odd(e);
            }
            let mut moment_den = BigInt::one();
            for j in 0..s {
                moment_den *= BigInt::from(x.dim as u64 + 2 * j as u64);
            }
            let average = BigRational::new(
                lhs,
                &count * BigInt::from(x.norm2_scaled).pow(s),
            );
            if average != BigRational::new(moment_num, moment_den) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("Fisher bound exceeds u64")
}

/// Fisher-type lower bound on the size of a t-design in ℝ^d:
/// C(d+e−1, e) + C(d+e−2, e−1) points for t = 2e, and 2·C(d+e−1, e) for
/// t = 2e+1.
pub fn fisher_bound(d: usize, t: u32) -> u64 {
    assert!(d >= 2 && t >= 1);
    let e = (t / 2) as usize;
    if t % 2 == 0 {
        binom(d + e - 1, e) + binom(d + e - 2, e - 1)
    } else {
        2 * binom(d + e - 1, e)
    }
}

/// cos θ and sin θ for the supported rational angles θ = numπ/den, with
/// sin θ split as rat + irr·(√3/2).
fn exact_angle(num: i64, den: i64) -> Result<(BigRational, BigRational, BigRational)> {
    if den <= 0 {
        return Err(Error::UnsupportedAngle(num, den));
    }
    let g = num.gcd(&den);
    let (n, d) = (num / g, den / g);
    let n = n.rem_euclid(2 * d);
    let half = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
    match (n, d) {
        (1, 3) => Ok((half(1, 2), BigRational::zero(), BigRational::one())),
        (2, 3) => Ok((half(-1, 2), BigRational::zero(), BigRational::one())),
        (4, 3) => Ok((half(-1, 2), BigRational::zero(), -BigRational::one())),
        (1, 2) => Ok((BigRational::zero(), BigRational::one(), BigRational::zero())),
        (1, 1) => Ok((-BigRational::one(), BigRational::zero(), BigRational::zero())),
        _ => Err(Error::UnsupportedAngle(num, den)),
    }
}

/// Strength set of the three-point circle configuration {1, e^{iθ₁},
/// e^{iθ₂}}: all ℓ ≤ l_max with 1 + cos(ℓθ₁) + cos(ℓθ₂) = 0 and
/// sin(ℓθ₁) + sin(ℓθ₂) = 0, evaluated exactly via Chebyshev recurrences
/// (cos ℓθ = T_ℓ(cos θ), sin ℓθ = sin θ·U_{ℓ−1}(cos θ)) with the √3/2
/// parts tracked symbolically.
pub fn triangle_strength(
    theta1: (i64, i64),
    theta2: (i64, i64),
    l_max: u32,
) -> Result<Vec<u32>> {
    let angles = [exact_angle(theta1.0, theta1.1)?, exact_angle(theta2.0, theta2.1)?];
    let mut members = Vec::new();
    // Running Chebyshev values per angle: (T_{ℓ−1}, T_ℓ, U_{ℓ−2}, U_{ℓ−1}).
    let mut state: Vec<(BigRational, BigRational, BigRational, BigRational)> = angles
        .iter()
        .map(|(c, _, _)| {
            (
                BigRational::one(),
                c.clone(),
                BigRational::zero(),
                BigRational::one(),
            )
        })
        .collect();
    for l in 1..=l_max {
        let mut cos_sum = BigRational::one();
        let mut sin_rat = BigRational::zero();
        let mut sin_irr = BigRational::zero();
        for ((_, s_rat, s_irr), (_, t_l, _, u_lm1)) in angles.iter().zip(&state) {
            cos_sum += t_l;
            sin_rat += s_rat * u_lm1;
            sin_irr += s_irr * u_lm1;
        }
        if cos_sum.is_zero() && sin_rat.is_zero() && sin_irr.is_zero() {
            members.push(l);
        }
        for ((c, _, _), st) in angles.iter().zip(state.iter_mut()) {
            let two_c = BigRational::from(BigInt::from(2)) * c;
            let t_next = &two_c * &st.1 - &st.0;
            let u_next = &two_c * &st.3 - &st.2;
            st.0 = std::mem::replace(&mut st.1, t_next);
            st.2 = std::mem::replace(&mut st.3, u_next);
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{enumerate_shell, LatticeSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d4_roots() -> PointSet {
        let shell = enumerate_shell(&LatticeSpec::by_name("D4").unwrap(), 2).unwrap();
        PointSet::from_shell(&shell).unwrap()
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(vec![], 1).is_err());
        assert!(PointSet::new(vec![vec![0, 0]], 1).is_err());
        assert!(PointSet::new(vec![vec![1, 0], vec![1, 0]], 1).is_err());
        assert!(PointSet::new(vec![vec![1, 0], vec![1, 1]], 1).is_err());
        assert!(PointSet::new(vec![vec![1, 0], vec![0, 1, 0]], 1).is_err());
        let x = PointSet::new(vec![vec![0, 1], vec![1, 0]], 1).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.rho2(), BigRational::one());
    }

    #[test]
    fn quaternary_roots_form_the_ten_four_two_design() {
        let x = d4_roots();
        assert_eq!(x.len(), 24);
        for l in [2, 4, 10, 1, 3, 5, 7, 9] {
            assert_eq!(is_design_at_degree(&x, l).unwrap(), true, "degree {l}");
        }
        for l in [6, 8] {
            assert_eq!(is_design_at_degree(&x, l).unwrap(), false, "degree {l}");
        }
    }

    #[test]
    fn kernel_anchor_is_the_quadratic_gegenbauer() {
        // C₂^{(1)}(t) = 4t² − 1 drives the hand computation
        // 24·[C₂(1) + C₂(−1) + 8·C₂(½) + 8·C₂(−½) + 6·C₂(0)] = 0.
        let coeffs = zonal_coeffs(4, 2);
        let as_i = |v: i64| BigRational::from(BigInt::from(v));
        assert_eq!(coeffs, vec![as_i(-1), as_i(0), as_i(4)]);
        assert!(kernel_sum_value(&d4_roots(), 2).is_zero());
    }

    #[test]
    fn square_cross_fails_at_degree_four() {
        let x = PointSet::new(vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]], 1).unwrap();
        assert!(is_design_at_degree(&x, 2).unwrap());
        assert!(!is_design_at_degree(&x, 4).unwrap());
        // Σ (x⁴ − 6x²y² + y⁴) over the four points is 4, and the kernel
        // route sees T₄ sums 4 + 4 + 8·T₄(0) = 16.
        assert_eq!(kernel_sum_value(&x, 4), BigRational::from(BigInt::from(16)));
    }

    #[test]
    fn both_routes_agree_on_the_root_shell() {
        let x = d4_roots();
        let verdict = verify_design(&x, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10], DesignMethod::Both).unwrap();
        assert_eq!(verdict.members, vec![1, 2, 3, 4, 5, 7, 9, 10]);
        for c in &verdict.certificates {
            assert_eq!(c.member, c.kernel_sum.as_ref().unwrap().is_zero());
            assert!(c.harmonic_dim.is_some());
        }
        let json = verdict.to_json();
        assert_eq!(json["method"], json!("both"));
        assert_eq!(json["certificates"][1]["kernelSum"], json!("0"));
    }

    #[test]
    fn signed_permutations_preserve_membership() {
        let x = d4_roots();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..20 {
            let mut perm: Vec<usize> = (0..4).collect();
            for i in (1..4).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let negate: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
            let y = x.apply_signed_permutation(&perm, &negate);
            for l in [2, 4, 6] {
                assert_eq!(
                    is_design_at_degree(&y, l).unwrap(),
                    is_design_at_degree(&x, l).unwrap()
                );
            }
        }
    }

    #[test]
    fn kernel_sums_stay_nonnegative_on_random_subsets() {
        let x = d4_roots();
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
        for _ in 0..25 {
            let subset: Vec<Vec<i64>> = x
                .points()
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            if subset.is_empty() {
                continue;
            }
            let y = PointSet::new(subset, 1).unwrap();
            for l in [1, 2, 3, 4, 5] {
                assert!(!kernel_sum_value(&y, l).is_negative());
            }
        }
    }

    #[test]
    fn averaging_holds_through_degree_four() {
        let x = d4_roots();
        assert!(verify_averaging(&x, 4).unwrap());
        match verify_averaging(&x, 6) {
            Err(Error::NotADesign(6)) => {}
            other => panic!("expected the degree-6 precondition to fail, got {other:?}"),
        }
    }

    #[test]
    fn sphere_moment_spot_values() {
        // (1/24) Σ x₁²/ρ² = 1/4 and the quartic moment is 3/(4·6) = 1/8.
        let x = d4_roots();
        let mut sum2 = 0i64;
        let mut sum4 = 0i64;
        for p in x.points() {
            sum2 += p[0] * p[0];
            sum4 += p[0] * p[0] * p[0] * p[0];
        }
        assert_eq!(
            BigRational::new(BigInt::from(sum2), BigInt::from(24 * 2)),
            BigRational::new(BigInt::from(1), BigInt::from(4))
        );
        assert_eq!(
            BigRational::new(BigInt::from(sum4), BigInt::from(24 * 4)),
            BigRational::new(BigInt::from(1), BigInt::from(8))
        );
    }

    #[test]
    fn fisher_bound_values() {
        assert_eq!(fisher_bound(2, 2), 3);
        assert_eq!(fisher_bound(4, 1), 2);
        assert_eq!(fisher_bound(7, 1), 2);
        assert_eq!(fisher_bound(4, 3), 8);
    }

    #[test]
    fn half_sets_and_inner_products_of_the_root_shell() {
        let x = d4_roots();
        assert!(is_antipodal(&x));
        let half = half_set(&x).unwrap();
        assert_eq!(half.len(), 12);
        for p in half.points() {
            let neg: Vec<i64> = p.iter().map(|v| -v).collect();
            assert!(!half.points().contains(&neg));
        }
        let third = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(2));
        let ips = half.inner_product_set();
        assert!(ips.is_subset(&BTreeSet::from([third(-1), third(0), third(1)])));
    }

    #[test]
    fn half_set_requires_antipodality() {
        let e1 = PointSet::new(vec![vec![1, 0], vec![-1, 0]], 1).unwrap();
        assert_eq!(half_set(&e1).unwrap().points(), &[vec![1, 0]]);
        let tri = PointSet::new(vec![vec![1, 0], vec![0, 1], vec![-1, 0]], 1).unwrap();
        assert!(matches!(half_set(&tri), Err(Error::NotAntipodal(_))));
    }

    #[test]
    fn triangle_strengths_match_the_closed_forms() {
        let symmetric = triangle_strength((2, 3), (4, 3), 12).unwrap();
        assert_eq!(symmetric, vec![1, 2, 4, 5, 7, 8, 10, 11]);
        let skew = triangle_strength((1, 3), (2, 3), 12).unwrap();
        assert_eq!(skew, vec![2, 4, 8, 10]);
        assert_eq!(triangle_strength((2, 3), (4, 3), 0).unwrap(), Vec::<u32>::new());
        assert!(matches!(
            triangle_strength((1, 5), (2, 5), 4),
            Err(Error::UnsupportedAngle(1, 5))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// The positive-definite kernel sum never goes negative, whatever
        /// subset of points it is fed.
        #[test]
        fn kernel_sums_are_nonnegative_on_arbitrary_subsets(
            mask in 1u32..(1 << 12),
            l in 1u32..7,
        ) {
            let half = half_set(&d4_roots()).unwrap();
            let chosen: Vec<Vec<i64>> = half
                .points()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone())
                .collect();
            let subset = PointSet::new(chosen, half.denom()).unwrap();
            prop_assert!(!kernel_sum_value(&subset, l).is_negative());
        }

        /// Relabelling axes and flipping signs never changes whether a set
        /// is a design at any degree.
        #[test]
        fn signed_permutations_preserve_design_degrees(
            perm_seed in 0u64..10_000,
            l in 1u32..9,
        ) {
            let roots = d4_roots();
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            let mut perm: Vec<usize> = (0..4).collect();
            for i in (1..4).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let negate: Vec<bool> = (0..4).map(|_| rng.gen()).collect();
            let moved = roots.apply_signed_permutation(&perm, &negate);
            prop_assert_eq!(
                is_design_at_degree(&roots, l).unwrap(),
                is_design_at_degree(&moved, l).unwrap()
            );
        }
    }
}
