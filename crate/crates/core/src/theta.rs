//! Weighted theta series by direct shell summation, rank evidence for the
//! degree-ℓ theta map, and identity checks against explicit q-series.
//!
//! The coefficient of q^m in a weighted theta series is the exact sum of
//! the weight polynomial over the norm-2m shell (norm-m for ℤⁿ).  Weights
//! come in two interchangeable forms: dense polynomials in the coordinates,
//! and compressed power-sum polynomials for the signed-permutation
//! invariant weights that dominate high-degree work.  A single enumeration
//! pass serves every weight at a shell: per point the evaluators share one
//! power table, accumulate in checked i128, and redo a shell in big
//! integers if anything overflows.
//!
//! Rank estimation never materializes huge harmonic bases.  For coordinate
//! lattices the shell sums of *all* harmonics of a degree are already
//! determined by the signed-permutation invariant ones (shells are stable
//! under those maps, so averaging changes no sum), and the invariant
//! module provides a small complete spanning set.  For Gram-matrix
//! lattices the sampler draws random metric-harmonics instead, and
//! stabilization doubles both the sample count and the coefficient depth.

use crate::error::Error;
use crate::harmonics::{self, Metric, Polynomial};
use crate::invariant::{self, SymPoly};
use crate::lattices::{for_each_point, LatticeModel, LatticeSpec};
use crate::linalg;
use crate::qseries::QSeries;
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// A homogeneous weight in either representation.
#[derive(Debug, Clone)]
pub enum Weight {
    Dense(Polynomial),
    PowerSum(SymPoly),
}

impl Weight {
    pub fn dim(&self) -> usize {
        match self {
            Weight::Dense(p) => p.dim(),
            Weight::PowerSum(p) => p.dim(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Weight::Dense(p) => p.degree(),
            Weight::PowerSum(p) => p.degree(),
        }
    }

    /// The constant 1 on d coordinates (theta of the bare lattice).
    pub fn one(dim: usize) -> Weight {
        Weight::Dense(Polynomial::monomial(
            dim,
            &vec![0u8; dim],
            BigRational::one(),
        ))
    }

    pub fn to_json(&self) -> Value {
        match self {
            Weight::Dense(p) => json!({"kind": "dense", "poly": p.to_json()}),
            Weight::PowerSum(p) => json!({"kind": "powerSum", "poly": p.to_json()}),
        }
    }
}

impl From<Polynomial> for Weight {
    fn from(p: Polynomial) -> Weight {
        Weight::Dense(p)
    }
}

impl From<SymPoly> for Weight {
    fn from(p: SymPoly) -> Weight {
        Weight::PowerSum(p)
    }
}

/// Exact weighted theta series: the stored q-series holds integer
/// numerators and `denom` carries the cleared weight denominators times
/// scaleDenom^ℓ, so coefficient m is `series[m] / denom`.
#[derive(Debug, Clone)]
pub struct ThetaSeries {
    lattice: LatticeSpec,
    degree: u32,
    series: QSeries,
    denom: BigInt,
    computed_up_to: usize,
}

impl ThetaSeries {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Integer numerator series (offset24 = 0).
    pub fn series(&self) -> &QSeries {
        &self.series
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn computed_up_to(&self) -> usize {
        self.computed_up_to
    }

    pub fn coefficient(&self, m: usize) -> Result<BigRational> {
        if m > self.computed_up_to {
            return Err(Error::PrecisionShortfall {
                need: m as i64,
                have: self.computed_up_to as i64,
            });
        }
        Ok(BigRational::new(
            self.series.coeffs()[m].clone(),
            self.denom.clone(),
        ))
    }

    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..=self.computed_up_to)
            .map(|m| self.coefficient(m).unwrap())
            .collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.series.coeffs().iter().all(Zero::is_zero)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice.name(),
            "degree": self.degree,
            "computedUpTo": self.computed_up_to,
            "denominator": self.denom.to_string(),
            "numerators": self
                .series
                .coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
        })
    }
}

enum PlanKind {
    Dense(Vec<(Vec<u8>, BigInt)>),
    Sym(Vec<(bool, Vec<u8>, BigInt)>),
}

/// One weight with denominators cleared to integer coefficients.
struct Plan {
    degree: u32,
    lcm: BigInt,
    kind: PlanKind,
}

fn build_plan(w: &Weight) -> Plan {
    match w {
        Weight::Dense(p) => {
            let mut lcm = BigInt::one();
            for (_, c) in p.terms() {
                lcm = lcm.lcm(c.denom());
            }
            let terms = p
                .terms()
                .map(|(e, c)| {
                    let n = (c * BigRational::from(lcm.clone())).to_integer();
                    (e.to_vec(), n)
                })
                .collect();
            Plan {
                degree: p.degree(),
                lcm,
                kind: PlanKind::Dense(terms),
            }
        }
        Weight::PowerSum(p) => {
            let lcm = p.denominator_lcm();
            let terms = p
                .terms()
                .map(|(alt, e, c)| {
                    let n = (c * BigRational::from(lcm.clone())).to_integer();
                    (alt, e.to_vec(), n)
                })
                .collect();
            Plan {
                degree: p.degree(),
                lcm,
                kind: PlanKind::Sym(terms),
            }
        }
    }
}

struct EvalShape {
    dim: usize,
    max_pow: usize,
    k_max: usize,
    need_alt: bool,
}

impl EvalShape {
    fn of(dim: usize, plans: &[Plan]) -> EvalShape {
        let mut max_pow = 0usize;
        let mut k_max = 0usize;
        let mut need_alt = false;
        for plan in plans {
            match &plan.kind {
                PlanKind::Dense(terms) => {
                    for (e, _) in terms {
                        for &x in e {
                            max_pow = max_pow.max(x as usize);
                        }
                    }
                }
                PlanKind::Sym(terms) => {
                    for (alt, e, _) in terms {
                        k_max = k_max.max(e.len());
                        need_alt |= *alt;
                    }
                }
            }
        }
        EvalShape {
            dim,
            max_pow,
            k_max,
            need_alt,
        }
    }
}

/// i128 images of every plan coefficient, or None when one does not fit.
fn narrow_coeffs(plans: &[Plan]) -> Option<Vec<Vec<i128>>> {
    plans
        .iter()
        .map(|plan| match &plan.kind {
            PlanKind::Dense(terms) => terms.iter().map(|(_, c)| c.to_i128()).collect(),
            PlanKind::Sym(terms) => terms.iter().map(|(_, _, c)| c.to_i128()).collect(),
        })
        .collect()
}

fn shell_sums_i128(
    lattice: &LatticeSpec,
    norm: i64,
    plans: &[Plan],
    coeffs: &[Vec<i128>],
    shape: &EvalShape,
) -> Result<Option<Vec<i128>>> {
    let mut acc = vec![0i128; plans.len()];
    let mut pows = vec![1i128; shape.dim * (shape.max_pow + 1)];
    let mut sums = vec![0i128; shape.k_max];
    let mut ok = true;
    for_each_point(lattice, norm, |x| {
        if !ok {
            return;
        }
        // Shared tables for this point.
        if shape.max_pow > 0 {
            for (i, &xi) in x.iter().enumerate() {
                let row = i * (shape.max_pow + 1);
                let mut p = 1i128;
                for j in 1..=shape.max_pow {
                    p = match p.checked_mul(xi as i128) {
                        Some(v) => v,
                        None => {
                            ok = false;
                            return;
                        }
                    };
                    pows[row + j] = p;
                }
            }
        }
        if shape.k_max > 0 {
            sums.fill(0);
            for &xi in x {
                let sq = (xi as i128) * (xi as i128);
                let mut p = 1i128;
                for slot in sums.iter_mut() {
                    p = match p.checked_mul(sq) {
                        Some(v) => v,
                        None => {
                            ok = false;
                            return;
                        }
                    };
                    *slot = match slot.checked_add(p) {
                        Some(v) => v,
                        None => {
                            ok = false;
                            return;
                        }
                    };
                }
            }
        }
        let mut alt_val = 1i128;
        if shape.need_alt {
            for &xi in x {
                alt_val = match alt_val.checked_mul(xi as i128) {
                    Some(v) => v,
                    None => {
                        ok = false;
                        return;
                    }
                };
            }
        }
        for (pi, plan) in plans.iter().enumerate() {
            let mut total = 0i128;
            match &plan.kind {
                PlanKind::Dense(terms) => {
                    for (ti, (e, _)) in terms.iter().enumerate() {
                        let mut v = coeffs[pi][ti];
                        for (i, &ex) in e.iter().enumerate() {
                            if ex > 0 {
                                v = match v
                                    .checked_mul(pows[i * (shape.max_pow + 1) + ex as usize])
                                {
                                    Some(w) => w,
                                    None => {
                                        ok = false;
                                        return;
                                    }
                                };
                            }
                        }
                        total = match total.checked_add(v) {
                            Some(w) => w,
                            None => {
                                ok = false;
                                return;
                            }
                        };
                    }
                }
                PlanKind::Sym(terms) => {
                    for (ti, (alt, e, _)) in terms.iter().enumerate() {
                        let mut v = coeffs[pi][ti];
                        for (i, &ex) in e.iter().enumerate() {
                            for _ in 0..ex {
                                v = match v.checked_mul(sums[i]) {
                                    Some(w) => w,
                                    None => {
                                        ok = false;
                                        return;
                                    }
                                };
                            }
                        }
                        if *alt {
                            v = match v.checked_mul(alt_val) {
                                Some(w) => w,
                                None => {
                                    ok = false;
                                    return;
                                }
                            };
                        }
                        total = match total.checked_add(v) {
                            Some(w) => w,
                            None => {
                                ok = false;
                                return;
                            }
                        };
                    }
                }
            }
            acc[pi] = match acc[pi].checked_add(total) {
                Some(w) => w,
                None => {
                    ok = false;
                    return;
                }
            };
        }
    })?;
    Ok(ok.then_some(acc))
}

fn shell_sums_big(
    lattice: &LatticeSpec,
    norm: i64,
    plans: &[Plan],
    shape: &EvalShape,
) -> Result<Vec<BigInt>> {
    let mut acc = vec![BigInt::zero(); plans.len()];
    let mut pows = vec![BigInt::one(); shape.dim * (shape.max_pow + 1)];
    let mut sums = vec![BigInt::zero(); shape.k_max];
    for_each_point(lattice, norm, |x| {
        if shape.max_pow > 0 {
            for (i, &xi) in x.iter().enumerate() {
                let row = i * (shape.max_pow + 1);
                let xi = BigInt::from(xi);
                for j in 1..=shape.max_pow {
                    pows[row + j] = &pows[row + j - 1] * &xi;
                }
            }
        }
        if shape.k_max > 0 {
            for slot in sums.iter_mut() {
                slot.set_zero();
            }
            for &xi in x {
                let sq = BigInt::from(xi) * BigInt::from(xi);
                let mut p = BigInt::one();
                for slot in sums.iter_mut() {
                    p *= &sq;
                    *slot += &p;
                }
            }
        }
        let mut alt_val = BigInt::one();
        if shape.need_alt {
            alt_val = x.iter().map(|&v| BigInt::from(v)).product();
        }
        for (pi, plan) in plans.iter().enumerate() {
            match &plan.kind {
                PlanKind::Dense(terms) => {
                    for (e, c) in terms {
                        let mut v = c.clone();
                        for (i, &ex) in e.iter().enumerate() {
                            if ex > 0 {
                                v *= &pows[i * (shape.max_pow + 1) + ex as usize];
                            }
                        }
                        acc[pi] += v;
                    }
                }
                PlanKind::Sym(terms) => {
                    for (alt, e, c) in terms {
                        let mut v = c.clone();
                        for (i, &ex) in e.iter().enumerate() {
                            for _ in 0..ex {
                                v *= &sums[i];
                            }
                        }
                        if *alt {
                            v *= &alt_val;
                        }
                        acc[pi] += v;
                    }
                }
            }
        }
    })?;
    Ok(acc)
}

fn check_dims(lattice: &LatticeSpec, weights: &[Weight]) -> Result<()> {
    for w in weights {
        if w.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch(format!(
                "weight on {} variables against {} of dimension {}",
                w.dim(),
                lattice.name(),
                lattice.dim()
            )));
        }
    }
    Ok(())
}

fn plan_denom(lattice: &LatticeSpec, plan: &Plan) -> BigInt {
    &plan.lcm * BigInt::from(lattice.scale_denom()).pow(plan.degree)
}

fn zeroth_numerator(plan: &Plan) -> BigInt {
    if plan.degree == 0 {
        match &plan.kind {
            PlanKind::Dense(terms) => terms[0].1.clone(),
            PlanKind::Sym(terms) => terms[0].2.clone(),
        }
    } else {
        BigInt::zero()
    }
}

fn numerator_rows(
    lattice: &LatticeSpec,
    plans: &[Plan],
    lo: usize,
    hi: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let shape = EvalShape::of(lattice.dim(), plans);
    let narrow = narrow_coeffs(plans);
    (lo..=hi)
        .into_par_iter()
        .map(|m| {
            let norm = if lattice.is_even() { 2 * m as i64 } else { m as i64 };
            if let Some(coeffs) = &narrow {
                if let Some(fast) = shell_sums_i128(lattice, norm, plans, coeffs, &shape)? {
                    return Ok(fast.into_iter().map(BigInt::from).collect());
                }
            }
            shell_sums_big(lattice, norm, plans, &shape)
        })
        .collect()
}

/// Integer coefficient numerators for every weight at every m in lo..=hi
/// (lo ≥ 1): the value is `rows[m − lo][w] / denoms[w]`.  One shared
/// enumeration pass per m, as in [`multi_theta`], without materializing
/// the series prefix below `lo`.
pub fn numerator_block(
    lattice: &LatticeSpec,
    weights: &[Weight],
    lo: usize,
    hi: usize,
) -> Result<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    assert!(lo >= 1 && lo <= hi);
    check_dims(lattice, weights)?;
    let plans: Vec<Plan> = weights.iter().map(build_plan).collect();
    let denoms = plans.iter().map(|p| plan_denom(lattice, p)).collect();
    let rows = numerator_rows(lattice, &plans, lo, hi)?;
    Ok((denoms, rows))
}

/// Exact coefficient a(m) of every weight at once, from a single
/// enumeration of the m-th shell (m = 0 is the origin).
pub fn coefficients_at(
    lattice: &LatticeSpec,
    weights: &[Weight],
    m: usize,
) -> Result<Vec<BigRational>> {
    check_dims(lattice, weights)?;
    let plans: Vec<Plan> = weights.iter().map(build_plan).collect();
    let nums: Vec<BigInt> = if m == 0 {
        plans.iter().map(zeroth_numerator).collect()
    } else {
        numerator_rows(lattice, &plans, m, m)?.pop().unwrap()
    };
    Ok(nums
        .into_iter()
        .zip(&plans)
        .map(|(n, plan)| BigRational::new(n, plan_denom(lattice, plan)))
        .collect())
}

/// Theta series for several weights over one shared enumeration sweep.
pub fn multi_theta(
    lattice: &LatticeSpec,
    weights: &[Weight],
    m_max: usize,
) -> Result<Vec<ThetaSeries>> {
    check_dims(lattice, weights)?;
    let plans: Vec<Plan> = weights.iter().map(build_plan).collect();
    let per_m: Vec<Vec<BigInt>> = if m_max == 0 {
        Vec::new()
    } else {
        numerator_rows(lattice, &plans, 1, m_max)?
    };
    Ok(plans
        .iter()
        .enumerate()
        .map(|(pi, plan)| {
            let mut nums = Vec::with_capacity(m_max + 1);
            nums.push(zeroth_numerator(plan));
            for row in &per_m {
                nums.push(row[pi].clone());
            }
            let denom = plan_denom(lattice, plan);
            ThetaSeries {
                lattice: lattice.clone(),
                degree: plan.degree,
                series: QSeries::from_coeffs(0, nums),
                denom,
                computed_up_to: m_max,
            }
        })
        .collect())
}

/// Theta series of a single weight.
pub fn weighted_theta(
    lattice: &LatticeSpec,
    weight: &Weight,
    m_max: usize,
) -> Result<ThetaSeries> {
    Ok(multi_theta(lattice, std::slice::from_ref(weight), m_max)?
        .pop()
        .unwrap())
}

/// Depth beyond which further coefficients cannot break dependences among
/// the modular forms of the relevant weight and level: ⌈(d/2 + ℓ)·μ/12⌉ + 2
/// with index μ = 1, 3, 4, 6 for levels 1, 2, 3, 4.
pub fn default_coeff_depth(lattice: &LatticeSpec, l: u32) -> usize {
    let mu = match lattice.level() {
        1 => 1,
        2 => 3,
        3 => 4,
        4 => 6,
        other => panic!("no index for level {other}"),
    };
    let d = lattice.dim() as u32;
    (((d + 2 * l) * mu).div_ceil(24) + 2) as usize
}

/// Cusp-space dimension bound [ℓ/4] − [(ℓ+2)/6] for the unimodular
/// 8-dimensional lattice rows.
pub fn e8_expected_dim(l: u32) -> usize {
    (l / 4).saturating_sub((l + 2) / 6) as usize
}

/// Rank evidence for the degree-ℓ theta map on a lattice.
#[derive(Debug, Clone)]
pub struct ImageRankReport {
    pub lattice: String,
    pub degree: u32,
    pub sample_count: usize,
    pub coeff_depth: usize,
    pub rank_lower_bound: usize,
    pub stabilized: bool,
    pub expected_dim: Option<usize>,
}

impl ImageRankReport {
    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice,
            "degree": self.degree,
            "sampleCount": self.sample_count,
            "coeffDepth": self.coeff_depth,
            "rankLowerBound": self.rank_lower_bound,
            "stabilized": self.stabilized,
            "expectedDim": self.expected_dim,
        })
    }
}

fn rank_of_columns(rows: &[Vec<BigInt>], cols: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cut: Vec<Vec<BigInt>> = rows.iter().map(|r| r[..cols].to_vec()).collect();
    linalg::rank_int(&cut)
}

/// Exact lower bound for the rank of P ↦ (theta coefficients of P) on
/// degree-ℓ harmonics, with doubled-depth (and, for sampled lattices,
/// doubled-sample) stabilization.  `samples` and `coeff_depth` fall back
/// to 2·expectedDim + 4 and the depth of [`default_coeff_depth`].
pub fn image_rank(
    lattice: &LatticeSpec,
    l: u32,
    samples: Option<usize>,
    coeff_depth: Option<usize>,
    expected_dim: Option<usize>,
) -> Result<ImageRankReport> {
    assert!(l >= 2 && l % 2 == 0, "degree must be even and at least 2");
    let depth = coeff_depth.unwrap_or_else(|| default_coeff_depth(lattice, l));
    match lattice.model() {
        LatticeModel::Opaque => Err(Error::UnsupportedLattice(
            lattice.name().to_string(),
            "rank estimation needs shell enumeration".to_string(),
        )),
        LatticeModel::Gram(g) => {
            let g = g.clone();
            image_rank_gram(lattice, &g, l, samples, depth, expected_dim)
        }
        _ => image_rank_coordinate(lattice, l, depth, expected_dim),
    }
}

fn image_rank_coordinate(
    lattice: &LatticeSpec,
    l: u32,
    depth: usize,
    expected_dim: Option<usize>,
) -> Result<ImageRankReport> {
    let d = lattice.dim();
    let with_alt = matches!(lattice.model(), LatticeModel::DoubledE8);
    let span = invariant::harmonic_spanning_set(d, l, with_alt);
    if span.is_empty() {
        // The invariant harmonic space is zero-dimensional, so every shell
        // sum of every degree-ℓ harmonic vanishes identically.
        return Ok(ImageRankReport {
            lattice: lattice.name().to_string(),
            degree: l,
            sample_count: 0,
            coeff_depth: depth,
            rank_lower_bound: 0,
            stabilized: true,
            expected_dim,
        });
    }
    let mut monos: BTreeMap<(bool, Vec<u8>), usize> = BTreeMap::new();
    for p in &span {
        for (alt, e, _) in p.terms() {
            let next = monos.len();
            monos.entry((alt, e.to_vec())).or_insert(next);
        }
    }
    let mut weights = vec![Weight::one(1); monos.len()];
    for ((alt, e), idx) in &monos {
        weights[*idx] = Weight::PowerSum(SymPoly::term(d, e, *alt, BigRational::one()));
    }
    let moments = multi_theta(lattice, &weights, 2 * depth)?;
    // Every moment series shares the denominator scaleDenom^ℓ, so integer
    // numerators keep exact ranks; per-row lcm scaling is rank-neutral too.
    let rows: Vec<Vec<BigInt>> = span
        .iter()
        .map(|p| {
            let lcm = p.denominator_lcm();
            (1..=2 * depth)
                .map(|m| {
                    let mut total = BigInt::zero();
                    for (alt, e, c) in p.terms() {
                        let idx = monos[&(alt, e.to_vec())];
                        let n = (c * BigRational::from(lcm.clone())).to_integer();
                        total += n * &moments[idx].series().coeffs()[m];
                    }
                    total
                })
                .collect()
        })
        .collect();
    let rank_half = rank_of_columns(&rows, depth);
    let rank_full = linalg::rank_int(&rows);
    Ok(ImageRankReport {
        lattice: lattice.name().to_string(),
        degree: l,
        sample_count: span.len(),
        coeff_depth: depth,
        rank_lower_bound: rank_full,
        stabilized: rank_half == rank_full,
        expected_dim,
    })
}

fn sample_seed(l: u32, i: usize) -> u64 {
    0xA5EED + 1_000 * l as u64 + i as u64
}

fn image_rank_gram(
    lattice: &LatticeSpec,
    gram: &[Vec<i64>],
    l: u32,
    samples: Option<usize>,
    depth: usize,
    expected_dim: Option<usize>,
) -> Result<ImageRankReport> {
    let d = lattice.dim();
    let metric = Metric::from_gram(gram);
    let base = samples.unwrap_or_else(|| expected_dim.map(|e| 2 * e + 4).unwrap_or(12));
    let polys: Vec<Polynomial> = (0..2 * base)
        .map(|i| harmonics::random_harmonic_in(&metric, l, sample_seed(l, i)))
        .collect();
    let mut monos: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for p in &polys {
        for (e, _) in p.terms() {
            let next = monos.len();
            monos.entry(e.to_vec()).or_insert(next);
        }
    }
    let mut weights = vec![Weight::one(d); monos.len()];
    for (e, idx) in &monos {
        weights[*idx] = Weight::Dense(Polynomial::monomial(d, e, BigRational::one()));
    }
    let moments = multi_theta(lattice, &weights, 2 * depth)?;
    let rows: Vec<Vec<BigInt>> = polys
        .iter()
        .map(|p| {
            let mut lcm = BigInt::one();
            for (_, c) in p.terms() {
                lcm = lcm.lcm(c.denom());
            }
            (1..=2 * depth)
                .map(|m| {
                    let mut total = BigInt::zero();
                    for (e, c) in p.terms() {
                        let idx = monos[e];
                        let n = (c * BigRational::from(lcm.clone())).to_integer();
                        total += n * &moments[idx].series().coeffs()[m];
                    }
                    total
                })
                .collect()
        })
        .collect();
    let rank_half = rank_of_columns(&rows[..base], depth);
    let rank_full = linalg::rank_int(&rows);
    Ok(ImageRankReport {
        lattice: lattice.name().to_string(),
        degree: l,
        sample_count: base,
        coeff_depth: depth,
        rank_lower_bound: rank_full,
        stabilized: rank_half == rank_full,
        expected_dim,
    })
}

/// Outcome of an identity check between a theta series and a reference
/// q-series times a scalar.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub ok: bool,
    pub first_mismatch: Option<(usize, BigRational, BigRational)>,
}

/// Verify a_{Λ,P}(m) = scalar · reference(m) for all m ≤ mMax.
pub fn verify_eta_identity(
    lattice: &LatticeSpec,
    weight: &Weight,
    eta_product: &QSeries,
    scalar: &BigRational,
    m_max: usize,
) -> Result<IdentityCheck> {
    let theta = weighted_theta(lattice, weight, m_max)?;
    for m in 0..=m_max {
        let lhs = theta.coefficient(m)?;
        let rhs = scalar * BigRational::from(eta_product.coeff_at(m as i64)?);
        if lhs != rhs {
            return Ok(IdentityCheck {
                ok: false,
                first_mismatch: Some((m, lhs, rhs)),
            });
        }
    }
    Ok(IdentityCheck {
        ok: true,
        first_mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::count_shell;
    use crate::qseries;

    fn br(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    /// 7Σxᵢ⁴ − 6Σ_{i<j}xᵢ²xⱼ² as a dense polynomial.
    fn quartic_dense(d: usize) -> Polynomial {
        let mut terms: Vec<(Vec<u8>, i64)> = Vec::new();
        for i in 0..d {
            let mut e = vec![0u8; d];
            e[i] = 4;
            terms.push((e, 7));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let mut e = vec![0u8; d];
                e[i] = 2;
                e[j] = 2;
                terms.push((e, -6));
            }
        }
        let borrowed: Vec<(&[u8], i64)> = terms.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        Polynomial::from_integer_terms(d, &borrowed)
    }

    /// The same quartic in power-sum form: 10s₂ − 3s₁².
    fn quartic_sym(d: usize) -> SymPoly {
        SymPoly::term(d, &[0, 1], false, br(10)).add(&SymPoly::term(d, &[2], false, br(-3)))
    }

    #[test]
    fn octonary_quartic_weights_the_root_shell() {
        let d8 = LatticeSpec::by_name("D8").unwrap();
        let dense = weighted_theta(&d8, &Weight::Dense(quartic_dense(8)), 3).unwrap();
        assert_eq!(dense.coefficient(0).unwrap(), br(0));
        assert_eq!(dense.coefficient(1).unwrap(), br(896));
        let sym = weighted_theta(&d8, &Weight::PowerSum(quartic_sym(8)), 3).unwrap();
        for m in 0..=3 {
            assert_eq!(
                dense.coefficient(m).unwrap(),
                sym.coefficient(m).unwrap(),
                "m={m}"
            );
        }
    }

    #[test]
    fn constant_weight_recovers_shell_counts() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let theta = weighted_theta(&d4, &Weight::one(4), 8).unwrap();
        assert_eq!(theta.coefficient(0).unwrap(), br(1));
        for m in 1..=8usize {
            let count = count_shell(&d4, 2 * m as i64).unwrap();
            assert_eq!(theta.coefficient(m).unwrap(), br(count as i64), "m={m}");
        }
        // ℤ² shells sit at every norm, not only even ones.
        let z2 = LatticeSpec::by_name("Z2").unwrap();
        let theta = weighted_theta(&z2, &Weight::one(2), 10).unwrap();
        for m in 1..=10usize {
            let count = count_shell(&z2, m as i64).unwrap();
            assert_eq!(theta.coefficient(m).unwrap(), br(count as i64), "m={m}");
        }
        assert_eq!(theta.coefficient(3).unwrap(), br(0));
    }

    #[test]
    fn quadratic_harmonics_vanish_on_the_quaternary_lattice() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let p = Polynomial::from_integer_terms(4, &[(&[2, 0, 0, 0], 1), (&[0, 0, 2, 0], -1)]);
        let theta = weighted_theta(&d4, &Weight::Dense(p), 20).unwrap();
        assert!(theta.is_identically_zero());
        let q = Polynomial::from_integer_terms(4, &[(&[1, 1, 0, 0], 1)]);
        let theta = weighted_theta(&d4, &Weight::Dense(q), 20).unwrap();
        assert!(theta.is_identically_zero());
    }

    #[test]
    fn odd_degrees_vanish_on_antipodal_shells() {
        let z3 = LatticeSpec::by_name("Z3").unwrap();
        let p = harmonics::random_harmonic(3, 3, 9);
        let theta = weighted_theta(&z3, &Weight::Dense(p), 12).unwrap();
        assert!(theta.is_identically_zero());
    }

    #[test]
    fn theta_is_linear_in_the_weight() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let p = harmonics::random_harmonic(4, 4, 1);
        let q = harmonics::random_harmonic(4, 4, 2);
        let a = BigRational::new(BigInt::from(2), BigInt::from(3));
        let b = br(-5);
        let combo = p.scale(&a).add(&q.scale(&b)).unwrap();
        let tp = weighted_theta(&d4, &Weight::Dense(p), 10).unwrap();
        let tq = weighted_theta(&d4, &Weight::Dense(q), 10).unwrap();
        let tc = weighted_theta(&d4, &Weight::Dense(combo), 10).unwrap();
        for m in 0..=10 {
            assert_eq!(
                tc.coefficient(m).unwrap(),
                &a * tp.coefficient(m).unwrap() + &b * tq.coefficient(m).unwrap()
            );
        }
    }

    #[test]
    fn theta_is_invariant_under_lattice_signed_permutations() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let p = invariant::random_harmonic(4, 6, 3, false).unwrap().realize();
        let q = p.apply_signed_permutation(&[2, 0, 3, 1], &[true, true, false, false]);
        let tp = weighted_theta(&d4, &Weight::Dense(p), 8).unwrap();
        let tq = weighted_theta(&d4, &Weight::Dense(q), 8).unwrap();
        for m in 0..=8 {
            assert_eq!(tp.coefficient(m).unwrap(), tq.coefficient(m).unwrap());
        }
    }

    #[test]
    fn rank_reports_match_known_cells() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let r6 = image_rank(&d4, 6, None, None, None).unwrap();
        assert_eq!(r6.rank_lower_bound, 1);
        assert!(r6.stabilized);
        let r10 = image_rank(&d4, 10, None, None, None).unwrap();
        assert_eq!(r10.rank_lower_bound, 0);
        assert!(r10.stabilized);
        let e8 = LatticeSpec::by_name("E8").unwrap();
        let r8 = image_rank(&e8, 8, None, None, Some(e8_expected_dim(8))).unwrap();
        assert_eq!(r8.rank_lower_bound, 1);
        assert_eq!(r8.expected_dim, Some(1));
        assert!(r8.stabilized);
        assert!(r8.rank_lower_bound <= harmonics::harm_dim(8, 8));
    }

    #[test]
    fn expected_dimension_formula_row() {
        let row: Vec<usize> = (1..=12).map(|k| e8_expected_dim(2 * k)).collect();
        assert_eq!(row, vec![0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1, 2]);
    }

    #[test]
    fn gram_lattice_rank_evidence() {
        let e6 = LatticeSpec::by_name("E6").unwrap();
        let r2 = image_rank(&e6, 2, None, None, Some(0)).unwrap();
        assert_eq!(r2.rank_lower_bound, 0);
        assert!(r2.stabilized);
        let r6 = image_rank(&e6, 6, None, None, Some(1)).unwrap();
        assert_eq!(r6.rank_lower_bound, 1);
        assert!(r6.stabilized);
    }

    #[test]
    fn multi_theta_agrees_with_single_passes() {
        let d6 = LatticeSpec::by_name("D6").unwrap();
        let weights = vec![
            Weight::one(6),
            Weight::PowerSum(quartic_sym(6)),
            Weight::Dense(quartic_dense(6)),
        ];
        let batch = multi_theta(&d6, &weights, 6).unwrap();
        for (w, b) in weights.iter().zip(&batch) {
            let single = weighted_theta(&d6, w, 6).unwrap();
            for m in 0..=6 {
                assert_eq!(single.coefficient(m).unwrap(), b.coefficient(m).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_errors_propagate() {
        let leech = LatticeSpec::by_name("Leech").unwrap();
        assert!(matches!(
            weighted_theta(&leech, &Weight::one(24), 1),
            Err(Error::UnsupportedLattice(..))
        ));
        assert!(matches!(
            image_rank(&leech, 12, None, None, None),
            Err(Error::UnsupportedLattice(..))
        ));
        let d4 = LatticeSpec::by_name("D4").unwrap();
        assert!(matches!(
            weighted_theta(&d4, &Weight::one(3), 1),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn unimodular_theta_matches_the_weight_four_series() {
        let e8 = LatticeSpec::by_name("E8").unwrap();
        let reference = qseries::eisenstein(4, 1, 11).unwrap();
        let check =
            verify_eta_identity(&e8, &Weight::one(8), &reference, &BigRational::one(), 10)
                .unwrap();
        assert!(check.ok, "mismatch: {:?}", check.first_mismatch);
        let bad = verify_eta_identity(&e8, &Weight::one(8), &reference, &br(2), 10).unwrap();
        assert!(!bad.ok);
        assert_eq!(bad.first_mismatch.as_ref().unwrap().0, 0);
    }

    #[test]
    fn precision_shortfall_is_reported() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let theta = weighted_theta(&d4, &Weight::one(4), 3).unwrap();
        assert!(matches!(
            theta.coefficient(4),
            Err(Error::PrecisionShortfall { need: 4, have: 3 })
        ));
    }
}
