//! Shell strength certification: for each shell of a lattice, the even
//! degrees ℓ whose harmonic shell sums all vanish, with a replayable
//! witness for every excluded degree.
//!
//! A degree joins the member set only when every series in a certified
//! spanning set of weighted theta series has coefficient zero at the
//! shell.  The spanning set ("witnesses") is trimmed greedily from the
//! degree's candidate weights — the complete signed-permutation invariant
//! spanning set for coordinate lattices, sparse two-variable metric
//! harmonics plus random guards for Gram lattices — and its rank is
//! checked to be stable when the coefficient window doubles.  Degrees
//! whose rank has not stabilized are reported as inconclusive, never as
//! members.
//!
//! Scans over m-ranges run by direct shell enumeration (checkpointed
//! every [`CHECKPOINT_CHUNK`] values), or, for level ≤ 2 lattices, by
//! lifting every witness series into the generator ring once and reading
//! membership off the extended q-expansions.  A lift that fails falls
//! back to capped enumeration and says so.  Alongside the per-shell
//! machinery this module packages the global certificates: dual-route
//! agreement checks, newform congruences with their enumeration
//! re-derivation, the residue-class nonvanishing region, and the
//! convolution and two-dimensional closed-form scans.

use crate::error::Error;
use crate::harmonics::{self, Metric};
use crate::invariant;
use crate::lattices::{LatticeModel, LatticeSpec};
use crate::linalg;
use crate::modring::{self, LiftedForm};
use crate::qseries;
use crate::theta::{self, Weight};
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Random dense harmonics appended after the pair harmonics on Gram
/// lattices, guarding the rank against directions the sparse candidates
/// miss.  Skipped in dimension 2, where the pair kernel is already the
/// whole harmonic space.
const GUARD_SAMPLES: usize = 4;

/// m-values per enumeration chunk between checkpoint writes.
pub const CHECKPOINT_CHUNK: usize = 100;

/// Cap on the m-range when a failed lift forces a scan back onto direct
/// enumeration.
pub const ENUM_FALLBACK_CAP: usize = 300;

fn guard_seed(l: u32, i: usize) -> u64 {
    0xB1A5 + 1_000 * l as u64 + i as u64
}

/// How a scan decided membership for a degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Enumeration,
    Lifted,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Enumeration => "enumeration",
            Method::Lifted => "lifted",
        }
    }
}

/// Verdict for one even degree at one shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Member,
    Excluded,
    Inconclusive,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::Excluded => "excluded",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// The concrete weight and nonzero shell sum excluding a degree.
#[derive(Debug, Clone)]
pub struct WitnessRecord {
    /// Index into the degree's witness list.
    pub index: usize,
    pub weight: Weight,
    pub value: BigRational,
}

impl WitnessRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "weight": self.weight.to_json(),
            "value": self.value.to_string(),
        })
    }
}

/// One degree's outcome inside a [`StrengthReport`].
#[derive(Debug, Clone)]
pub struct DegreeFinding {
    pub degree: u32,
    pub verdict: Verdict,
    pub method: Method,
    pub rank: usize,
    pub stabilized: bool,
    pub witness: Option<WitnessRecord>,
}

impl DegreeFinding {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "verdict": self.verdict.as_str(),
            "method": self.method.as_str(),
            "rank": self.rank,
            "stabilized": self.stabilized,
            "witness": self.witness.as_ref().map(|w| w.to_json()),
        })
    }
}

/// Strength of a single shell: findings for every even degree up to the
/// bound.  Odd degrees are members on every antipodal shell and are left
/// implicit.
#[derive(Debug, Clone)]
pub struct StrengthReport {
    pub lattice: String,
    pub m: usize,
    pub l_max: u32,
    pub findings: Vec<DegreeFinding>,
}

impl StrengthReport {
    /// Even degrees whose harmonic sums all vanish at this shell.
    pub fn member_degrees(&self) -> Vec<u32> {
        self.findings
            .iter()
            .filter(|f| f.verdict == Verdict::Member)
            .map(|f| f.degree)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice,
            "m": self.m,
            "maxDegree": self.l_max,
            "memberDegrees": self.member_degrees(),
            "oddDegreesImplicitlyMembers": true,
            "findings": self.findings.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Certified witness data for one even degree, reusable across shells.
#[derive(Debug, Clone)]
pub struct EngineDegree {
    degree: u32,
    depth: usize,
    horizon: usize,
    rank: usize,
    stabilized: bool,
    witnesses: Vec<Weight>,
}

impl EngineDegree {
    fn build(lattice: &LatticeSpec, l: u32) -> Result<EngineDegree> {
        assert!(l >= 2 && l % 2 == 0, "strength degrees are even and at least 2");
        let depth = theta::default_coeff_depth(lattice, l);
        let horizon = (2 * depth).max(depth + modring::OVERDETERMINATION);
        let candidates = candidate_weights(lattice, l);
        if candidates.is_empty() {
            return Ok(EngineDegree {
                degree: l,
                depth,
                horizon,
                rank: 0,
                stabilized: true,
                witnesses: Vec::new(),
            });
        }
        let (_, block) = theta::numerator_block(lattice, &candidates, 1, horizon)?;
        let rows: Vec<Vec<BigInt>> = (0..candidates.len())
            .map(|c| block.iter().map(|row| row[c].clone()).collect())
            .collect();
        let rank_full = linalg::rank_int(&rows);
        let rank_half = rank_prefix(&rows, depth);
        let mut witnesses = Vec::new();
        let mut basis: Vec<Vec<BigInt>> = Vec::new();
        for (c, row) in rows.iter().enumerate() {
            if basis.len() == rank_full {
                break;
            }
            basis.push(row.clone());
            if linalg::rank_int(&basis) == basis.len() {
                witnesses.push(candidates[c].clone());
            } else {
                basis.pop();
            }
        }
        assert_eq!(witnesses.len(), rank_full);
        Ok(EngineDegree {
            degree: l,
            depth,
            horizon,
            rank: rank_full,
            stabilized: rank_half == rank_full,
            witnesses,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficient window certifying the rank (doubles into `horizon`).
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// True when the rank did not grow as the window doubled.
    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    pub fn witnesses(&self) -> &[Weight] {
        &self.witnesses
    }
}

/// Witnesses for every even degree 2, 4, …, ≤ `l_max` of one lattice.
#[derive(Debug, Clone)]
pub struct StrengthEngine {
    lattice: LatticeSpec,
    l_max: u32,
    degrees: Vec<EngineDegree>,
}

impl StrengthEngine {
    pub fn new(lattice: &LatticeSpec, l_max: u32) -> Result<StrengthEngine> {
        if matches!(lattice.model(), LatticeModel::Opaque) {
            return Err(Error::UnsupportedLattice(
                lattice.name().to_string(),
                "strength certification needs shell enumeration".to_string(),
            ));
        }
        let degrees = (1..=l_max / 2)
            .map(|h| EngineDegree::build(lattice, 2 * h))
            .collect::<Result<_>>()?;
        Ok(StrengthEngine {
            lattice: lattice.clone(),
            l_max,
            degrees,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn degrees(&self) -> &[EngineDegree] {
        &self.degrees
    }
}

fn rank_prefix(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let cut: Vec<Vec<BigInt>> = rows.iter().map(|r| r[..cols].to_vec()).collect();
    linalg::rank_int(&cut)
}

fn candidate_weights(lattice: &LatticeSpec, l: u32) -> Vec<Weight> {
    match lattice.model() {
        LatticeModel::Gram(g) => {
            let metric = Metric::from_gram(g);
            let d = lattice.dim();
            let mut out = Vec::new();
            for a in 0..d {
                for b in a + 1..d {
                    out.extend(
                        harmonics::pair_harmonics(&metric, l, a, b)
                            .into_iter()
                            .map(Weight::Dense),
                    );
                }
            }
            if d > 2 {
                out.extend((0..GUARD_SAMPLES).map(|i| {
                    Weight::Dense(harmonics::random_harmonic_in(&metric, l, guard_seed(l, i)))
                }));
            }
            out
        }
        _ => {
            let with_alt = matches!(lattice.model(), LatticeModel::DoubledE8);
            invariant::harmonic_spanning_set(lattice.dim(), l, with_alt)
                .into_iter()
                .map(Weight::PowerSum)
                .collect()
        }
    }
}

/// Strength of the m-th shell for every even degree up to `l_max`.
///
/// Builds a fresh engine; use [`StrengthEngine`] + [`strength_at`] to
/// amortize witness construction over many shells.  Errors with
/// [`Error::EmptyShell`] when the shell has no points.
pub fn strength_upto(lattice: &LatticeSpec, m: usize, l_max: u32) -> Result<StrengthReport> {
    let engine = StrengthEngine::new(lattice, l_max)?;
    strength_at(&engine, m)
}

/// Strength of the m-th shell using prebuilt witnesses.
pub fn strength_at(engine: &StrengthEngine, m: usize) -> Result<StrengthReport> {
    assert!(m >= 1);
    let lattice = &engine.lattice;
    let mut weights: Vec<Weight> = Vec::new();
    for deg in &engine.degrees {
        weights.extend(deg.witnesses.iter().cloned());
    }
    weights.push(Weight::one(lattice.dim()));
    let values = theta::coefficients_at(lattice, &weights, m)?;
    if values.last().unwrap().is_zero() {
        return Err(Error::EmptyShell {
            lattice: lattice.name().to_string(),
            norm2: if lattice.is_even() { 2 * m as i64 } else { m as i64 },
        });
    }
    let mut findings = Vec::new();
    let mut off = 0;
    for deg in &engine.degrees {
        let vals = &values[off..off + deg.witnesses.len()];
        off += deg.witnesses.len();
        let (verdict, witness) = if !deg.stabilized {
            (Verdict::Inconclusive, None)
        } else {
            match vals.iter().position(|v| !v.is_zero()) {
                Some(i) => (
                    Verdict::Excluded,
                    Some(WitnessRecord {
                        index: i,
                        weight: deg.witnesses[i].clone(),
                        value: vals[i].clone(),
                    }),
                ),
                None => (Verdict::Member, None),
            }
        };
        findings.push(DegreeFinding {
            degree: deg.degree,
            verdict,
            method: Method::Enumeration,
            rank: deg.rank,
            stabilized: deg.stabilized,
            witness,
        });
    }
    Ok(StrengthReport {
        lattice: lattice.name().to_string(),
        m,
        l_max: engine.l_max,
        findings,
    })
}

/// Agreement record between two independent zero sets over 1..=m_max.
#[derive(Debug, Clone)]
pub struct DualRouteReport {
    pub criterion: String,
    pub m_max: usize,
    /// m where both routes vanish.
    pub zero_positions: Vec<usize>,
    /// m where exactly one route vanishes.
    pub violations: Vec<usize>,
}

impl DualRouteReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.criterion,
            "mMax": self.m_max,
            "zeroPositions": self.zero_positions,
            "violations": self.violations,
        })
    }
}

fn dual_route_check(
    criterion: &str,
    lattice: &LatticeSpec,
    l: u32,
    reference: &[BigInt],
    m_max: usize,
) -> Result<DualRouteReport> {
    let deg = EngineDegree::build(lattice, l)?;
    assert!(
        deg.stabilized && deg.rank >= 1,
        "degree {l} on {} must carry certified positive rank",
        lattice.name()
    );
    let (_, rows) = theta::numerator_block(lattice, &deg.witnesses, 1, m_max)?;
    let mut zero_positions = Vec::new();
    let mut violations = Vec::new();
    for m in 1..=m_max {
        let reference_zero = reference[m - 1].is_zero();
        let shell_zero = rows[m - 1].iter().all(|v| v.is_zero());
        if reference_zero && shell_zero {
            zero_positions.push(m);
        }
        if reference_zero != shell_zero {
            violations.push(m);
        }
    }
    Ok(DualRouteReport {
        criterion: criterion.to_string(),
        m_max,
        zero_positions,
        violations,
    })
}

/// Vanishing of the binary newform coefficients against vanishing of all
/// degree-6 harmonic sums on the quaternary shells, each side computed on
/// its own route: an eta-product q-expansion versus direct enumeration.
pub fn quaternary_sextic_check(m_max: usize) -> Result<DualRouteReport> {
    let lattice = LatticeSpec::by_name("D4")?;
    dual_route_check(
        "quaternary-sextic-dual-route",
        &lattice,
        6,
        &qseries::tau2(m_max),
        m_max,
    )
}

/// Vanishing of the weight-12 cusp coefficients against vanishing of all
/// degree-8 harmonic sums on the unimodular octonary shells.
pub fn octonary_octic_check(m_max: usize) -> Result<DualRouteReport> {
    let lattice = LatticeSpec::by_name("E8")?;
    dual_route_check(
        "octonary-octic-dual-route",
        &lattice,
        8,
        &qseries::tau(m_max),
        m_max,
    )
}

/// Congruence certificate for the binary newform at odd primes.
#[derive(Debug, Clone)]
pub struct CongruenceReport {
    pub p_max: usize,
    pub primes_checked: usize,
    /// Odd primes where τ₂(p) − p(p+1) missed a factor of 3 or 5.
    pub violations: Vec<usize>,
    /// Small primes where 896·τ₂(p) was re-derived by octonary shell
    /// enumeration under the invariant quartic weight.
    pub rederivation_primes: Vec<usize>,
    pub rederivation_ok: bool,
}

impl CongruenceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.rederivation_ok
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pMax": self.p_max,
            "primesChecked": self.primes_checked,
            "violations": self.violations,
            "rederivationPrimes": self.rederivation_primes,
            "rederivationOk": self.rederivation_ok,
        })
    }
}

fn sieve(up_to: usize) -> Vec<usize> {
    let mut composite = vec![false; up_to + 1];
    let mut primes = Vec::new();
    for p in 2..=up_to {
        if composite[p] {
            continue;
        }
        primes.push(p);
        let mut q = p * p;
        while q <= up_to {
            composite[q] = true;
            q += p;
        }
    }
    primes
}

/// Checks τ₂(p) ≡ p(p+1) mod 3 and mod 5 at every odd prime p ≤ p_max,
/// and re-derives 896·τ₂(p) at the odd primes ≤ 13 by enumerating the
/// octonary shells under the quartic weight 10s₂ − 3s₁².
pub fn congruence_certificate(p_max: usize) -> Result<CongruenceReport> {
    assert!(p_max >= 3);
    let t2 = qseries::tau2(p_max);
    let primes = sieve(p_max);
    let mut violations = Vec::new();
    let mut primes_checked = 0;
    for &p in &primes {
        if p == 2 {
            continue;
        }
        primes_checked += 1;
        let diff = &t2[p - 1] - BigInt::from(p as u64) * BigInt::from(p as u64 + 1);
        if !diff.is_multiple_of(&BigInt::from(3)) || !diff.is_multiple_of(&BigInt::from(5)) {
            violations.push(p);
        }
    }
    let lattice = LatticeSpec::by_name("D8")?;
    let quartic = invariant::SymPoly::term(8, &[0, 1], false, BigRational::from(BigInt::from(10)))
        .add(&invariant::SymPoly::term(
            8,
            &[2],
            false,
            BigRational::from(BigInt::from(-3)),
        ));
    let weight = Weight::PowerSum(quartic);
    let rederivation_primes: Vec<usize> =
        primes.iter().copied().filter(|&p| p % 2 == 1 && p <= 13).collect();
    let mut rederivation_ok = true;
    for &p in &rederivation_primes {
        let value = theta::coefficients_at(&lattice, &[weight.clone()], p)?[0].clone();
        rederivation_ok &= value == BigRational::from(BigInt::from(896) * &t2[p - 1]);
    }
    Ok(CongruenceReport {
        p_max,
        primes_checked,
        violations,
        rederivation_primes,
        rederivation_ok,
    })
}

/// Prime nonvanishing certificate split into its two buckets.
#[derive(Debug, Clone)]
pub struct NonvanishingReport {
    pub p_max: usize,
    /// Primes where the mod-15 congruence already forces τ₂(p) ≠ 0.
    pub certified: Vec<usize>,
    /// Primes outside the congruence region, verified directly.
    pub checked_directly: Vec<usize>,
    /// Primes with τ₂(p) = 0 (every prime is cross-checked).
    pub violations: Vec<usize>,
}

impl NonvanishingReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pMax": self.p_max,
            "certified": self.certified,
            "checkedDirectly": self.checked_directly,
            "violations": self.violations,
        })
    }
}

/// For an odd prime p ∉ {3, 5} the congruences τ₂(p) ≡ p(p+1) mod 3 and
/// mod 5 force τ₂(p) ≢ 0 mod 15 unless p ≡ 2 (mod 3) and p ≡ 4 (mod 5),
/// i.e. p ≡ 14 (mod 15).  Away from that residue class the value is
/// provably nonzero; the remaining primes (2, 3, 5, and p ≡ 14 mod 15)
/// are checked directly, and every prime's value is cross-checked.
pub fn prime_nonvanishing_region(p_max: usize) -> NonvanishingReport {
    assert!(p_max >= 2);
    let t2 = qseries::tau2(p_max);
    let mut certified = Vec::new();
    let mut checked_directly = Vec::new();
    let mut violations = Vec::new();
    for p in sieve(p_max) {
        if p % 2 == 1 && p != 3 && p != 5 && p % 15 != 14 {
            certified.push(p);
        } else {
            checked_directly.push(p);
        }
        if t2[p - 1].is_zero() {
            violations.push(p);
        }
    }
    NonvanishingReport {
        p_max,
        certified,
        checked_directly,
        violations,
    }
}

/// Zero positions of one scan criterion over an m-range.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub criterion: String,
    pub lo: usize,
    pub hi: usize,
    pub zero_positions: Vec<usize>,
}

impl ScanResult {
    pub fn ok(&self) -> bool {
        self.zero_positions.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.criterion,
            "range": [self.lo, self.hi],
            "zeroPositions": self.zero_positions,
        })
    }
}

/// Zero scan of τ₂ itself over 1..=m_max.
pub fn tau2_nonvanishing_scan(m_max: usize) -> ScanResult {
    let t2 = qseries::tau2(m_max);
    ScanResult {
        criterion: "tau2-nonvanishing".to_string(),
        lo: 1,
        hi: m_max,
        zero_positions: (1..=m_max).filter(|&m| t2[m - 1].is_zero()).collect(),
    }
}

/// Zero scans of the two self-convolutions Σ τ(n)τ(m−n) and
/// Σ τ₂(n)τ₂(m−n) over 2..=m_max, the nonvanishing criteria for the
/// degree-12 and degree-8 strengths of the two opaque lattices.
pub fn convolution_criteria(m_max: usize) -> Result<(ScanResult, ScanResult)> {
    assert!(m_max >= 2);
    let zeros = |values: Vec<(usize, BigInt)>| -> Vec<usize> {
        values
            .into_iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(m, _)| m)
            .collect()
    };
    let tau = qseries::tau(m_max - 1);
    let leech = ScanResult {
        criterion: "leech-degree12-convolution".to_string(),
        lo: 2,
        hi: m_max,
        zero_positions: zeros(qseries::convolution_scan(&tau, &tau, m_max)?),
    };
    let tau2 = qseries::tau2(m_max - 1);
    let bw16 = ScanResult {
        criterion: "bw16-degree8-convolution".to_string(),
        lo: 2,
        hi: m_max,
        zero_positions: zeros(qseries::convolution_scan(&tau2, &tau2, m_max)?),
    };
    Ok((leech, bw16))
}

/// Scan columns shared by every degree of an engine: the union of the
/// witnesses' power-sum monomials plus one column per dense witness, with
/// the shell count last.  Per-degree formulas rebuild each witness value
/// as a rational combination of columns.
struct ScanPlan {
    weights: Vec<Weight>,
    count_col: usize,
    formulas: Vec<Vec<Vec<(usize, BigRational)>>>,
}

impl ScanPlan {
    fn build(lattice: &LatticeSpec, engine: &StrengthEngine) -> ScanPlan {
        let d = lattice.dim();
        let mut weights: Vec<Weight> = Vec::new();
        let mut monos: BTreeMap<(bool, Vec<u8>), usize> = BTreeMap::new();
        let mut formulas = Vec::new();
        for deg in &engine.degrees {
            let mut per_degree = Vec::new();
            for w in &deg.witnesses {
                let formula: Vec<(usize, BigRational)> = match w {
                    Weight::PowerSum(p) => p
                        .terms()
                        .map(|(alt, e, c)| {
                            let col = *monos.entry((alt, e.to_vec())).or_insert_with(|| {
                                weights.push(Weight::PowerSum(invariant::SymPoly::term(
                                    d,
                                    e,
                                    alt,
                                    BigRational::one(),
                                )));
                                weights.len() - 1
                            });
                            (col, c.clone())
                        })
                        .collect(),
                    Weight::Dense(_) => {
                        weights.push(w.clone());
                        vec![(weights.len() - 1, BigRational::one())]
                    }
                };
                per_degree.push(formula);
            }
            formulas.push(per_degree);
        }
        weights.push(Weight::one(d));
        let count_col = weights.len() - 1;
        ScanPlan {
            weights,
            count_col,
            formulas,
        }
    }

    fn row(&self, engine: &StrengthEngine, m: usize, nums: &[BigInt]) -> TableRow {
        if nums[self.count_col].is_zero() {
            return TableRow {
                m,
                empty: true,
                member_degrees: Vec::new(),
                inconclusive: Vec::new(),
            };
        }
        let mut member_degrees = Vec::new();
        let mut inconclusive = Vec::new();
        for (deg, formulas) in engine.degrees.iter().zip(&self.formulas) {
            if !deg.stabilized {
                inconclusive.push(deg.degree);
                continue;
            }
            if formulas.iter().all(|f| formula_is_zero(f, nums)) {
                member_degrees.push(deg.degree);
            }
        }
        TableRow {
            m,
            empty: false,
            member_degrees,
            inconclusive,
        }
    }
}

/// All monomial columns of one witness share a common denominator, so the
/// witness value vanishes exactly when this numerator combination does.
fn formula_is_zero(formula: &[(usize, BigRational)], nums: &[BigInt]) -> bool {
    let mut total = BigRational::zero();
    for (col, c) in formula {
        total += c * BigRational::from(nums[*col].clone());
    }
    total.is_zero()
}

/// One shell's row in a scanned strength table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub m: usize,
    pub empty: bool,
    pub member_degrees: Vec<u32>,
    /// Degrees whose rank never stabilized (constant across rows).
    pub inconclusive: Vec<u32>,
}

impl TableRow {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "empty": self.empty,
            "memberDegrees": self.member_degrees,
            "inconclusiveDegrees": self.inconclusive,
        })
    }
}

/// Per-degree provenance of a scanned strength table.
#[derive(Debug, Clone)]
pub struct MethodRecord {
    pub degree: u32,
    pub method: Method,
    pub rank: usize,
    pub stabilized: bool,
}

impl MethodRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "method": self.method.as_str(),
            "rank": self.rank,
            "stabilized": self.stabilized,
        })
    }
}

/// Strength of every shell m = 1..=m_max of one lattice.
#[derive(Debug, Clone)]
pub struct StrengthTable {
    pub lattice: String,
    pub m_max: usize,
    pub l_max: u32,
    pub methods: Vec<MethodRecord>,
    pub warnings: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl StrengthTable {
    /// The shared member set when every non-empty shell agrees.
    pub fn uniform_member_degrees(&self) -> Option<Vec<u32>> {
        let mut rows = self.rows.iter().filter(|r| !r.empty);
        let first = rows.next()?.member_degrees.clone();
        rows.all(|r| r.member_degrees == first).then_some(first)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice,
            "mMax": self.m_max,
            "maxDegree": self.l_max,
            "oddDegreesImplicitlyMembers": true,
            "methods": self.methods.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "warnings": self.warnings,
            "rows": self.rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Scans shells 1..=m_max, lifting witness series through the generator
/// ring on level ≤ 2 lattices and enumerating otherwise.  A failed lift
/// falls back to enumeration capped at [`ENUM_FALLBACK_CAP`], recorded in
/// `warnings`.  Enumeration checkpoints numerator rows into
/// `checkpoint_dir` every [`CHECKPOINT_CHUNK`] shells and resumes from a
/// file whose fingerprint matches.
pub fn strength_scan(
    lattice: &LatticeSpec,
    m_max: usize,
    l_max: u32,
    checkpoint_dir: Option<&Path>,
) -> Result<StrengthTable> {
    assert!(m_max >= 1);
    let engine = StrengthEngine::new(lattice, l_max)?;
    let mut warnings = Vec::new();
    let (method, scan_max, rows) = if lattice.level() <= 2 {
        match lifted_rows(lattice, &engine, m_max) {
            Ok(rows) => (Method::Lifted, m_max, rows),
            Err(e @ Error::LiftFailed { .. }) => {
                let capped = m_max.min(ENUM_FALLBACK_CAP);
                warnings.push(format!(
                    "{e}; falling back to shell enumeration capped at m = {capped}"
                ));
                (
                    Method::Enumeration,
                    capped,
                    enumerated_rows(lattice, &engine, capped, checkpoint_dir)?,
                )
            }
            Err(e) => return Err(e),
        }
    } else {
        (
            Method::Enumeration,
            m_max,
            enumerated_rows(lattice, &engine, m_max, checkpoint_dir)?,
        )
    };
    let methods = engine
        .degrees
        .iter()
        .map(|d| MethodRecord {
            degree: d.degree,
            method,
            rank: d.rank,
            stabilized: d.stabilized,
        })
        .collect();
    Ok(StrengthTable {
        lattice: lattice.name().to_string(),
        m_max: scan_max,
        l_max,
        methods,
        warnings,
        rows,
    })
}

fn lifted_rows(
    lattice: &LatticeSpec,
    engine: &StrengthEngine,
    m_max: usize,
) -> Result<Vec<TableRow>> {
    let level = lattice.level();
    let target = m_max + 1;
    let depth0 = theta::default_coeff_depth(lattice, 0);
    let horizon0 = (2 * depth0).max(depth0 + modring::OVERDETERMINATION);
    let count_series = theta::weighted_theta(lattice, &Weight::one(lattice.dim()), horizon0)?;
    let count = modring::fit_and_extend(&count_series, level, target)?;
    let mut lifted: Vec<Vec<LiftedForm>> = Vec::new();
    for deg in &engine.degrees {
        if !deg.stabilized || deg.witnesses.is_empty() {
            lifted.push(Vec::new());
            continue;
        }
        let series = theta::multi_theta(lattice, &deg.witnesses, deg.horizon)?;
        lifted.push(
            series
                .iter()
                .map(|s| modring::fit_and_extend(s, level, target))
                .collect::<Result<_>>()?,
        );
    }
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        if count.coefficient_is_zero(m)? {
            rows.push(TableRow {
                m,
                empty: true,
                member_degrees: Vec::new(),
                inconclusive: Vec::new(),
            });
            continue;
        }
        let mut member_degrees = Vec::new();
        let mut inconclusive = Vec::new();
        for (deg, forms) in engine.degrees.iter().zip(&lifted) {
            if !deg.stabilized {
                inconclusive.push(deg.degree);
                continue;
            }
            let mut member = true;
            for f in forms {
                if !f.coefficient_is_zero(m)? {
                    member = false;
                    break;
                }
            }
            if member {
                member_degrees.push(deg.degree);
            }
        }
        rows.push(TableRow {
            m,
            empty: false,
            member_degrees,
            inconclusive,
        });
    }
    Ok(rows)
}

fn enumerated_rows(
    lattice: &LatticeSpec,
    engine: &StrengthEngine,
    m_max: usize,
    checkpoint_dir: Option<&Path>,
) -> Result<Vec<TableRow>> {
    let plan = ScanPlan::build(lattice, engine);
    let fingerprint = json!({
        "lattice": lattice.name(),
        "maxDegree": engine.l_max,
        "weights": plan.weights.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
    })
    .to_string();
    let path: Option<PathBuf> = checkpoint_dir.map(|dir| {
        dir.join(format!(
            "strength-scan-{}-L{}.json",
            lattice.name(),
            engine.l_max
        ))
    });
    let mut nums: Vec<Vec<BigInt>> = path
        .as_ref()
        .and_then(|p| load_checkpoint(p, &fingerprint, plan.weights.len()))
        .unwrap_or_default();
    nums.truncate(m_max);
    while nums.len() < m_max {
        let lo = nums.len() + 1;
        let hi = (lo + CHECKPOINT_CHUNK - 1).min(m_max);
        let (_, block) = theta::numerator_block(lattice, &plan.weights, lo, hi)?;
        nums.extend(block);
        if let Some(p) = &path {
            save_checkpoint(p, &fingerprint, &nums)?;
        }
    }
    Ok((1..=m_max).map(|m| plan.row(engine, m, &nums[m - 1])).collect())
}

fn save_checkpoint(path: &Path, fingerprint: &str, rows: &[Vec<BigInt>]) -> Result<()> {
    let doc = json!({
        "fingerprint": fingerprint,
        "rows": rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string(&doc)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn load_checkpoint(path: &Path, fingerprint: &str, width: usize) -> Option<Vec<Vec<BigInt>>> {
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    if doc["fingerprint"].as_str()? != fingerprint {
        return None;
    }
    let mut out = Vec::new();
    for row in doc["rows"].as_array()? {
        let row = row.as_array()?;
        if row.len() != width {
            return None;
        }
        out.push(
            row.iter()
                .map(|v| v.as_str()?.parse::<BigInt>().ok())
                .collect::<Option<Vec<_>>>()?,
        );
    }
    Some(out)
}

/// Closed-form check report for the two-dimensional lattices.
#[derive(Debug, Clone)]
pub struct TwoDimReport {
    pub lattice: String,
    pub m_max: usize,
    pub l_max: u32,
    pub shells_checked: usize,
    pub empty_shells: Vec<usize>,
    /// Non-empty m whose computed member set differs from the closed form.
    pub mismatches: Vec<usize>,
    pub inconclusive_degrees: Vec<u32>,
}

impl TwoDimReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.inconclusive_degrees.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice,
            "mMax": self.m_max,
            "maxDegree": self.l_max,
            "shellsChecked": self.shells_checked,
            "emptyShells": self.empty_shells,
            "mismatches": self.mismatches,
            "inconclusiveDegrees": self.inconclusive_degrees,
        })
    }
}

/// Verifies the closed-form strengths of the two-dimensional lattices on
/// every non-empty shell: degree 2ℓ is a member exactly when ℓ is odd for
/// the square lattice, and exactly when ℓ ≢ 0 (mod 3) for the hexagonal
/// one.
pub fn two_dim_strength_check(
    lattice: &LatticeSpec,
    m_max: usize,
    l_max: u32,
) -> Result<TwoDimReport> {
    let predicted: fn(u32) -> bool = match lattice.name() {
        "Z2" => |j| (j / 2) % 2 == 1,
        "A2" => |j| (j / 2) % 3 != 0,
        other => {
            return Err(Error::UnsupportedLattice(
                other.to_string(),
                "no closed-form strength registered".to_string(),
            ))
        }
    };
    let engine = StrengthEngine::new(lattice, l_max)?;
    let rows = enumerated_rows(lattice, &engine, m_max, None)?;
    let inconclusive_degrees: Vec<u32> = engine
        .degrees
        .iter()
        .filter(|d| !d.stabilized)
        .map(|d| d.degree)
        .collect();
    let mut shells_checked = 0;
    let mut empty_shells = Vec::new();
    let mut mismatches = Vec::new();
    for row in &rows {
        if row.empty {
            empty_shells.push(row.m);
            continue;
        }
        shells_checked += 1;
        for deg in engine.degrees.iter().filter(|d| d.stabilized) {
            if row.member_degrees.contains(&deg.degree) != predicted(deg.degree) {
                mismatches.push(row.m);
                break;
            }
        }
    }
    Ok(TwoDimReport {
        lattice: lattice.name().to_string(),
        m_max,
        l_max,
        shells_checked,
        empty_shells,
        mismatches,
        inconclusive_degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(lattice: &str, l_max: u32) -> Vec<usize> {
        let engine = StrengthEngine::new(&LatticeSpec::by_name(lattice).unwrap(), l_max).unwrap();
        assert!(engine.degrees().iter().all(|d| d.stabilized()));
        engine.degrees().iter().map(|d| d.rank()).collect()
    }

    #[test]
    fn engine_ranks_match_known_rows() {
        assert_eq!(ranks("D4", 12), vec![0, 0, 1, 1, 0, 2]);
        assert_eq!(ranks("Z2", 12), vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn gram_engine_prefers_sparse_witnesses() {
        let e6 = LatticeSpec::by_name("E6").unwrap();
        let deg = EngineDegree::build(&e6, 6).unwrap();
        assert_eq!(deg.rank(), 1);
        assert!(deg.stabilized());
        match &deg.witnesses()[0] {
            Weight::Dense(p) => assert!(p.terms().count() <= 7),
            Weight::PowerSum(_) => panic!("Gram lattices sample dense harmonics"),
        }
    }

    #[test]
    fn quaternary_shell_strength_with_replayable_witnesses() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let report = strength_upto(&d4, 1, 22).unwrap();
        assert_eq!(report.member_degrees(), vec![2, 4, 10]);
        for f in &report.findings {
            match f.verdict {
                Verdict::Member => assert!(f.witness.is_none()),
                Verdict::Excluded => {
                    let w = f.witness.as_ref().unwrap();
                    let replay =
                        theta::coefficients_at(&d4, std::slice::from_ref(&w.weight), 1).unwrap();
                    assert_eq!(replay[0], w.value);
                    assert!(!w.value.is_zero());
                }
                Verdict::Inconclusive => panic!("all quaternary degrees stabilize"),
            }
        }
        let json = report.to_json();
        assert_eq!(json["oddDegreesImplicitlyMembers"], json!(true));
        assert_eq!(json["memberDegrees"], json!([2, 4, 10]));
    }

    #[test]
    fn unimodular_shell_strength() {
        let e8 = LatticeSpec::by_name("E8").unwrap();
        let report = strength_upto(&e8, 1, 10).unwrap();
        assert_eq!(report.member_degrees(), vec![2, 4, 6, 10]);
    }

    #[test]
    fn square_lattice_strength_and_empty_shell() {
        let z2 = LatticeSpec::by_name("Z2").unwrap();
        let report = strength_upto(&z2, 1, 8).unwrap();
        assert_eq!(report.member_degrees(), vec![2, 6]);
        match strength_upto(&z2, 3, 8) {
            Err(Error::EmptyShell { lattice, norm2 }) => {
                assert_eq!(lattice, "Z2");
                assert_eq!(norm2, 3);
            }
            other => panic!("expected an empty shell, got {other:?}"),
        }
    }

    #[test]
    fn quaternary_dual_routes_agree_and_never_vanish() {
        let report = quaternary_sextic_check(40).unwrap();
        assert!(report.ok());
        assert!(report.zero_positions.is_empty());
        assert_eq!(report.criterion, "quaternary-sextic-dual-route");
    }

    #[test]
    fn octonary_dual_routes_agree_and_never_vanish() {
        let report = octonary_octic_check(12).unwrap();
        assert!(report.ok());
        assert!(report.zero_positions.is_empty());
    }

    #[test]
    fn congruences_hold_and_rederive() {
        let report = congruence_certificate(100).unwrap();
        assert!(report.ok());
        assert!(report.violations.is_empty());
        assert_eq!(report.rederivation_primes, vec![3, 5, 7, 11, 13]);
        assert!(report.rederivation_ok);
        assert_eq!(report.primes_checked, 24);
    }

    #[test]
    fn nonvanishing_region_buckets() {
        let report = prime_nonvanishing_region(60);
        assert!(report.ok());
        assert!(report.certified.contains(&7));
        assert_eq!(report.checked_directly, vec![2, 3, 5, 29, 59]);
        assert_eq!(report.certified.len() + report.checked_directly.len(), 17);
    }

    #[test]
    fn convolution_scans_are_zero_free() {
        let (leech, bw16) = convolution_criteria(60).unwrap();
        assert!(leech.ok() && bw16.ok());
        assert_eq!(leech.criterion, "leech-degree12-convolution");
        assert_eq!(bw16.criterion, "bw16-degree8-convolution");
        assert_eq!((leech.lo, leech.hi), (2, 60));
    }

    #[test]
    fn tau2_scan_is_zero_free() {
        let scan = tau2_nonvanishing_scan(500);
        assert!(scan.ok());
        assert_eq!(scan.criterion, "tau2-nonvanishing");
    }

    #[test]
    fn lifted_table_matches_enumerated_reports() {
        let d4 = LatticeSpec::by_name("D4").unwrap();
        let table = strength_scan(&d4, 40, 10, None).unwrap();
        assert!(table.warnings.is_empty());
        assert!(table.methods.iter().all(|r| r.method == Method::Lifted));
        assert_eq!(table.uniform_member_degrees(), Some(vec![2, 4, 10]));
        let engine = StrengthEngine::new(&d4, 10).unwrap();
        for m in [1, 2, 3, 7, 25, 37, 40] {
            let report = strength_at(&engine, m).unwrap();
            assert_eq!(
                report.member_degrees(),
                table.rows[m - 1].member_degrees,
                "lifted and enumerated member sets must agree at m = {m}"
            );
        }
    }

    #[test]
    fn two_dimensional_closed_forms_hold() {
        let z2 = LatticeSpec::by_name("Z2").unwrap();
        let zr = two_dim_strength_check(&z2, 40, 12).unwrap();
        assert!(zr.ok());
        assert_eq!(zr.empty_shells[..3], [3, 6, 7]);
        let a2 = LatticeSpec::by_name("A2").unwrap();
        let ar = two_dim_strength_check(&a2, 30, 12).unwrap();
        assert!(ar.ok());
        assert!(ar.empty_shells.contains(&5));
        assert!(!ar.empty_shells.contains(&7));
        let d4 = LatticeSpec::by_name("D4").unwrap();
        assert!(matches!(
            two_dim_strength_check(&d4, 5, 4),
            Err(Error::UnsupportedLattice(_, _))
        ));
    }

    #[test]
    fn checkpoints_resume_and_invalidate() {
        let dir = tempfile::tempdir().unwrap();
        let z2 = LatticeSpec::by_name("Z2").unwrap();
        let fresh = strength_scan(&z2, 150, 8, Some(dir.path())).unwrap();
        assert!(!fresh.rows[4].empty, "the norm-5 shell has eight points");
        let path = dir.path().join("strength-scan-Z2-L8.json");
        let mut doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let width = doc["rows"][4].as_array().unwrap().len();
        doc["rows"][4][width - 1] = json!("0");
        fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let resumed = strength_scan(&z2, 150, 8, Some(dir.path())).unwrap();
        assert!(
            resumed.rows[4].empty,
            "a matching fingerprint must trust checkpointed rows"
        );
        doc["fingerprint"] = json!("stale");
        fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let recomputed = strength_scan(&z2, 150, 8, Some(dir.path())).unwrap();
        assert!(
            !recomputed.rows[4].empty,
            "a stale fingerprint must force recomputation"
        );
        assert_eq!(fresh.rows, recomputed.rows);
    }

    #[test]
    fn table_serialization_is_self_contained() {
        let z2 = LatticeSpec::by_name("Z2").unwrap();
        let table = strength_scan(&z2, 10, 6, None).unwrap();
        let json = table.to_json();
        assert_eq!(json["lattice"], json!("Z2"));
        assert_eq!(json["oddDegreesImplicitlyMembers"], json!(true));
        assert_eq!(json["rows"][0]["memberDegrees"], json!([2, 6]));
        assert_eq!(json["rows"][2]["empty"], json!(true));
        assert_eq!(
            json["methods"][0]["method"],
            json!("enumeration"),
            "the square lattice sits above level 2, so scans enumerate"
        );
    }
}
