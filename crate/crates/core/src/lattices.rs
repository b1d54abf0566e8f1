//! Lattice registry and exact shell enumeration.
//!
//! Each registered lattice is either a coordinate model (ℤⁿ, Dₙ as the
//! even-coordinate-sum sublattice, E₈ in doubled coordinates) or a Gram
//! model (A₂ and E₆ through their Cartan matrices).  Shells — the vectors
//! of one fixed squared norm — are produced by bounded recursive search in
//! the coordinate case and by Fincke–Pohst enumeration in the Gram case,
//! both exact and both in a deterministic lexicographic order.
//!
//! Enumeration is exposed in two forms: [`enumerate_shell`] materializes a
//! [`Shell`], while [`for_each_point`] streams points through a callback so
//! counting and theta accumulation never hold a large shell in memory.

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// How membership is decided for points in scaled integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeModel {
    /// All of ℤⁿ.
    Integer,
    /// Dₙ: integer vectors with even coordinate sum.
    EvenSum,
    /// E₈ in doubled coordinates: all coordinates share a parity and the
    /// coordinate sum is ≡ 0 mod 4 (equivalently x/2 ∈ D₈ ∪ (D₈ + ½·𝟙)).
    DoubledE8,
    /// Positive-definite integer Gram matrix; points are basis coefficients.
    Gram(Vec<Vec<i64>>),
    /// Registered for coefficient-level work only; no enumeration.
    Opaque,
}

/// A registered lattice: its model plus the constants the rest of the crate
/// needs (dimension, coordinate scaling, level, parity of the form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    name: String,
    dim: usize,
    model: LatticeModel,
    scale_denom: i64,
    level: u32,
    even: bool,
}

impl LatticeSpec {
    /// Look up a lattice by its registered name: `Z<n>`, `D<n>`, `A2`,
    /// `E6`, `E8`, `Leech`, `BW16`.
    pub fn by_name(name: &str) -> Result<LatticeSpec> {
        if let Some(n) = name.strip_prefix('Z').and_then(|s| s.parse::<usize>().ok()) {
            if n >= 1 {
                return Ok(LatticeSpec::zn(n));
            }
        }
        if let Some(n) = name.strip_prefix('D').and_then(|s| s.parse::<usize>().ok()) {
            if n >= 3 {
                return Ok(LatticeSpec::dn(n));
            }
        }
        match name {
            "A2" => Ok(LatticeSpec::a2()),
            "E6" => Ok(LatticeSpec::e6()),
            "E8" => Ok(LatticeSpec::e8()),
            "Leech" => Ok(LatticeSpec {
                name: "Leech".into(),
                dim: 24,
                model: LatticeModel::Opaque,
                scale_denom: 1,
                level: 1,
                even: true,
            }),
            "BW16" => Ok(LatticeSpec {
                name: "BW16".into(),
                dim: 16,
                model: LatticeModel::Opaque,
                scale_denom: 1,
                level: 2,
                even: true,
            }),
            other => Err(Error::UnsupportedLattice(
                other.into(),
                "not a registered lattice name".into(),
            )),
        }
    }

    /// ℤⁿ with its squared-norm shells (not an even lattice).
    pub fn zn(n: usize) -> LatticeSpec {
        LatticeSpec {
            name: format!("Z{n}"),
            dim: n,
            model: LatticeModel::Integer,
            scale_denom: 1,
            level: 4,
            even: false,
        }
    }

    /// Dₙ = {x ∈ ℤⁿ : x₁+⋯+xₙ even}.
    pub fn dn(n: usize) -> LatticeSpec {
        LatticeSpec {
            name: format!("D{n}"),
            dim: n,
            model: LatticeModel::EvenSum,
            scale_denom: 1,
            level: if n % 4 == 0 { 2 } else { 4 },
            even: true,
        }
    }

    /// E₈ in doubled coordinates (scaleDenom 2, scaled norms 4·twoM).
    pub fn e8() -> LatticeSpec {
        LatticeSpec {
            name: "E8".into(),
            dim: 8,
            model: LatticeModel::DoubledE8,
            scale_denom: 2,
            level: 1,
            even: true,
        }
    }

    /// E₆ as the root lattice of its Cartan matrix.
    pub fn e6() -> LatticeSpec {
        let g = vec![
            vec![2, -1, 0, 0, 0, 0],
            vec![-1, 2, -1, 0, 0, 0],
            vec![0, -1, 2, -1, 0, -1],
            vec![0, 0, -1, 2, -1, 0],
            vec![0, 0, 0, -1, 2, 0],
            vec![0, 0, -1, 0, 0, 2],
        ];
        LatticeSpec {
            name: "E6".into(),
            dim: 6,
            model: LatticeModel::Gram(g),
            scale_denom: 1,
            level: 3,
            even: true,
        }
    }

    /// A₂ (hexagonal) via its Cartan matrix.
    pub fn a2() -> LatticeSpec {
        LatticeSpec {
            name: "A2".into(),
            dim: 2,
            model: LatticeModel::Gram(vec![vec![2, -1], vec![-1, 2]]),
            scale_denom: 1,
            level: 3,
            even: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &LatticeModel {
        &self.model
    }

    /// s such that s·(lattice points) have the integer coordinates used here.
    pub fn scale_denom(&self) -> i64 {
        self.scale_denom
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Gram matrix for Gram-model lattices.
    pub fn gram(&self) -> Option<&[Vec<i64>]> {
        match &self.model {
            LatticeModel::Gram(g) => Some(g),
            _ => None,
        }
    }

    /// Inner product of two points in scaled coordinates: the dot product
    /// for coordinate models, aᵀGb for Gram models.
    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        match &self.model {
            LatticeModel::Gram(g) => {
                let mut acc = 0i64;
                for (i, ai) in a.iter().enumerate() {
                    if *ai == 0 {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate() {
                        acc += ai * g[i][j] * bj;
                    }
                }
                acc
            }
            _ => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }

    /// Scaled squared norm a point of the `twoM`-shell must have.
    pub fn norm2_scaled(&self, two_m: i64) -> i64 {
        self.scale_denom * self.scale_denom * two_m
    }
}

/// One lattice vector in scaled integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellPoint {
    pub coords: Vec<i64>,
    pub norm2_scaled: i64,
}

/// All lattice vectors of one squared norm, in deterministic order.
#[derive(Debug, Clone)]
pub struct Shell {
    pub lattice: LatticeSpec,
    pub two_m: i64,
    pub points: Vec<ShellPoint>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV export: metadata comment lines, a coordinate header, one point
    /// per row in scaled integer coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# lattice={} dim={} scaleDenom={} twoM={} points={}",
            self.lattice.name, self.lattice.dim, self.lattice.scale_denom, self.two_m,
            self.points.len()
        );
        if let Some(g) = self.lattice.gram() {
            let rows: Vec<String> = g
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                .collect();
            let _ = writeln!(out, "# gram={}", rows.join(";"));
        }
        let header: Vec<String> = (1..=self.lattice.dim).map(|i| format!("x{i}")).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for p in &self.points {
            let row: Vec<String> = p.coords.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// Inverse of [`Shell::to_csv`]; the lattice is rebuilt from the
    /// registry and every row's norm is re-validated.
    pub fn from_csv(text: &str) -> Result<Shell> {
        let mut lattice: Option<LatticeSpec> = None;
        let mut two_m: Option<i64> = None;
        let mut declared = 0usize;
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for field in meta.split_whitespace() {
                    if let Some((k, v)) = field.split_once('=') {
                        match k {
                            "lattice" => lattice = Some(LatticeSpec::by_name(v)?),
                            "twoM" => {
                                two_m = Some(v.parse().map_err(|_| {
                                    Error::Parse(format!("bad twoM value {v:?}"))
                                })?)
                            }
                            "points" => {
                                declared = v.parse().map_err(|_| {
                                    Error::Parse(format!("bad points value {v:?}"))
                                })?
                            }
                            _ => {}
                        }
                    }
                }
                continue;
            }
            if line.starts_with('x') {
                continue;
            }
            let coords: std::result::Result<Vec<i64>, _> =
                line.split(',').map(|t| t.trim().parse::<i64>()).collect();
            let coords = coords.map_err(|_| Error::Parse(format!("bad point row {line:?}")))?;
            points.push(coords);
        }
        let lattice =
            lattice.ok_or_else(|| Error::Parse("shell CSV: missing lattice metadata".into()))?;
        let two_m = two_m.ok_or_else(|| Error::Parse("shell CSV: missing twoM".into()))?;
        let want = lattice.norm2_scaled(two_m);
        let mut shell_points = Vec::with_capacity(points.len());
        for coords in points {
            if coords.len() != lattice.dim {
                return Err(Error::Parse(format!(
                    "shell CSV: point has {} coordinates, lattice {} needs {}",
                    coords.len(),
                    lattice.name,
                    lattice.dim
                )));
            }
            let n = lattice.inner(&coords, &coords);
            if n != want {
                return Err(Error::Parse(format!(
                    "shell CSV: point {coords:?} has scaled norm {n}, expected {want}"
                )));
            }
            shell_points.push(ShellPoint {
                coords,
                norm2_scaled: n,
            });
        }
        if declared != 0 && declared != shell_points.len() {
            return Err(Error::Parse(format!(
                "shell CSV: header declares {declared} points, found {}",
                shell_points.len()
            )));
        }
        Ok(Shell {
            lattice,
            two_m,
            points: shell_points,
        })
    }
}

/// Stream every point of the `twoM`-shell through `f`, in no particular
/// order and without materializing the shell.
pub fn for_each_point(
    lattice: &LatticeSpec,
    two_m: i64,
    mut f: impl FnMut(&[i64]),
) -> Result<()> {
    assert!(two_m >= 1, "shells are indexed by positive squared norm");
    let target = lattice.norm2_scaled(two_m);
    match &lattice.model {
        LatticeModel::Integer => {
            let mut coords = vec![0i64; lattice.dim];
            search_coordinate(&mut coords, 0, target, Parity::Free, 0, &mut f);
        }
        LatticeModel::EvenSum => {
            let mut coords = vec![0i64; lattice.dim];
            search_coordinate(&mut coords, 0, target, Parity::EvenTotal, 0, &mut f);
        }
        LatticeModel::DoubledE8 => {
            let mut coords = vec![0i64; lattice.dim];
            search_coordinate(&mut coords, 0, target, Parity::SharedMod4, 0, &mut f);
        }
        LatticeModel::Gram(g) => {
            let plan = FinckePohst::new(g);
            plan.search(target, &mut f);
        }
        LatticeModel::Opaque => {
            return Err(Error::UnsupportedLattice(
                lattice.name.clone(),
                "enumeration is not supported at this scale".into(),
            ))
        }
    }
    Ok(())
}

/// Number of points in the shell, by streaming enumeration.
pub fn count_shell(lattice: &LatticeSpec, two_m: i64) -> Result<u64> {
    let mut n = 0u64;
    for_each_point(lattice, two_m, |_| n += 1)?;
    Ok(n)
}

/// Materialize the full shell, sorted lexicographically by coordinates.
/// An empty shell is a valid result; an unenumerable lattice is an error.
pub fn enumerate_shell(lattice: &LatticeSpec, two_m: i64) -> Result<Shell> {
    let mut points = Vec::new();
    let norm = lattice.norm2_scaled(two_m);
    for_each_point(lattice, two_m, |coords| {
        points.push(ShellPoint {
            coords: coords.to_vec(),
            norm2_scaled: norm,
        })
    })?;
    points.sort_unstable_by(|a, b| a.coords.cmp(&b.coords));
    debug_assert!(points.windows(2).all(|w| w[0].coords < w[1].coords));
    Ok(Shell {
        lattice: lattice.clone(),
        two_m,
        points,
    })
}

/// Closed-form shell cardinalities: `D4` (odd-divisor sum), `D8`
/// (alternating cube sum), `E8` (240·σ₃).  Other lattices are counted only
/// by enumeration.
pub fn shell_count_formula(lattice: &str, m: u64) -> Result<BigInt> {
    assert!(m >= 1);
    match lattice {
        "D4" => {
            let mut acc = BigInt::zero();
            for d in divisors(2 * m) {
                if d % 2 == 1 {
                    acc += BigInt::from(d);
                }
            }
            Ok(acc * 24)
        }
        "D8" => {
            let mut acc = BigInt::zero();
            for d in divisors(2 * m) {
                let cube = BigInt::from(d).pow(3);
                if d % 2 == 0 {
                    acc += cube;
                } else {
                    acc -= cube;
                }
            }
            Ok(acc * 16)
        }
        "E8" => {
            let mut acc = BigInt::zero();
            for d in divisors(m) {
                acc += BigInt::from(d).pow(3);
            }
            Ok(acc * 240)
        }
        other => Err(Error::UnsupportedLattice(
            other.into(),
            "no closed-form shell count".into(),
        )),
    }
}

/// A(X): the set of inner products ⟨x,y⟩/twoM over distinct shell points,
/// as exact rationals.
pub fn normalized_inner_products(shell: &Shell) -> Result<BTreeSet<BigRational>> {
    if shell.points.is_empty() {
        return Err(Error::EmptyShell {
            lattice: shell.lattice.name.clone(),
            norm2: shell.two_m,
        });
    }
    let denom = BigInt::from(shell.lattice.norm2_scaled(shell.two_m));
    let mut set = BTreeSet::new();
    for (i, p) in shell.points.iter().enumerate() {
        for (j, q) in shell.points.iter().enumerate() {
            if i == j {
                continue;
            }
            let ip = shell.lattice.inner(&p.coords, &q.coords);
            set.insert(BigRational::new(BigInt::from(ip), denom.clone()));
        }
    }
    Ok(set)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[derive(Clone, Copy, PartialEq)]
enum Parity {
    /// No constraint (ℤⁿ).
    Free,
    /// Coordinate sum must end up even (Dₙ).
    EvenTotal,
    /// All coordinates share a parity and the sum is ≡ 0 mod 4 (doubled E₈).
    SharedMod4,
}

/// Depth-first bounded search over scaled integer coordinates, ascending at
/// every level, so emission order is lexicographic.
fn search_coordinate(
    coords: &mut Vec<i64>,
    depth: usize,
    budget: i64,
    parity: Parity,
    sum: i64,
    f: &mut impl FnMut(&[i64]),
) {
    let dim = coords.len();
    let shared = match parity {
        Parity::SharedMod4 if depth > 0 => Some(coords[0] & 1),
        _ => None,
    };
    if depth == dim - 1 {
        let v = budget.sqrt();
        if v * v != budget {
            return;
        }
        let candidates: &[i64] = if v == 0 { &[0] } else { &[-v, v] };
        for &w in candidates {
            if let Parity::SharedMod4 = parity {
                if let Some(p) = shared {
                    if w & 1 != p {
                        continue;
                    }
                }
                if (sum + w).rem_euclid(4) != 0 {
                    continue;
                }
            }
            if let Parity::EvenTotal = parity {
                if (sum + w) & 1 != 0 {
                    continue;
                }
            }
            coords[depth] = w;
            f(coords);
        }
        coords[depth] = 0;
        return;
    }
    let bound = budget.sqrt();
    let (lo, step) = match (parity, shared) {
        (Parity::SharedMod4, Some(p)) => {
            let mut lo = -bound;
            if (lo & 1) != p {
                lo += 1;
            }
            (lo, 2)
        }
        _ => (-bound, 1),
    };
    let mut w = lo;
    while w <= bound {
        let rest = budget - w * w;
        // In the odd-parity coset every remaining coordinate contributes ≥ 1.
        let feasible = match (parity, shared.or(Some(w & 1))) {
            (Parity::SharedMod4, Some(1)) => rest >= (dim - depth - 1) as i64,
            _ => rest >= 0,
        };
        if feasible {
            coords[depth] = w;
            search_coordinate(coords, depth + 1, rest, parity, sum + w, f);
        }
        w += step;
    }
    coords[depth] = 0;
}

/// Fincke–Pohst data for an integer Gram matrix, with all per-node
/// arithmetic reduced to integers.
///
/// From the rational LDLᵀ decomposition Q(x) = Σ dᵢ(xᵢ + Σ_{j>i} μᵢⱼxⱼ)²,
/// each term is rewritten as wᵢ·uᵢ² with uᵢ = denᵢ·xᵢ + Σ mᵢⱼxⱼ integer and
/// W·Q(x) = Σ wᵢuᵢ², so the search compares integers only.
struct FinckePohst {
    dim: usize,
    den: Vec<i64>,
    m: Vec<Vec<i64>>,
    w: Vec<i64>,
    total: i64,
}

impl FinckePohst {
    fn new(gram: &[Vec<i64>]) -> FinckePohst {
        let n = gram.len();
        let a: Vec<Vec<BigRational>> = gram
            .iter()
            .map(|row| row.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
            .collect();
        let mut d = vec![BigRational::zero(); n];
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut di = a[i][i].clone();
            for k in 0..i {
                di -= &mu[k][i] * &mu[k][i] * &d[k];
            }
            assert!(di.is_positive(), "Gram matrix must be positive definite");
            for j in (i + 1)..n {
                let mut x = a[i][j].clone();
                for k in 0..i {
                    x -= &mu[k][i] * &mu[k][j] * &d[k];
                }
                mu[i][j] = x / &di;
            }
            d[i] = di;
        }
        let mut den = vec![1i64; n];
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            let mut l = BigInt::one();
            for j in (i + 1)..n {
                l = l.lcm(mu[i][j].denom());
            }
            let li: i64 = (&l).try_into().expect("row denominator fits i64");
            den[i] = li;
            for j in (i + 1)..n {
                let scaled = &mu[i][j] * BigRational::from(l.clone());
                assert!(scaled.is_integer());
                m[i][j] = (&scaled.to_integer()).try_into().expect("fits i64");
            }
        }
        // W = lcm over i of denom(dᵢ/denᵢ²); wᵢ = W·dᵢ/denᵢ².
        let mut big_w = BigInt::one();
        let scaled_d: Vec<BigRational> = (0..n)
            .map(|i| &d[i] / BigRational::from(BigInt::from(den[i] * den[i])))
            .collect();
        for sd in &scaled_d {
            big_w = big_w.lcm(sd.denom());
        }
        let w: Vec<i64> = scaled_d
            .iter()
            .map(|sd| {
                let x = sd * BigRational::from(big_w.clone());
                assert!(x.is_integer());
                (&x.to_integer()).try_into().expect("fits i64")
            })
            .collect();
        FinckePohst {
            dim: n,
            den,
            m,
            w,
            total: (&big_w).try_into().expect("fits i64"),
        }
    }

    fn search(&self, norm: i64, f: &mut impl FnMut(&[i64])) {
        let mut coords = vec![0i64; self.dim];
        self.descend(self.dim - 1, self.total * norm, &mut coords, f);
    }

    /// Assign coordinate `i` (levels run from the last coordinate down),
    /// keeping Σ_{k≥i} w_k u_k² within `budget`; at the bottom the budget
    /// must be consumed exactly.
    fn descend(&self, i: usize, budget: i64, coords: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        let t: i64 = ((i + 1)..self.dim).map(|j| self.m[i][j] * coords[j]).sum();
        let den = self.den[i];
        if i == 0 {
            // w₀·u₀² == budget exactly.
            if budget % self.w[0] != 0 {
                return;
            }
            let usq = budget / self.w[0];
            let v = usq.sqrt();
            if v * v != usq {
                return;
            }
            let candidates: &[i64] = if v == 0 { &[0] } else { &[-v, v] };
            for &u in candidates {
                let num = u - t;
                if num.rem_euclid(den) == 0 {
                    coords[0] = num / den;
                    f(coords);
                }
            }
            coords[0] = 0;
            return;
        }
        let s = (budget / self.w[i]).sqrt();
        // den·x + t ∈ [−s, s]
        let lo = Integer::div_ceil(&(-s - t), &den);
        let hi = Integer::div_floor(&(s - t), &den);
        for x in lo..=hi {
            let u = den * x + t;
            let used = self.w[i] * u * u;
            if used <= budget {
                coords[i] = x;
                self.descend(i - 1, budget - used, coords, f);
            }
        }
        coords[i] = 0;
    }
}
