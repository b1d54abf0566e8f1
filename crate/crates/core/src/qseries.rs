//! Exact formal q-series arithmetic.
//!
//! A [`QSeries`] is a truncated expansion Σ cᵢ·q^{offset24/24 + i} with
//! arbitrary-precision integer coefficients.  The fractional leading
//! exponent is carried as a single integer in units of 1/24, which is the
//! grid every eta product in this crate lives on:
//!
//!   η(s·z) = q^{s/24} ∏_{n≥1} (1 − q^{s·n})
//!
//! Construction goes through sparse classical expansions — the pentagonal
//! number theorem for ∏(1−qⁿ) and Jacobi's identity for ∏(1−qⁿ)³ — plus a
//! coefficient recurrence for powers, so `tau2(10⁶)` is minutes, not hours.
//! Products are schoolbook Cauchy convolutions; there is no floating point
//! and no FFT anywhere.

use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Truncated formal series in q^{1/24} with exact integer coefficients.
///
/// `coeffs[i]` is the coefficient of q^{offset24/24 + i}; everything below
/// the offset is an exact zero, everything at index ≥ `coeffs.len()` is
/// unknown (truncated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    offset24: i64,
    coeffs: Vec<BigInt>,
}

impl QSeries {
    /// Build a series from a leading exponent (in 1/24 units) and its
    /// coefficient vector.
    pub fn from_coeffs(offset24: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        QSeries { offset24, coeffs }
    }

    /// The constant series 1 with the given precision.
    pub fn one(precision: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); precision.max(1)];
        coeffs[0] = BigInt::one();
        QSeries { offset24: 0, coeffs }
    }

    pub fn offset24(&self) -> i64 {
        self.offset24
    }

    /// Number of stored (valid) coefficients.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of q^{e24/24}.  Exact zeros below the offset and off the
    /// 1/24 grid are returned as such; indices past the truncation order are
    /// a precision-shortfall error.
    pub fn coeff24(&self, e24: i64) -> Result<BigInt> {
        let rel = e24 - self.offset24;
        if rel < 0 {
            return Ok(BigInt::zero());
        }
        if rel % 24 != 0 {
            return Ok(BigInt::zero());
        }
        let idx = rel / 24;
        if idx >= self.coeffs.len() as i64 {
            return Err(Error::PrecisionShortfall {
                need: idx,
                have: self.coeffs.len() as i64 - 1,
            });
        }
        Ok(self.coeffs[idx as usize].clone())
    }

    /// Coefficient of q^m for integer m; requires the series to live on the
    /// integer exponent grid (offset24 divisible by 24).
    pub fn coeff_at(&self, m: i64) -> Result<BigInt> {
        if self.offset24 % 24 != 0 {
            return Err(Error::OffsetMismatch(self.offset24, 0));
        }
        self.coeff24(24 * m)
    }

    /// Strip leading stored zeros, moving the offset up; the truncation
    /// order (largest known exponent) is unchanged.
    pub fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 && lead < self.coeffs.len() {
            self.coeffs.drain(..lead);
            self.offset24 += 24 * lead as i64;
        }
        self
    }

    /// Copy truncated to a smaller precision.
    pub fn truncated(&self, precision: usize) -> Self {
        assert!(precision >= 1 && precision <= self.coeffs.len());
        QSeries {
            offset24: self.offset24,
            coeffs: self.coeffs[..precision].to_vec(),
        }
    }

    /// Substitute q ↦ q^s.  Interleaved coefficients are exact zeros, so the
    /// result stays valid up to index s·precision − 1.
    pub fn scale_arg(&self, s: u32) -> Self {
        assert!(s >= 1);
        let s = s as usize;
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() * s];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[i * s] = c.clone();
            }
        }
        coeffs.truncate(self.coeffs.len() * s - (s - 1));
        QSeries {
            offset24: self.offset24 * s as i64,
            coeffs,
        }
    }

    fn aligned_binop(&self, other: &Self, negate_other: bool) -> Result<Self> {
        let diff = self.offset24 - other.offset24;
        if diff % 24 != 0 {
            return Err(Error::OffsetMismatch(self.offset24, other.offset24));
        }
        let (lo, hi, hi_neg) = if diff <= 0 {
            (self, other, negate_other)
        } else {
            (other, self, false)
        };
        let lo_neg = if diff <= 0 { false } else { negate_other };
        let shift = ((hi.offset24 - lo.offset24) / 24) as usize;
        let prec = lo.coeffs.len().min(shift + hi.coeffs.len());
        let mut coeffs = Vec::with_capacity(prec);
        for i in 0..prec {
            let mut c = if lo_neg {
                -lo.coeffs[i].clone()
            } else {
                lo.coeffs[i].clone()
            };
            if i >= shift {
                if hi_neg {
                    c -= &hi.coeffs[i - shift];
                } else {
                    c += &hi.coeffs[i - shift];
                }
            }
            coeffs.push(c);
        }
        Ok(QSeries {
            offset24: lo.offset24,
            coeffs,
        })
    }

    /// Exact sum; offsets must differ by a multiple of 24.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.aligned_binop(other, false)
    }

    /// Exact difference; offsets must differ by a multiple of 24.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.aligned_binop(other, true)
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &BigInt) -> Self {
        QSeries {
            offset24: self.offset24,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Schoolbook Cauchy product.  Offsets add; precision is the minimum of
    /// the operands' precisions.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, ai) in self.coeffs.iter().take(n).enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in other.coeffs.iter().take(n - i).enumerate() {
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        QSeries {
            offset24: self.offset24 + other.offset24,
            coeffs: out,
        }
    }

    /// Power by binary exponentiation; `pow(a, 0)` is the constant 1 at the
    /// same precision.
    pub fn pow(&self, e: u32) -> Self {
        let mut result = QSeries::one(self.coeffs.len());
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        result
    }

    /// JSON export: coefficients as decimal strings.
    pub fn to_json(&self) -> Value {
        json!({
            "offset24": self.offset24,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    /// Inverse of [`QSeries::to_json`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let offset24 = v
            .get("offset24")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("series JSON: missing offset24".into()))?;
        let arr = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("series JSON: missing coeffs".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for c in arr {
            let s = c
                .as_str()
                .ok_or_else(|| Error::Parse("series JSON: coeffs must be strings".into()))?;
            coeffs.push(
                s.parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("series JSON: bad integer {s:?}: {e}")))?,
            );
        }
        if coeffs.is_empty() {
            return Err(Error::Parse("series JSON: empty coeffs".into()));
        }
        Ok(QSeries { offset24, coeffs })
    }
}

/// η(s·z) = q^{s/24}·∏(1−q^{sn}), truncated to `precision` coefficients.
///
/// Expanded by the pentagonal number theorem: the product part is
/// Σ_{j∈ℤ} (−1)^j q^{s·j(3j−1)/2}.
pub fn eta(scale: u32, precision: usize) -> QSeries {
    assert!(precision >= 1 && scale >= 1);
    let mut coeffs = vec![BigInt::zero(); precision];
    for (idx, sign) in pentagonal_terms(scale as usize, precision) {
        coeffs[idx] = BigInt::from(sign);
    }
    QSeries {
        offset24: scale as i64,
        coeffs,
    }
}

/// ∏(1−q^{sn})^k with the q^{sk/24} offset, i.e. η(s·z)^k.
///
/// Same value as `eta(s, p).pow(k)` (asserted in tests) but computed by the
/// coefficient recurrence from g·θf = k·f·θg (θ = q·d/dq, f = g^k), which
/// costs one pass over the pentagonal terms per coefficient.
pub fn eta_power(scale: u32, exponent: u32, precision: usize) -> QSeries {
    assert!(precision >= 1 && scale >= 1 && exponent >= 1);
    let terms = pentagonal_terms(scale as usize, precision);
    let coeffs = match prod_pow_i128(&terms, exponent as i64, precision) {
        Some(fast) => fast.into_iter().map(BigInt::from).collect(),
        None => prod_pow_big(&terms, exponent as i64, precision),
    };
    QSeries {
        offset24: (scale * exponent) as i64,
        coeffs,
    }
}

/// Normalized Eisenstein series of weight 2, 4, or 6 at argument s·z:
/// E₂ = 1−24Σσ₁(m)q^m, E₄ = 1+240Σσ₃(m)q^m, E₆ = 1−504Σσ₅(m)q^m.
pub fn eisenstein(weight: u32, scale: u32, precision: usize) -> Result<QSeries> {
    assert!(precision >= 1 && scale >= 1);
    let (k, c) = match weight {
        2 => (1, -24i64),
        4 => (3, 240),
        6 => (5, -504),
        w => return Err(Error::UnsupportedWeight(w)),
    };
    let s = scale as usize;
    let inner = (precision - 1) / s;
    let sums = DivisorSumTable::new(k, inner);
    let mut coeffs = vec![BigInt::zero(); precision];
    coeffs[0] = BigInt::one();
    for m in 1..=inner {
        coeffs[m * s] = sums.get(m) * c;
    }
    Ok(QSeries { offset24: 0, coeffs })
}

/// τ(1..upTo): coefficients of Δ = η(z)²⁴.
pub fn tau(up_to: usize) -> Vec<BigInt> {
    assert!(up_to >= 1);
    let terms = pentagonal_terms(1, up_to);
    match prod_pow_i128(&terms, 24, up_to) {
        Some(fast) => fast.into_iter().map(BigInt::from).collect(),
        None => prod_pow_big(&terms, 24, up_to),
    }
}

/// τ₂(1..upTo): coefficients of the weight-8 level-2 newform η(z)⁸η(2z)⁸.
///
/// Computed as ∏(1−q²ⁿ)⁸ (power recurrence) times the sparse factors
/// [∏(1−qⁿ)³]² · [∏(1−qⁿ)]², so the cost is a few dense×sparse passes
/// instead of any dense×dense product.
pub fn tau2(up_to: usize) -> Vec<BigInt> {
    assert!(up_to >= 1);
    let pent2 = pentagonal_terms(2, up_to);
    let jac = jacobi_cube_terms(1, up_to);
    let pent = pentagonal_terms(1, up_to);
    let fast = || -> Option<Vec<i128>> {
        let mut f = prod_pow_i128(&pent2, 8, up_to)?;
        for factor in [&jac, &jac, &pent, &pent] {
            f = mul_sparse_i128(&f, factor)?;
        }
        Some(f)
    };
    match fast() {
        Some(f) => f.into_iter().map(BigInt::from).collect(),
        None => {
            let mut f = prod_pow_big(&pent2, 8, up_to);
            for factor in [&jac, &jac, &pent, &pent] {
                f = mul_sparse_big(&f, factor);
            }
            f
        }
    }
}

/// Exact convolution values (m, Σ_{n=1}^{m−1} a(n)·b(m−n)) for m = 2..mMax,
/// with `a(n) = a[n−1]`.
pub fn convolution_scan(
    a: &[BigInt],
    b: &[BigInt],
    m_max: usize,
) -> Result<Vec<(usize, BigInt)>> {
    if m_max < 2 {
        return Ok(Vec::new());
    }
    if a.len() < m_max - 1 || b.len() < m_max - 1 {
        return Err(Error::DimensionMismatch(format!(
            "convolution to mMax={} needs {} terms, have {} and {}",
            m_max,
            m_max - 1,
            a.len(),
            b.len()
        )));
    }
    let out: Vec<(usize, BigInt)> = (2..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut acc = BigInt::zero();
            for n in 1..m {
                let (x, y) = (&a[n - 1], &b[m - n - 1]);
                if !x.is_zero() && !y.is_zero() {
                    acc += x * y;
                }
            }
            (m, acc)
        })
        .collect();
    Ok(out)
}

/// Sieve table of σ_k(1..upTo).
#[derive(Debug, Clone)]
pub struct DivisorSumTable {
    k: u32,
    values: Vec<BigInt>,
}

impl DivisorSumTable {
    /// Sieve σ_k(m) for m = 1..=upTo by adding d^k at every multiple of d.
    pub fn new(k: u32, up_to: usize) -> Self {
        let mut values = vec![BigInt::zero(); up_to];
        for d in 1..=up_to {
            let dk = BigInt::from(d).pow(k);
            for m in (d..=up_to).step_by(d) {
                values[m - 1] += &dk;
            }
        }
        DivisorSumTable { k, values }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn up_to(&self) -> usize {
        self.values.len()
    }

    /// σ_k(m), 1-indexed.
    pub fn get(&self, m: usize) -> &BigInt {
        &self.values[m - 1]
    }
}

// ---------------------------------------------------------------------------
// Sparse classical expansions and the fixed-width fast engine.
// ---------------------------------------------------------------------------

/// Nonzero terms of ∏(1−q^{sn}) up to (excluding) index `len`:
/// (s·j(3j−1)/2, (−1)^j) over j ∈ ℤ, sorted by index.
fn pentagonal_terms(scale: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    terms.push((0usize, 1i64));
    let mut j = 1i64;
    loop {
        let g1 = (j * (3 * j - 1) / 2) as usize * scale;
        let g2 = (j * (3 * j + 1) / 2) as usize * scale;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let mut pushed = false;
        if g1 < len {
            terms.push((g1, sign));
            pushed = true;
        }
        if g2 < len {
            terms.push((g2, sign));
            pushed = true;
        }
        if !pushed {
            break;
        }
        j += 1;
    }
    terms.sort_unstable_by_key(|t| t.0);
    terms
}

/// Nonzero terms of ∏(1−q^{sn})³ up to index `len`:
/// (s·j(j+1)/2, (−1)^j(2j+1)) over j ≥ 0 (Jacobi), sorted by index.
fn jacobi_cube_terms(scale: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = Vec::new();
    let mut j = 0i64;
    loop {
        let e = (j * (j + 1) / 2) as usize * scale;
        if e >= len {
            break;
        }
        let c = if j % 2 == 0 { 2 * j + 1 } else { -(2 * j + 1) };
        terms.push((e, c));
        j += 1;
    }
    terms
}

/// f = g^k for sparse g with g₀ = 1, via m·f_m = Σ_{e≥1} g_e·((k+1)e − m)·f_{m−e}.
/// Checked i128; `None` on any overflow.
fn prod_pow_i128(terms: &[(usize, i64)], k: i64, len: usize) -> Option<Vec<i128>> {
    debug_assert_eq!(terms[0], (0, 1));
    let mut f = vec![0i128; len];
    f[0] = 1;
    for m in 1..len {
        let mut acc = 0i128;
        for &(e, c) in &terms[1..] {
            if e > m {
                break;
            }
            let w = (k + 1)
                .checked_mul(e as i64)?
                .checked_sub(m as i64)? as i128;
            let t = (c as i128).checked_mul(w)?.checked_mul(f[m - e])?;
            acc = acc.checked_add(t)?;
        }
        debug_assert_eq!(acc % m as i128, 0);
        f[m] = acc / m as i128;
    }
    Some(f)
}

/// Bignum twin of [`prod_pow_i128`].
fn prod_pow_big(terms: &[(usize, i64)], k: i64, len: usize) -> Vec<BigInt> {
    debug_assert_eq!(terms[0], (0, 1));
    let mut f = vec![BigInt::zero(); len];
    f[0] = BigInt::one();
    for m in 1..len {
        let mut acc = BigInt::zero();
        for &(e, c) in &terms[1..] {
            if e > m {
                break;
            }
            let w = c as i128 * ((k + 1) as i128 * e as i128 - m as i128);
            if !f[m - e].is_zero() {
                acc += &f[m - e] * BigInt::from(w);
            }
        }
        debug_assert!((&acc % BigInt::from(m)).is_zero());
        f[m] = acc / BigInt::from(m);
    }
    f
}

/// Dense × sparse product truncated to the dense length; checked i128.
fn mul_sparse_i128(dense: &[i128], terms: &[(usize, i64)]) -> Option<Vec<i128>> {
    let n = dense.len();
    let chunk = 4096;
    let out: Vec<Option<Vec<i128>>> = (0..n)
        .into_par_iter()
        .step_by(chunk)
        .map(|start| {
            let end = (start + chunk).min(n);
            let mut block = Vec::with_capacity(end - start);
            for i in start..end {
                let mut acc = 0i128;
                for &(e, c) in terms {
                    if e > i {
                        break;
                    }
                    let t = (c as i128).checked_mul(dense[i - e])?;
                    acc = acc.checked_add(t)?;
                }
                block.push(acc);
            }
            Some(block)
        })
        .collect();
    let mut merged = Vec::with_capacity(n);
    for block in out {
        merged.extend(block?);
    }
    Some(merged)
}

/// Bignum twin of [`mul_sparse_i128`].
fn mul_sparse_big(dense: &[BigInt], terms: &[(usize, i64)]) -> Vec<BigInt> {
    let n = dense.len();
    let chunk = 4096;
    let blocks: Vec<Vec<BigInt>> = (0..n)
        .into_par_iter()
        .step_by(chunk)
        .map(|start| {
            let end = (start + chunk).min(n);
            let mut block = Vec::with_capacity(end - start);
            for i in start..end {
                let mut acc = BigInt::zero();
                for &(e, c) in terms {
                    if e > i {
                        break;
                    }
                    if !dense[i - e].is_zero() {
                        acc += &dense[i - e] * c;
                    }
                }
                block.push(acc);
            }
            block
        })
        .collect();
    blocks.into_iter().flatten().collect()
}
