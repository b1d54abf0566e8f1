//! Weight-graded generator rings of q-series and exact lifting of theta
//! series into long expansions.
//!
//! Level 1 is the free ring on E₄ (weight 4) and E₆ (weight 6); level 2 is
//! free on G₂ := 2E₂(2z) − E₂(z) (weight 2) and E₄ (weight 4).  These are
//! the two certified lifting targets.  A fit solves exactly for the
//! rational combination of weight-k generator monomials matching a theta
//! series up to the structural depth for (level, weight), then demands
//! that the combination reproduce every further enumerated coefficient —
//! at least five beyond the solve — before the extension is trusted.
//! Any residual is a hard failure: a failed lift signals a wrong level or
//! insufficient input precision, and callers fall back to enumeration.

use crate::error::Error;
use crate::linalg::solve_exact;
use crate::qseries::{self, QSeries};
use crate::theta::ThetaSeries;
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

/// Modular-form index of the level, the factor in the coefficient-depth
/// bound (levels 3 and 4 have no generator ring here, but their index is
/// still meaningful to depth formulas).
pub fn level_index(level: u32) -> Result<u32> {
    match level {
        1 => Ok(1),
        2 => Ok(3),
        3 => Ok(4),
        4 => Ok(6),
        other => Err(Error::UnsupportedLevel(other)),
    }
}

/// Structural depth for a fit of the given weight at the given level:
/// coefficients 0..=depth pin down a form of that weight, with two spare.
pub fn fit_depth(level: u32, weight: u32) -> Result<usize> {
    let mu = level_index(level)?;
    Ok(((2 * weight * mu).div_ceil(24) + 2) as usize)
}

/// Number of extra enumerated coefficients a lift must reproduce beyond
/// the solve depth before the extension is trusted.
pub const OVERDETERMINATION: usize = 5;

/// A generator ring: named q-series with weights, expanded once to a fixed
/// precision and shared read-only.
#[derive(Debug, Clone)]
pub struct GeneratorRing {
    level: u32,
    generators: Vec<(&'static str, u32, QSeries)>,
}

impl GeneratorRing {
    /// Build the ring for level 1 or 2 with `precision` coefficients per
    /// generator.
    pub fn new(level: u32, precision: usize) -> Result<GeneratorRing> {
        let generators = match level {
            1 => vec![
                ("E4", 4u32, qseries::eisenstein(4, 1, precision)?),
                ("E6", 6, qseries::eisenstein(6, 1, precision)?),
            ],
            2 => {
                let g2 = qseries::eisenstein(2, 2, precision)?
                    .scale(&BigInt::from(2))
                    .sub(&qseries::eisenstein(2, 1, precision)?)?;
                vec![
                    ("G2", 2, g2),
                    ("E4", 4, qseries::eisenstein(4, 1, precision)?),
                ]
            }
            other => return Err(Error::UnsupportedLevel(other)),
        };
        Ok(GeneratorRing { level, generators })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> usize {
        self.generators[0].2.precision()
    }

    pub fn generators(&self) -> impl Iterator<Item = (&'static str, u32, &QSeries)> {
        self.generators.iter().map(|(n, w, s)| (*n, *w, s))
    }

    /// Exponent pairs (a, b) with a·w₁ + b·w₂ = k, in increasing powers of
    /// the second generator.
    pub fn monomial_exponents(&self, k: u32) -> Vec<(u32, u32)> {
        let w1 = self.generators[0].1;
        let w2 = self.generators[1].1;
        let mut out = Vec::new();
        for b in 0..=k / w2 {
            let rem = k - w2 * b;
            if rem % w1 == 0 {
                out.push((rem / w1, b));
            }
        }
        out
    }

    /// The weight-k monomials expanded at the ring's precision, in the
    /// order of [`monomial_exponents`](Self::monomial_exponents).
    pub fn monomial_series(&self, k: u32) -> Vec<QSeries> {
        self.monomial_exponents(k)
            .iter()
            .map(|&(a, b)| {
                self.generators[0]
                    .2
                    .pow(a)
                    .mul(&self.generators[1].2.pow(b))
            })
            .collect()
    }
}

/// All generator monomials of total weight k at the given level, each
/// expanded to `precision` coefficients.
pub fn monomial_basis(level: u32, k: u32, precision: usize) -> Result<Vec<QSeries>> {
    Ok(GeneratorRing::new(level, precision)?.monomial_series(k))
}

/// A theta series re-expressed over a generator-monomial basis and
/// extended far beyond its enumerated prefix.  Coefficient m of the lifted
/// form is `series()[m] / denom()`.
#[derive(Debug, Clone)]
pub struct LiftedForm {
    level: u32,
    weight: u32,
    monomials: Vec<(u32, u32)>,
    coeffs: Vec<BigRational>,
    fitted_depth: usize,
    series: QSeries,
    denom: BigInt,
}

impl LiftedForm {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn monomials(&self) -> &[(u32, u32)] {
        &self.monomials
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn fitted_depth(&self) -> usize {
        self.fitted_depth
    }

    /// Integer numerator series of the extension (offset24 = 0).
    pub fn series(&self) -> &QSeries {
        &self.series
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn precision(&self) -> usize {
        self.series.precision()
    }

    pub fn coefficient(&self, m: usize) -> Result<BigRational> {
        let num = self.series.coeff_at(m as i64)?;
        Ok(BigRational::new(num, self.denom.clone()))
    }

    pub fn coefficient_is_zero(&self, m: usize) -> Result<bool> {
        Ok(self.series.coeff_at(m as i64)?.is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "weight": self.weight,
            "monomials": self.monomials.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "fittedDepth": self.fitted_depth,
        })
    }
}

/// Fit a theta series as an exact rational combination of weight-(d/2+ℓ)
/// generator monomials and extend it to `target_precision` coefficients.
///
/// The solve uses coefficients 0..=depth for the structural depth of
/// (level, weight); every remaining enumerated coefficient is then checked
/// against the combination, and at least [`OVERDETERMINATION`] of them
/// must exist.  Any mismatch fails the lift.
pub fn fit_and_extend(
    theta: &ThetaSeries,
    level: u32,
    target_precision: usize,
) -> Result<LiftedForm> {
    let context = format!(
        "{} degree {} at level {}",
        theta.lattice().name(),
        theta.degree(),
        level
    );
    let d = theta.lattice().dim();
    if d % 2 != 0 {
        return Err(Error::LiftFailed {
            context,
            reason: "weight d/2 + l is not an integer in odd dimension".into(),
        });
    }
    let weight = d as u32 / 2 + theta.degree();
    if weight % 2 != 0 {
        return Err(Error::LiftFailed {
            context,
            reason: format!("weight {weight} is odd; the generator rings are even-weight"),
        });
    }
    let depth = fit_depth(level, weight)?;
    let have = theta.computed_up_to();
    if have < depth + OVERDETERMINATION {
        return Err(Error::LiftFailed {
            context,
            reason: format!(
                "need {} enumerated coefficients (solve depth {} plus {} checks), have {}",
                depth + OVERDETERMINATION,
                depth,
                OVERDETERMINATION,
                have
            ),
        });
    }
    let precision = target_precision.max(have + 1);
    let ring = GeneratorRing::new(level, precision)?;
    let monomials = ring.monomial_exponents(weight);
    if monomials.is_empty() {
        return Err(Error::LiftFailed {
            context,
            reason: format!("no generator monomials of weight {weight} at level {level}"),
        });
    }
    let basis = ring.monomial_series(weight);
    let rows: Vec<Vec<BigRational>> = (0..=depth)
        .map(|m| {
            basis
                .iter()
                .map(|s| BigRational::from(s.coeffs()[m].clone()))
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = (0..=depth)
        .map(|m| theta.coefficient(m))
        .collect::<Result<_>>()?;
    let coeffs = match solve_exact(&rows, &rhs, basis.len()).solution() {
        Some(x) => x,
        None => {
            return Err(Error::LiftFailed {
                context,
                reason: format!(
                    "no combination matches the first {} coefficients",
                    depth + 1
                ),
            })
        }
    };
    let mut denom = BigInt::from(1);
    for c in &coeffs {
        denom = denom.lcm(c.denom());
    }
    let mut nums = vec![BigInt::zero(); precision];
    for (c, s) in coeffs.iter().zip(&basis) {
        if c.is_zero() {
            continue;
        }
        let ic = (c * BigRational::from(denom.clone())).to_integer();
        for (m, v) in s.coeffs().iter().enumerate() {
            if !v.is_zero() {
                nums[m] += &ic * v;
            }
        }
    }
    let series = QSeries::from_coeffs(0, nums);
    for m in depth + 1..=have {
        let lifted = BigRational::new(series.coeffs()[m].clone(), denom.clone());
        if lifted != theta.coefficient(m)? {
            return Err(Error::LiftFailed {
                context,
                reason: format!("fit residual nonzero at enumerated coefficient {m}"),
            });
        }
    }
    Ok(LiftedForm {
        level,
        weight,
        monomials,
        coeffs,
        fitted_depth: depth,
        series,
        denom,
    })
}
