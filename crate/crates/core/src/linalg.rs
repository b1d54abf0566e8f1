//! Exact linear algebra over `BigInt` / `BigRational`.
//!
//! Forward elimination is fraction-free (Bareiss): every intermediate entry
//! is an integer minor of the input, and the only divisions performed are
//! known-exact.  Rational inputs are handled by clearing denominators row by
//! row, which changes neither rank nor kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row-echelon data produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    /// Column index of the pivot in each nonzero row, strictly increasing.
    pivots: Vec<usize>,
}

fn eliminate(mut rows: Vec<Vec<BigInt>>) -> Echelon {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev_pivot = BigInt::one();
    let mut rank = 0usize;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pr) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[col].clone();
        for row in tail {
            if row[col].is_zero() {
                // Still must rescale to keep the Bareiss invariant exact.
                for c in col..ncols {
                    let v = &pivot * &row[c];
                    debug_assert!((&v % &prev_pivot).is_zero());
                    row[c] = v / &prev_pivot;
                }
                continue;
            }
            let factor = std::mem::replace(&mut row[col], BigInt::zero());
            for c in (col + 1)..ncols {
                let v = &pivot * &row[c] - &factor * &pivot_row[c];
                debug_assert!((&v % &prev_pivot).is_zero());
                row[c] = v / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(pivots.len());
    Echelon { rows, pivots }
}

/// Rank of an integer matrix.
pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    eliminate(rows.to_vec()).pivots.len()
}

/// Rank of a rational matrix (denominators cleared per row first).
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    rank_int(&clear_rows(rows))
}

/// Basis of the right kernel `{x : A x = 0}` of an integer matrix, as
/// integer vectors with content 1 and positive leading entry, one per free
/// column, in column order.  Deterministic.
pub fn nullspace_int(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let ech = eliminate(rows.to_vec());
    let pivot_cols = &ech.pivots;
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !is_pivot[*c]) {
        // Back-substitute with x[free] = 1, other free coordinates 0.
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for (r, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut acc = BigRational::zero();
            for c in (pc + 1)..ncols {
                if !x[c].is_zero() && !ech.rows[r][c].is_zero() {
                    acc += BigRational::from(ech.rows[r][c].clone()) * &x[c];
                }
            }
            x[pc] = -acc / BigRational::from(ech.rows[r][pc].clone());
        }
        basis.push(integerize(&x));
    }
    basis
}

/// Scale a rational vector to a coprime integer vector with positive
/// leading nonzero entry.  The zero vector maps to itself.
pub fn integerize(v: &[BigRational]) -> Vec<BigInt> {
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&denom_lcm / x.denom())).collect();
    let mut content = BigInt::zero();
    for x in &ints {
        content = content.gcd(x);
    }
    if content.is_zero() {
        return ints;
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            content = -content;
        }
    }
    for x in &mut ints {
        *x /= &content;
    }
    ints
}

fn clear_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let mut l = BigInt::one();
            for x in row {
                l = l.lcm(x.denom());
            }
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Outcome of an exact linear solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// The unique solution.
    Unique(Vec<BigRational>),
    /// Consistent with free variables; carries the particular solution with
    /// every free variable set to zero.
    Underdetermined(Vec<BigRational>),
    /// No solution.
    Inconsistent,
}

impl SolveOutcome {
    /// Any solution, if the system is consistent.
    pub fn solution(self) -> Option<Vec<BigRational>> {
        match self {
            SolveOutcome::Unique(x) | SolveOutcome::Underdetermined(x) => Some(x),
            SolveOutcome::Inconsistent => None,
        }
    }
}

/// Solve `A x = b` exactly over the rationals.
///
/// `a` is row-major with `ncols` columns; `b` has one entry per row.  The
/// system may be overdetermined; every row is honored exactly.
pub fn solve_exact(a: &[Vec<BigRational>], b: &[BigRational], ncols: usize) -> SolveOutcome {
    assert_eq!(a.len(), b.len(), "matrix/rhs row count mismatch");
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), ncols, "row width mismatch");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let nrows = aug.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, pr);
        let inv = aug[rank][col].recip();
        for c in col..=ncols {
            let v = &aug[rank][c] * &inv;
            aug[rank][c] = v;
        }
        for r in 0..nrows {
            if r != rank && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=ncols {
                    let v = &aug[r][c] - &f * &aug[rank][c];
                    aug[r][c] = v;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    if aug.iter().skip(rank).any(|row| !row[ncols].is_zero()) {
        return SolveOutcome::Inconsistent;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for &(r, c) in &pivots {
        x[c] = aug[r][ncols].clone();
    }
    if rank < ncols {
        return SolveOutcome::Underdetermined(x);
    }
    SolveOutcome::Unique(x)
}

/// Exact inverse of a square rational matrix, or `None` if singular.
pub fn invert(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pr);
        let inv = aug[col][col].recip();
        for c in col..2 * n {
            let v = &aug[col][c] * &inv;
            aug[col][c] = v;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..2 * n {
                    let v = &aug[r][c] - &f * &aug[col][c];
                    aug[r][c] = v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}
