//! Exact lattice machinery: Gram-Schmidt, δ-LLL reduction, Babai's nearest
//! plane algorithm and an exhaustive CVP oracle.
//!
//! Bases are stored column-wise: a basis of rank `n` in `Z^m` is `n` integer
//! vectors of length `m`. All coefficient arithmetic is done in an
//! [`ExactScalar`], [`Rational`](crate::Rational) unless a caller asks for
//! something else through the `*_in` variants.

#![allow(clippy::needless_range_loop)]

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Iteration cap for the main reduction loop.
pub const LLL_ITERATION_CAP: u64 = 1_000_000;

/// Largest search space [`brute_force_cvp`] agrees to scan.
pub const CVP_ORACLE_LIMIT: u128 = 100_000_000;

/// Square integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    columns: Vec<Vec<BigInt>>,
}

impl Basis {
    pub fn from_columns(columns: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(first) = columns.first() {
            let m = first.len();
            if let Some(bad) = columns.iter().find(|c| c.len() != m) {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: bad.len(),
                });
            }
        }
        Ok(Basis { columns })
    }

    /// Builds a basis from a row-major `m × n` matrix whose columns are the
    /// basis vectors.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let columns = (0..n)
            .map(|j| rows.iter().map(|r| r[j].clone().into()).collect())
            .collect();
        Ok(Basis { columns })
    }

    pub fn from_i64_columns(columns: &[&[i64]]) -> Result<Self> {
        Self::from_columns(
            columns
                .iter()
                .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn columns(&self) -> &[Vec<BigInt>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[BigInt] {
        &self.columns[i]
    }

    /// Number of basis vectors.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Length of each basis vector.
    pub fn ambient_dim(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Row-major view of the `m × n` matrix.
    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.ambient_dim())
            .map(|r| self.columns.iter().map(|c| c[r].clone()).collect())
            .collect()
    }

    /// `Σ coeffs[i] · b_i`.
    pub fn combine(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.ambient_dim()];
        for (c, col) in coeffs.iter().zip(&self.columns) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }

    /// `self · u` for an `n × n` integer matrix.
    pub fn transform(&self, u: &IntMatrix) -> Basis {
        let n = self.len();
        let columns = (0..n)
            .map(|j| {
                let coeffs: Vec<BigInt> = (0..n).map(|i| u[i][j].clone()).collect();
                self.combine(&coeffs)
            })
            .collect();
        Basis { columns }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>6}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[BigInt]) -> BigInt {
    dot(a, a)
}

fn dot_s<S: ExactScalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn lift<S: ExactScalar>(v: &[BigInt]) -> Vec<S> {
    v.iter().map(S::from_integer).collect()
}

fn scalar_from_ratio<S: ExactScalar>(q: &BigRational) -> S {
    S::from_integer(q.numer()) / S::from_integer(q.denom())
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Gram-Schmidt orthogonalization of a basis.
///
/// `mu[i][j]` holds `⟨b_i, b̃_j⟩ / ⟨b̃_j, b̃_j⟩` for `j < i`, `1` on the
/// diagonal and `0` above it.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidtData<S> {
    pub ortho: Vec<Vec<S>>,
    pub mu: Vec<Vec<S>>,
    pub norms_sq: Vec<S>,
}

impl<S: ExactScalar> GramSchmidtData<S> {
    /// Rebuilds `b_i = b̃_i + Σ_{j<i} μ_ij b̃_j`.
    pub fn recombine(&self) -> Vec<Vec<S>> {
        (0..self.ortho.len())
            .map(|i| {
                let mut v = self.ortho[i].clone();
                for j in 0..i {
                    for (x, y) in v.iter_mut().zip(&self.ortho[j]) {
                        *x = x.clone() + self.mu[i][j].clone() * y.clone();
                    }
                }
                v
            })
            .collect()
    }
}

pub fn gram_schmidt<S: ExactScalar>(basis: &Basis) -> Result<GramSchmidtData<S>> {
    let n = basis.len();
    let mut ortho: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut norms_sq: Vec<S> = Vec::with_capacity(n);
    let mut mu = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        let b_i: Vec<S> = lift(basis.column(i));
        let mut v = b_i.clone();
        for j in 0..i {
            let m = dot_s(&b_i, &ortho[j]) / norms_sq[j].clone();
            for (x, y) in v.iter_mut().zip(&ortho[j]) {
                *x = x.clone() - m.clone() * y.clone();
            }
            mu[i][j] = m;
        }
        mu[i][i] = S::one();
        let nsq = dot_s(&v, &v);
        if nsq.is_zero() {
            return Err(Error::RankDeficient(i));
        }
        ortho.push(v);
        norms_sq.push(nsq);
    }
    Ok(GramSchmidtData {
        ortho,
        mu,
        norms_sq,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    pub original: Basis,
    pub reduced: Basis,
    /// Unimodular `U` with `reduced = original · U`.
    pub transform: IntMatrix,
    pub delta: BigRational,
}

impl ReductionResult {
    /// Wraps an externally reduced basis, recovering the transform by an
    /// exact solve of `original · U = reduced`.
    pub fn from_reduced(original: Basis, reduced: Basis, delta: BigRational) -> Result<Self> {
        let transform = solve_transform(&original, &reduced)?;
        let det = determinant(&transform);
        if det.abs() != BigInt::one() {
            return Err(Error::NotALatticeVector(format!(
                "change of basis has determinant {det}, bases span different lattices"
            )));
        }
        Ok(ReductionResult {
            original,
            reduced,
            transform,
            delta,
        })
    }
}

/// Exact integer solution `U` of `original · U = target` (column-wise).
fn solve_transform(original: &Basis, target: &Basis) -> Result<IntMatrix> {
    let n = original.len();
    if target.len() != n || target.ambient_dim() != original.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.len(),
        });
    }
    let mut u = vec![vec![BigInt::zero(); n]; n];
    for j in 0..n {
        let coeffs = integer_coordinates(original, target.column(j))?;
        for (i, c) in coeffs.into_iter().enumerate() {
            u[i][j] = c;
        }
    }
    Ok(u)
}

/// Integer coordinates of `v` with respect to `basis`, or an error if `v`
/// is not in the lattice.
pub fn integer_coordinates(basis: &Basis, v: &[BigInt]) -> Result<Vec<BigInt>> {
    let n = basis.len();
    // Normal equations Gᵀ G x = Gᵀ v solved exactly.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| BigRational::from_integer(dot(basis.column(i), basis.column(j))))
                .collect();
            row.push(BigRational::from_integer(dot(basis.column(i), v)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::RankDeficient(col))?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    let mut coeffs = Vec::with_capacity(n);
    for row in &a {
        let x = &row[n];
        if !x.is_integer() {
            return Err(Error::NotALatticeVector(format!(
                "non-integral coordinate {x}"
            )));
        }
        coeffs.push(x.to_integer());
    }
    if basis.combine(&coeffs) != v {
        return Err(Error::NotALatticeVector(
            "vector is outside the span of the basis".into(),
        ));
    }
    Ok(coeffs)
}

/// δ-LLL reduction in exact rational arithmetic.
pub fn lll_reduce(basis: &Basis, delta: &BigRational) -> Result<ReductionResult> {
    lll_reduce_in::<BigRational>(basis, delta)
}

/// δ-LLL reduction following the textbook loop: for each `k`, a full
/// size-reduction sweep `j = k-1, …, 1`, then the Lovász test, then either
/// `k ← k+1` or a swap with `k ← max(k-1, 2)`.
///
/// Gram-Schmidt data is updated incrementally; since arithmetic is exact the
/// result is identical to recomputing it after every change.
pub fn lll_reduce_in<S: ExactScalar>(
    basis: &Basis,
    delta: &BigRational,
) -> Result<ReductionResult> {
    let quarter = BigRational::new(1.into(), 4.into());
    if *delta <= quarter || *delta > BigRational::one() {
        return Err(Error::InvalidConfig(format!(
            "delta = {delta} is outside (1/4, 1]"
        )));
    }
    let n = basis.len();
    let gs = gram_schmidt::<S>(basis)?;
    let mut mu = gs.mu;
    let mut bnorm = gs.norms_sq;
    let mut cols = basis.columns.clone();
    let mut u = identity(n);
    let delta_s: S = scalar_from_ratio(delta);
    let half = S::one() / (S::one() + S::one());

    let mut k = 1;
    let mut iterations = 0u64;
    while k < n {
        iterations += 1;
        if iterations > LLL_ITERATION_CAP {
            return Err(Error::IterationCapExceeded(LLL_ITERATION_CAP));
        }
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round_half_away();
                let q_s = S::from_integer(&q);
                let (head, tail) = cols.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= &q * y;
                }
                for row in u.iter_mut() {
                    let t = &q * &row[j];
                    row[k] -= t;
                }
                mu[k][j] = mu[k][j].clone() - q_s.clone();
                for l in 0..j {
                    mu[k][l] = mu[k][l].clone() - q_s.clone() * mu[j][l].clone();
                }
            }
        }
        let m = mu[k][k - 1].clone();
        let lovasz_rhs = (delta_s.clone() - m.clone() * m.clone()) * bnorm[k - 1].clone();
        if bnorm[k] >= lovasz_rhs {
            k += 1;
        } else {
            let big_b = bnorm[k].clone() + m.clone() * m.clone() * bnorm[k - 1].clone();
            let new_mu = m.clone() * bnorm[k - 1].clone() / big_b.clone();
            bnorm[k] = bnorm[k - 1].clone() * bnorm[k].clone() / big_b.clone();
            bnorm[k - 1] = big_b;
            cols.swap(k, k - 1);
            for row in u.iter_mut() {
                row.swap(k, k - 1);
            }
            for j in 0..k - 1 {
                let (a, b) = mu.split_at_mut(k);
                std::mem::swap(&mut a[k - 1][j], &mut b[0][j]);
            }
            mu[k][k - 1] = new_mu.clone();
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = mu[i][k - 1].clone() - m.clone() * t.clone();
                mu[i][k - 1] = t + new_mu.clone() * mu[i][k].clone();
            }
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    Ok(ReductionResult {
        original: basis.clone(),
        reduced: Basis { columns: cols },
        transform: u,
        delta: delta.clone(),
    })
}

/// First violated δ-LLL condition, 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub enum LllViolation {
    RankDeficient {
        column: usize,
    },
    /// `|μ_ij| > 1/2`.
    SizeReduction {
        i: usize,
        j: usize,
        mu: BigRational,
    },
    /// Lovász condition fails between `i-1` and `i`.
    Lovasz {
        i: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LllCheck {
    pub violation: Option<LllViolation>,
}

impl LllCheck {
    pub fn is_reduced(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn is_lll_reduced(basis: &Basis, delta: &BigRational) -> LllCheck {
    let gs = match gram_schmidt::<BigRational>(basis) {
        Ok(gs) => gs,
        Err(Error::RankDeficient(column)) => {
            return LllCheck {
                violation: Some(LllViolation::RankDeficient { column }),
            }
        }
        Err(_) => unreachable!("gram_schmidt only fails on rank deficiency"),
    };
    let half = BigRational::new(1.into(), 2.into());
    for i in 1..basis.len() {
        for j in 0..i {
            if gs.mu[i][j].abs() > half {
                return LllCheck {
                    violation: Some(LllViolation::SizeReduction {
                        i,
                        j,
                        mu: gs.mu[i][j].clone(),
                    }),
                };
            }
        }
        let m = &gs.mu[i][i - 1];
        if gs.norms_sq[i] < (delta - m * m) * &gs.norms_sq[i - 1] {
            return LllCheck {
                violation: Some(LllViolation::Lovasz { i }),
            };
        }
    }
    LllCheck { violation: None }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BabaiResult {
    pub b_op: Vec<BigInt>,
    pub coeffs_reduced: Vec<BigInt>,
    pub coeffs_original: Vec<BigInt>,
    pub residual: Vec<BigInt>,
    pub dist_sq: BigInt,
}

pub fn babai_nearest_plane(reduction: &ReductionResult, target: &[BigInt]) -> Result<BabaiResult> {
    babai_nearest_plane_in::<BigRational>(reduction, target)
}

/// Nearest-plane rounding against the Gram-Schmidt vectors of the reduced
/// basis, last vector first.
pub fn babai_nearest_plane_in<S: ExactScalar>(
    reduction: &ReductionResult,
    target: &[BigInt],
) -> Result<BabaiResult> {
    let basis = &reduction.reduced;
    if basis.is_empty() {
        return Err(Error::InvalidConfig("empty basis".into()));
    }
    if target.len() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            found: target.len(),
        });
    }
    let gs = gram_schmidt::<S>(basis)?;
    let n = basis.len();
    let mut remainder: Vec<BigInt> = target.to_vec();
    let mut coeffs = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let r: Vec<S> = lift(&remainder);
        let c = (dot_s(&r, &gs.ortho[i]) / gs.norms_sq[i].clone()).round_half_away();
        for (x, y) in remainder.iter_mut().zip(basis.column(i)) {
            *x -= &c * y;
        }
        coeffs[i] = c;
    }
    let b_op: Vec<BigInt> = target.iter().zip(&remainder).map(|(t, r)| t - r).collect();
    let coeffs_original = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &reduction.transform[i][j] * &coeffs[j])
                .sum()
        })
        .collect();
    let dist_sq = norm_sq(&remainder);
    Ok(BabaiResult {
        b_op,
        coeffs_reduced: coeffs,
        coeffs_original,
        residual: remainder,
        dist_sq,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvpSolution {
    pub vector: Vec<BigInt>,
    pub coeffs: Vec<i64>,
    pub dist_sq: BigInt,
}

/// Exhaustive CVP over the coefficient box `[-bound, bound]^n`.
///
/// The box is scanned in lexicographic order of coefficient vectors and only
/// strict improvements are kept, so ties resolve to the lexicographically
/// smallest coefficients.
pub fn brute_force_cvp(basis: &Basis, target: &[BigInt], bound: i64) -> Result<CvpSolution> {
    let n = basis.len();
    if target.len() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            found: target.len(),
        });
    }
    if bound < 0 {
        return Err(Error::InvalidConfig(format!("negative bound {bound}")));
    }
    let side = (2 * bound + 1) as u128;
    let points = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(side));
    match points {
        Some(p) if p <= CVP_ORACLE_LIMIT => {}
        Some(p) => return Err(Error::OracleTooLarge(p)),
        None => return Err(Error::OracleTooLarge(u128::MAX)),
    }

    // Residual t - Σ e_i b_i maintained incrementally as the odometer turns.
    let m = basis.ambient_dim();
    let mut coeffs = vec![-bound; n];
    let mut residual: Vec<BigInt> = target.to_vec();
    for col in basis.columns() {
        for (r, x) in residual.iter_mut().zip(col) {
            *r += x * bound;
        }
    }
    let mut best = CvpSolution {
        vector: vec![BigInt::zero(); m],
        coeffs: coeffs.clone(),
        dist_sq: norm_sq(&residual),
    };
    best.vector = target.iter().zip(&residual).map(|(t, r)| t - r).collect();
    loop {
        // Advance: the last coordinate is least significant.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            if coeffs[pos] < bound {
                coeffs[pos] += 1;
                for (r, x) in residual.iter_mut().zip(basis.column(pos)) {
                    *r -= x;
                }
                break;
            }
            let span = 2 * bound;
            coeffs[pos] = -bound;
            for (r, x) in residual.iter_mut().zip(basis.column(pos)) {
                *r += x * span;
            }
        }
        let d = norm_sq(&residual);
        if d < best.dist_sq {
            best.dist_sq = d;
            best.coeffs = coeffs.clone();
            best.vector = target.iter().zip(&residual).map(|(t, r)| t - r).collect();
        }
    }
}

/// Converts a small integer vector, failing if any entry overflows `i64`.
pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn example_basis() -> Basis {
        Basis::from_rows(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 2],
            vec![22, 35, 51],
        ])
        .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn gram_schmidt_first_coefficient() {
        let gs = gram_schmidt::<BigRational>(&example_basis()).unwrap();
        assert_eq!(gs.mu[1][0], q(770, 485));
        assert_eq!(gs.norms_sq[0], q(485, 1));
    }

    #[test]
    fn gram_schmidt_orthogonal_input_is_unchanged() {
        let b = Basis::from_i64_columns(&[&[2, 0, 0], &[0, 3, 0]]).unwrap();
        let gs = gram_schmidt::<BigRational>(&b).unwrap();
        assert!(gs.mu[1][0].is_zero());
        assert_eq!(gs.ortho[0], vec![q(2, 1), q(0, 1), q(0, 1)]);
        assert_eq!(gs.ortho[1], vec![q(0, 1), q(3, 1), q(0, 1)]);
    }

    #[test]
    fn gram_schmidt_recombines_exactly() {
        let b = example_basis();
        let gs = gram_schmidt::<BigRational>(&b).unwrap();
        let back = gs.recombine();
        for (col, rebuilt) in b.columns().iter().zip(back) {
            let lifted: Vec<BigRational> =
                col.iter().cloned().map(BigRational::from_integer).collect();
            assert_eq!(lifted, rebuilt);
        }
        for i in 0..3 {
            for j in 0..i {
                assert!(dot_s(&gs.ortho[i], &gs.ortho[j]).is_zero());
            }
        }
    }

    #[test]
    fn gram_schmidt_rejects_dependent_columns() {
        let b = Basis::from_i64_columns(&[&[1, 2, 3], &[2, 4, 6]]).unwrap();
        assert!(matches!(
            gram_schmidt::<BigRational>(&b),
            Err(Error::RankDeficient(1))
        ));
    }

    #[test]
    fn reduces_the_three_qubit_basis() {
        let r = lll_reduce(&example_basis(), &q(3, 4)).unwrap();
        let expected =
            Basis::from_i64_columns(&[&[1, -2, 2, 3], &[-3, 2, 0, 4], &[-4, 1, 2, -2]]).unwrap();
        assert_eq!(r.reduced, expected);
        assert_eq!(example_basis().transform(&r.transform), r.reduced);
        assert_eq!(determinant(&r.transform).abs(), BigInt::one());
    }

    #[test]
    fn fixed_width_scalar_gives_same_reduction() {
        let a = lll_reduce(&example_basis(), &q(3, 4)).unwrap();
        let b = lll_reduce_in::<Ratio<i128>>(&example_basis(), &q(3, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn already_reduced_basis_is_untouched() {
        let b = Basis::from_i64_columns(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]).unwrap();
        let r = lll_reduce(&b, &q(3, 4)).unwrap();
        assert_eq!(r.reduced, b);
        assert_eq!(r.transform, identity(3));
    }

    #[test]
    fn rejects_delta_out_of_range() {
        assert!(lll_reduce(&example_basis(), &q(1, 4)).is_err());
        assert!(lll_reduce(&example_basis(), &q(5, 4)).is_err());
        assert!(lll_reduce(&example_basis(), &q(1, 1)).is_ok());
    }

    #[test]
    fn lll_check_reports_violations() {
        let d = q(3, 4);
        let check = is_lll_reduced(&example_basis(), &d);
        assert_eq!(
            check.violation,
            Some(LllViolation::SizeReduction {
                i: 1,
                j: 0,
                mu: q(770, 485)
            })
        );
        let reduced =
            Basis::from_i64_columns(&[&[1, -2, 2, 3], &[-3, 2, 0, 4], &[-4, 1, 2, -2]]).unwrap();
        assert!(is_lll_reduced(&reduced, &d).is_reduced());
        let single = Basis::from_i64_columns(&[&[5, 7]]).unwrap();
        assert!(is_lll_reduced(&single, &d).is_reduced());
        // Size-reduced but badly ordered.
        let swapped = Basis::from_i64_columns(&[&[0, 5], &[1, 0]]).unwrap();
        assert_eq!(
            is_lll_reduced(&swapped, &d).violation,
            Some(LllViolation::Lovasz { i: 1 })
        );
    }

    #[test]
    fn babai_on_reference_reduction() {
        let reduced =
            Basis::from_i64_columns(&[&[1, -2, 2, 3], &[-4, 1, 2, -2], &[-3, 2, 0, 4]]).unwrap();
        let r = ReductionResult::from_reduced(example_basis(), reduced, q(3, 4)).unwrap();
        let b = babai_nearest_plane(&r, &big(&[0, 0, 0, 240])).unwrap();
        assert_eq!(b.b_op, big(&[0, 4, 4, 242]));
        assert_eq!(b.dist_sq, BigInt::from(36));
        assert_eq!(r.reduced.combine(&b.coeffs_reduced), b.b_op);
        assert_eq!(r.original.combine(&b.coeffs_original), b.b_op);
        assert_eq!(b.coeffs_original, big(&[0, 4, 2]));
    }

    #[test]
    fn babai_hits_lattice_points_exactly() {
        let r = lll_reduce(&example_basis(), &q(3, 4)).unwrap();
        let t = example_basis().combine(&big(&[3, -1, 2]));
        let b = babai_nearest_plane(&r, &t).unwrap();
        assert_eq!(b.b_op, t);
        assert!(b.dist_sq.is_zero());
        assert_eq!(b.coeffs_original, big(&[3, -1, 2]));
    }

    #[test]
    fn babai_rejects_wrong_target_length() {
        let r = lll_reduce(&example_basis(), &q(3, 4)).unwrap();
        assert!(babai_nearest_plane(&r, &big(&[0, 0, 240])).is_err());
    }

    #[test]
    fn from_reduced_rejects_other_lattice() {
        let other =
            Basis::from_i64_columns(&[&[2, 0, 0, 44], &[0, 1, 0, 35], &[0, 0, 2, 51]]).unwrap();
        assert!(ReductionResult::from_reduced(example_basis(), other, q(3, 4)).is_err());
    }

    #[test]
    fn brute_force_tie_breaks_lexicographically() {
        let b = Basis::from_i64_columns(&[&[2, 0]]).unwrap();
        let s = brute_force_cvp(&b, &big(&[3, 0]), 3).unwrap();
        assert_eq!(s.vector, big(&[2, 0]));
        assert_eq!(s.coeffs, vec![1]);
    }

    #[test]
    fn brute_force_finds_lattice_target() {
        let t = example_basis().combine(&big(&[1, -2, 3]));
        let s = brute_force_cvp(&example_basis(), &t, 4).unwrap();
        assert_eq!(s.vector, t);
        assert!(s.dist_sq.is_zero());
    }

    #[test]
    fn brute_force_refuses_huge_boxes() {
        let cols: Vec<Vec<BigInt>> = (0..7)
            .map(|i| {
                let mut v = vec![BigInt::zero(); 7];
                v[i] = BigInt::one();
                v
            })
            .collect();
        let b = Basis::from_columns(cols).unwrap();
        assert!(matches!(
            brute_force_cvp(&b, &vec![BigInt::zero(); 7], 8),
            Err(Error::OracleTooLarge(_))
        ));
    }

    #[test]
    fn determinant_small_cases() {
        let m = vec![big(&[2, 1]), big(&[7, 4])];
        assert_eq!(determinant(&m), BigInt::from(1));
        let m = vec![big(&[0, 1, 0]), big(&[1, 0, 0]), big(&[0, 0, 1])];
        assert_eq!(determinant(&m), BigInt::from(-1));
        let m = vec![big(&[1, 2]), big(&[2, 4])];
        assert_eq!(determinant(&m), BigInt::zero());
    }
}
