//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use schnorr_vqe::lattice::Basis;

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn basis_from_columns(cols: &[Vec<i64>]) -> Basis {
    Basis::from_columns(cols.iter().map(|c| big(c)).collect()).unwrap()
}

/// Row-style Hermite normal form of the lattice generated by the basis
/// columns. Pivots are positive and entries above a pivot lie in
/// `[0, pivot)`. Two bases span the same lattice iff their forms agree.
pub fn hermite_normal_form(basis: &Basis) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = basis.columns().to_vec();
    let m = basis.ambient_dim();
    let mut r = 0;
    for col in 0..m {
        if r == rows.len() {
            break;
        }
        // Euclid on the column until a single nonzero remains at row r.
        loop {
            let nonzero: Vec<usize> = (r..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            rows.swap(r, p);
            if nonzero.len() == 1 {
                break;
            }
            let pivot = rows[r].clone();
            for row in rows.iter_mut().skip(r + 1) {
                let q = row[col].div_floor(&pivot[col]);
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
            }
        }
        if rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            let q = row[col].div_floor(&pivot[col]);
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

fn gso(cols: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = cols.len();
    let mut ortho: Vec<Vec<BigRational>> = Vec::new();
    let mut norms = Vec::new();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let b: Vec<BigRational> = cols[i]
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let mut v = b.clone();
        for j in 0..i {
            let d: BigRational = b.iter().zip(&ortho[j]).map(|(x, y)| x * y).sum();
            mu[i][j] = d / &norms[j];
            for (x, y) in v.iter_mut().zip(&ortho[j]) {
                *x -= &mu[i][j] * y;
            }
        }
        norms.push(v.iter().map(|x| x * x).sum());
        ortho.push(v);
    }
    (mu, norms)
}

fn round_half_away(q: &BigRational) -> BigInt {
    let half = BigRational::new(1.into(), 2.into());
    if q.is_negative() {
        -(-q + half).floor().to_integer()
    } else {
        (q + half).floor().to_integer()
    }
}

/// Textbook δ-LLL that recomputes Gram-Schmidt from scratch after every
/// basis change. Returns the reduced columns.
pub fn naive_lll(basis: &Basis, delta: &BigRational) -> Vec<Vec<BigInt>> {
    let mut b: Vec<Vec<BigInt>> = basis.columns().to_vec();
    let n = b.len();
    let half = BigRational::new(1.into(), 2.into());
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(&b);
            if mu[k][j].abs() > half {
                let q = round_half_away(&mu[k][j]);
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
            }
        }
        let (mu, norms) = gso(&b);
        let m = &mu[k][k - 1];
        if norms[k] >= (delta - m * m) * &norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

pub fn is_unit(x: &BigInt) -> bool {
    x.abs().is_one()
}
