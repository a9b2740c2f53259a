//! Combining smooth relations into a congruence of squares.
//!
//! Each relation `(u_j, v_j)` gives `u_j ≡ u_j − v_j N (mod N)`. Over a
//! subset `S` where, prime by prime, the exponent of `u_j` plus the exponent
//! of `u_j − v_j N` sums to an even number (the `−1` row included), the
//! products `U = Π u_j` and `W = Π (u_j − v_j N)` satisfy `U·W = Z²` and
//! `U² ≡ Z² (mod N)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::relations::SmoothRelation;

/// Parity matrix: row 0 is the sign, row `i` the `i`-th smooth prime; one
/// column per relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    rows: Vec<Vec<bool>>,
    n_cols: usize,
}

impl RelationMatrix {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                found: bad.len(),
            });
        }
        Ok(RelationMatrix { rows, n_cols })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r[col]).collect()
    }

    /// `M·t mod 2`.
    pub fn apply(&self, t: &[bool]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(t).filter(|(&a, &b)| a && b).count() % 2 == 1)
            .collect()
    }
}

pub fn build_system(relations: &[SmoothRelation], smooth_primes: &[u64]) -> Result<RelationMatrix> {
    let n_rows = smooth_primes.len() + 1;
    let mut rows = vec![vec![false; relations.len()]; n_rows];
    for (j, rel) in relations.iter().enumerate() {
        if rel.residue_exponents.len() != n_rows {
            return Err(Error::DimensionMismatch {
                expected: n_rows,
                found: rel.residue_exponents.len(),
            });
        }
        if rel.pair.exponents.len() > smooth_primes.len() {
            return Err(Error::DimensionMismatch {
                expected: smooth_primes.len(),
                found: rel.pair.exponents.len(),
            });
        }
        for (i, row) in rows.iter_mut().enumerate() {
            // u carries no sign; its primes are the leading smooth primes.
            let from_u = match i {
                0 => 0,
                _ => rel
                    .pair
                    .exponents
                    .get(i - 1)
                    .map_or(0, |&e| e.max(0) as u64),
            };
            row[j] = (from_u + u64::from(rel.residue_exponents[i])) % 2 == 1;
        }
    }
    RelationMatrix::from_rows(rows)
}

/// Basis of the right nullspace over GF(2). Elimination takes, for each
/// column, the first remaining row with a one as pivot; basis vectors are
/// listed by free column.
pub fn nullspace_gf2(matrix: &RelationMatrix) -> Vec<Vec<bool>> {
    let mut m = matrix.rows.clone();
    let cols = matrix.n_cols;
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    (0..cols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut t = vec![false; cols];
            t[free] = true;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                t[pc] = m[row][free];
            }
            t
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorStatus {
    Found,
    AllTrivial,
    NoSolution,
}

impl FactorStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactorStatus::Found => "found",
            FactorStatus::AllTrivial => "all-trivial",
            FactorStatus::NoSolution => "no-solution",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Relation indices in the subset.
    pub subset: Vec<usize>,
    pub u: BigUint,
    pub w: BigUint,
    pub z: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorResult {
    pub status: FactorStatus,
    /// `(p, q)` with `p ≤ q` and `p·q = N`.
    pub factors: Option<(BigUint, BigUint)>,
    pub certificate: Option<Certificate>,
}

impl FactorResult {
    pub fn no_solution() -> Self {
        FactorResult {
            status: FactorStatus::NoSolution,
            factors: None,
            certificate: None,
        }
    }
}

/// Orders a nontrivial divisor and its cofactor, verifying the product.
pub fn split(modulus: &BigUint, d: &BigUint) -> Option<(BigUint, BigUint)> {
    if d.is_one() || d.is_zero() || d >= modulus {
        return None;
    }
    let (q, r) = modulus.div_rem(d);
    if !r.is_zero() {
        return None;
    }
    let (p, q) = if *d <= q {
        (d.clone(), q)
    } else {
        (q, d.clone())
    };
    (&p * &q == *modulus).then_some((p, q))
}

pub fn extract_factors(
    selection: &[bool],
    relations: &[SmoothRelation],
    modulus: &BigUint,
) -> Result<FactorResult> {
    if selection.len() != relations.len() {
        return Err(Error::DimensionMismatch {
            expected: relations.len(),
            found: selection.len(),
        });
    }
    let n_int = BigInt::from(modulus.clone());
    let subset: Vec<usize> = (0..relations.len()).filter(|&j| selection[j]).collect();
    let mut u = BigUint::one();
    let mut w = BigInt::one();
    for &j in &subset {
        let pair = &relations[j].pair;
        u *= &pair.u;
        w *= BigInt::from(pair.u.clone()) - BigInt::from(pair.v.clone()) * &n_int;
    }
    if !w.is_positive() {
        return Err(Error::Inconsistency(format!(
            "product of residues {w} is not positive; sign row is odd"
        )));
    }
    let w = w.to_biguint().expect("positive");
    let uw = &u * &w;
    let z = uw.sqrt();
    if &z * &z != uw {
        return Err(Error::Inconsistency(format!(
            "U·W = {uw} is not a perfect square"
        )));
    }
    let certificate = Certificate {
        subset,
        u: u.clone(),
        w,
        z: z.clone(),
    };
    let u_mod = &u % modulus;
    let z_mod = &z % modulus;
    let minus = (BigInt::from(u_mod.clone()) - BigInt::from(z_mod.clone())).mod_floor(&n_int);
    let plus = (&u_mod + &z_mod) % modulus;
    let candidates = [
        minus.to_biguint().expect("reduced mod N").gcd(modulus),
        plus.gcd(modulus),
    ];
    let factors = candidates.iter().find_map(|d| split(modulus, d));
    Ok(FactorResult {
        status: if factors.is_some() {
            FactorStatus::Found
        } else {
            FactorStatus::AllTrivial
        },
        factors,
        certificate: Some(certificate),
    })
}

/// Full GF(2) stage: build the system, walk the nullspace basis in order and
/// return the first nontrivial split.
pub fn factor_relations(
    relations: &[SmoothRelation],
    modulus: &BigUint,
    smooth_primes: &[u64],
) -> Result<FactorResult> {
    if relations.is_empty() {
        return Ok(FactorResult::no_solution());
    }
    let matrix = build_system(relations, smooth_primes)?;
    let kernel = nullspace_gf2(&matrix);
    let mut last = None;
    for t in &kernel {
        if matrix.apply(t).iter().any(|&b| b) {
            return Err(Error::Inconsistency(
                "nullspace vector fails recheck".into(),
            ));
        }
        let result = extract_factors(t, relations, modulus)?;
        if result.status == FactorStatus::Found {
            return Ok(result);
        }
        last = Some(result);
    }
    Ok(last.unwrap_or_else(FactorResult::no_solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes_lattice::first_primes;
    use crate::relations::{check_sr_pair, vector_to_uv, UvPair};

    fn relation_2025() -> (SmoothRelation, Vec<u64>) {
        let sb = first_primes(15).primes;
        let pair = vector_to_uv(&[0, 4, 2], &first_primes(3)).unwrap();
        (
            check_sr_pair(&pair, &BigUint::from(1961u32), &sb).unwrap(),
            sb,
        )
    }

    #[test]
    fn single_relation_gives_even_column() {
        let (rel, sb) = relation_2025();
        let m = build_system(&[rel.clone(), rel], &sb).unwrap();
        assert_eq!(m.n_rows(), 16);
        assert_eq!(m.n_cols(), 2);
        assert!(m.column(0).iter().all(|&b| !b));
        assert_eq!(m.column(0), m.column(1));
    }

    #[test]
    fn nullspace_small_cases() {
        let zero = RelationMatrix::from_rows(vec![vec![false]; 3]).unwrap();
        assert_eq!(nullspace_gf2(&zero), vec![vec![true]]);
        let id = RelationMatrix::from_rows(vec![vec![true, false], vec![false, true]]).unwrap();
        assert!(nullspace_gf2(&id).is_empty());
        let m = RelationMatrix::from_rows(vec![
            vec![false, false, true, false],
            vec![true, true, false, false],
            vec![false, false, true, false],
        ])
        .unwrap();
        let k = nullspace_gf2(&m);
        assert_eq!(k.len(), 2);
        for t in &k {
            assert!(m.apply(t).iter().all(|&b| !b));
        }
    }

    #[test]
    fn congruence_for_2025() {
        let (rel, _) = relation_2025();
        let n = BigUint::from(1961u32);
        let r = extract_factors(&[true], &[rel], &n).unwrap();
        assert_eq!(r.status, FactorStatus::Found);
        let c = r.certificate.unwrap();
        assert_eq!(c.u, BigUint::from(2025u32));
        assert_eq!(c.w, BigUint::from(64u32));
        assert_eq!(c.z, BigUint::from(360u32));
        assert_eq!(
            r.factors,
            Some((BigUint::from(37u32), BigUint::from(53u32)))
        );
    }

    #[test]
    fn degenerate_congruence_is_trivial() {
        // v = 0 makes the residue equal to u, so Z = U.
        let n = BigUint::from(15u32);
        let sb = first_primes(3).primes;
        let pair = UvPair {
            u: BigUint::from(4u32),
            v: BigUint::from(0u32),
            exponents: vec![2, 0, 0],
        };
        let rel = check_sr_pair(&pair, &n, &sb).unwrap();
        let r = extract_factors(&[true], &[rel], &n).unwrap();
        assert_eq!(r.status, FactorStatus::AllTrivial);
        assert!(r.factors.is_none());
    }

    #[test]
    fn odd_certificate_is_an_inconsistency() {
        let sb = first_primes(15).primes;
        let pair = UvPair {
            u: BigUint::from(1800u32),
            v: BigUint::one(),
            exponents: vec![3, 2, 2],
        };
        let rel = check_sr_pair(&pair, &BigUint::from(1961u32), &sb).unwrap();
        assert!(matches!(
            extract_factors(&[true], &[rel], &BigUint::from(1961u32)),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn factor_relations_end_to_end() {
        let (rel, sb) = relation_2025();
        let n = BigUint::from(1961u32);
        let r = factor_relations(&[rel], &n, &sb).unwrap();
        assert_eq!(r.status, FactorStatus::Found);
        assert_eq!(
            factor_relations(&[], &n, &sb).unwrap().status,
            FactorStatus::NoSolution
        );
    }

    #[test]
    fn split_checks_divisibility() {
        let n = BigUint::from(1961u32);
        assert_eq!(
            split(&n, &BigUint::from(53u32)),
            Some((BigUint::from(37u32), BigUint::from(53u32)))
        );
        assert_eq!(split(&n, &BigUint::one()), None);
        assert_eq!(split(&n, &n), None);
        assert_eq!(split(&n, &BigUint::from(7u32)), None);
    }
}
