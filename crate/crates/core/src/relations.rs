//! Lattice vectors to uv-pairs, and smooth relation detection.
//!
//! A lattice vector `b = Σ e_i b_i` of the prime lattice encodes the pair
//! `u = Π_{e_i>0} p_i^{e_i}`, `v = Π_{e_i<0} p_i^{−e_i}`. The pair is a
//! smooth relation when `u − vN` also splits over `{−1}` and the first
//! `smooth_bound` primes.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::Selection;
use crate::lattice::{BabaiResult, ReductionResult};
use crate::primes_lattice::PrimeBasis;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UvPair {
    pub u: BigUint,
    pub v: BigUint,
    /// Exponents over the lattice prime basis.
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothRelation {
    pub pair: UvPair,
    /// Slot 0 is the exponent of `−1`, slot `i` that of the `i`-th smooth
    /// prime.
    pub residue_exponents: Vec<u32>,
}

impl SmoothRelation {
    /// `u − vN` rebuilt from the stored factorization.
    pub fn residue(&self, smooth_primes: &[u64]) -> BigInt {
        let mut r = BigInt::one();
        for (&p, &k) in smooth_primes.iter().zip(&self.residue_exponents[1..]) {
            r *= num_traits::pow(BigInt::from(p), k as usize);
        }
        if self.residue_exponents[0] % 2 == 1 {
            -r
        } else {
            r
        }
    }
}

/// Recovers `e_i = vector_i / f(i)` from the diagonal rows.
pub fn extract_exponents(vector: &[BigInt], diagonal: &[i64]) -> Result<Vec<i64>> {
    let n = diagonal.len();
    if vector.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: vector.len(),
        });
    }
    vector[..n]
        .iter()
        .zip(diagonal)
        .enumerate()
        .map(|(i, (x, &f))| {
            let (q, r) = x.div_rem(&BigInt::from(f));
            if !r.is_zero() {
                return Err(Error::NotALatticeVector(format!(
                    "entry {i} = {x} is not divisible by the diagonal {f}"
                )));
            }
            q.to_i64()
                .ok_or_else(|| Error::Capacity(format!("exponent {q} does not fit in i64")))
        })
        .collect()
}

pub fn vector_to_uv(exponents: &[i64], primes: &PrimeBasis) -> Result<UvPair> {
    if exponents.len() != primes.len() {
        return Err(Error::DimensionMismatch {
            expected: primes.len(),
            found: exponents.len(),
        });
    }
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    for (&e, &p) in exponents.iter().zip(&primes.primes) {
        let k = e.unsigned_abs() as usize;
        if e > 0 {
            u *= num_traits::pow(BigUint::from(p), k);
        } else if e < 0 {
            v *= num_traits::pow(BigUint::from(p), k);
        }
    }
    Ok(UvPair {
        u,
        v,
        exponents: exponents.to_vec(),
    })
}

/// Trial division of `m` by `primes`; `None` when a cofactor remains.
pub fn smooth_factor(m: &BigUint, primes: &[u64]) -> Option<Vec<u32>> {
    if m.is_zero() {
        return None;
    }
    let mut rest = m.clone();
    let mut exps = vec![0u32; primes.len()];
    for (slot, &p) in exps.iter_mut().zip(primes) {
        if rest.is_one() {
            break;
        }
        let p = BigUint::from(p);
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            *slot += 1;
        }
    }
    rest.is_one().then_some(exps)
}

/// Tests whether `u − vN` splits over `{−1} ∪ smooth_primes`. A zero
/// residue is not a relation.
pub fn check_sr_pair(
    pair: &UvPair,
    modulus: &BigUint,
    smooth_primes: &[u64],
) -> Option<SmoothRelation> {
    let residue =
        BigInt::from(pair.u.clone()) - BigInt::from(pair.v.clone()) * BigInt::from(modulus.clone());
    let (sign, magnitude) = residue.into_parts();
    if sign == Sign::NoSign {
        return None;
    }
    let exps = smooth_factor(&magnitude, smooth_primes)?;
    let mut residue_exponents = Vec::with_capacity(exps.len() + 1);
    residue_exponents.push(u32::from(sign == Sign::Minus));
    residue_exponents.extend(exps);
    Some(SmoothRelation {
        pair: pair.clone(),
        residue_exponents,
    })
}

/// A lattice point visited around the Babai point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub selection: Selection,
    /// `b_h = b_op + Σ x_i b_i` over the reduced basis.
    pub vector: Vec<BigInt>,
    pub pair: UvPair,
}

/// Builds `b_h` for every selection and maps it to its uv-pair.
///
/// Exponents are derived twice, through the transform (original-basis
/// coefficients of `b_op` plus `U·x`) and by dividing the diagonal rows of
/// `b_h`; any disagreement is reported as an inconsistency.
pub fn candidate_pairs(
    babai: &BabaiResult,
    selections: &[Selection],
    reduction: &ReductionResult,
    diagonal: &[i64],
    primes: &PrimeBasis,
) -> Result<Vec<Candidate>> {
    let n = reduction.reduced.len();
    selections
        .par_iter()
        .map(|sel| {
            if sel.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: sel.len(),
                });
            }
            let mut vector = babai.b_op.clone();
            let mut coeffs = babai.coeffs_original.clone();
            for (j, &bit) in sel.0.iter().enumerate() {
                if !bit {
                    continue;
                }
                for (x, c) in vector.iter_mut().zip(reduction.reduced.column(j)) {
                    *x += c;
                }
                for (i, c) in coeffs.iter_mut().enumerate() {
                    *c += &reduction.transform[i][j];
                }
            }
            let from_diagonal = extract_exponents(&vector, diagonal)
                .map_err(|e| Error::Inconsistency(format!("selection {sel}: {e}")))?;
            let via_transform: Option<Vec<i64>> = coeffs.iter().map(ToPrimitive::to_i64).collect();
            if via_transform.as_deref() != Some(&from_diagonal[..]) {
                return Err(Error::Inconsistency(format!(
                    "selection {sel}: transform gives {coeffs:?}, diagonal gives {from_diagonal:?}"
                )));
            }
            let pair = vector_to_uv(&from_diagonal, primes)?;
            Ok(Candidate {
                selection: sel.clone(),
                vector,
                pair,
            })
        })
        .collect()
}

/// Smooth relations among the candidates of `selections`, deduplicated by
/// `(u, v)` and kept in selection order.
pub fn collect_candidates(
    babai: &BabaiResult,
    selections: &[Selection],
    reduction: &ReductionResult,
    diagonal: &[i64],
    primes: &PrimeBasis,
    modulus: &BigUint,
    smooth_primes: &[u64],
) -> Result<Vec<SmoothRelation>> {
    let candidates = candidate_pairs(babai, selections, reduction, diagonal, primes)?;
    let mut seen = HashSet::new();
    Ok(candidates
        .into_iter()
        .filter_map(|c| check_sr_pair(&c.pair, modulus, smooth_primes))
        .filter(|r| seen.insert((r.pair.u.clone(), r.pair.v.clone())))
        .collect())
}
