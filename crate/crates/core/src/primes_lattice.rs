//! Factoring instance setup: modulus validation, lattice dimension, prime
//! basis, diagonal permutation and the rounded-log CVP instance.

use std::str::FromStr;
use std::sync::OnceLock;

use dashu_float::DBig;
use num_bigint::{BigInt, BigUint};
use num_prime::nt_funcs::{is_prime, nprimes};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::lattice::Basis;
use crate::rng::{stream_rng, Stream};

/// Decimal digits carried beyond the integer part of `10^c · ln x`.
const GUARD_DIGITS: usize = 24;
/// A value this close to a half-integer is recomputed at higher precision.
const TIE_MARGIN_DIGITS: usize = 12;
/// Precision ceiling for the tie escalation.
const MAX_LOG_DIGITS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct FactoringInstance {
    pub modulus: BigUint,
    /// Dimension multiplier `l ∈ {1, 2}`.
    pub l: u32,
    /// Precision parameter of the rounded-log row.
    pub c: f64,
    /// Number of primes used for smoothness tests of `u - vN`.
    pub smooth_bound: usize,
    pub seed: u64,
    pub diagonal_override: Option<Vec<i64>>,
}

impl FactoringInstance {
    pub fn new(modulus: BigUint, l: u32, c: f64, smooth_bound: usize) -> Self {
        FactoringInstance {
            modulus,
            l,
            c,
            smooth_bound,
            seed: 0,
            diagonal_override: None,
        }
    }

    /// Checks every instance invariant and returns the lattice dimension.
    pub fn validate(&self) -> Result<usize> {
        validate_modulus(&self.modulus)?;
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c = {} must be positive",
                self.c
            )));
        }
        let n = lattice_dimension(&self.modulus, self.l)?;
        if self.smooth_bound < n {
            return Err(Error::InvalidConfig(format!(
                "smooth bound {} is below the lattice dimension {n}",
                self.smooth_bound
            )));
        }
        if let Some(diag) = &self.diagonal_override {
            validate_diagonal(n, diag)?;
        }
        Ok(n)
    }
}

/// Rejects moduli the pipeline cannot meaningfully factor.
pub fn validate_modulus(modulus: &BigUint) -> Result<()> {
    if *modulus < BigUint::from(15u32) {
        return Err(Error::InstanceRejected(format!(
            "N = {modulus} is below 15"
        )));
    }
    if !modulus.bit(0) {
        return Err(Error::EvenModulus(modulus.to_string()));
    }
    if is_prime(modulus, None).probably() {
        return Err(Error::PrimeModulus(modulus.to_string()));
    }
    if let Some(p) = prime_power_base(modulus) {
        return Err(Error::PrimePower(modulus.to_string(), p.to_string()));
    }
    Ok(())
}

/// Returns `p` if `m = p^k` for a prime `p` and `k ≥ 2`.
fn prime_power_base(m: &BigUint) -> Option<BigUint> {
    let max_exp = m.bits() as u32;
    for k in 2..=max_exp {
        let r = m.nth_root(k);
        if r < BigUint::from(2u32) {
            break;
        }
        if num_traits::pow(r.clone(), k as usize) == *m && is_prime(&r, None).probably() {
            return Some(r);
        }
    }
    None
}

fn log2_big(m: &BigUint) -> f64 {
    let bits = m.bits();
    if bits <= 1000 {
        m.to_f64().map_or(f64::INFINITY, f64::log2)
    } else {
        let shift = bits - 64;
        let top = (m >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.log2() + shift as f64
    }
}

/// `n = ⌊l · log2 N / log2 log2 N⌋`, the lattice dimension and qubit count.
pub fn lattice_dimension(modulus: &BigUint, l: u32) -> Result<usize> {
    if !(l == 1 || l == 2) {
        return Err(Error::InvalidConfig(format!("l = {l} must be 1 or 2")));
    }
    if *modulus < BigUint::from(15u32) {
        return Err(Error::InstanceRejected(format!(
            "N = {modulus} is below 15"
        )));
    }
    let lg = log2_big(modulus);
    let n = (f64::from(l) * lg / lg.log2()).floor() as usize;
    if n < 2 {
        return Err(Error::InstanceRejected(format!(
            "N = {modulus} with l = {l} gives dimension {n} < 2"
        )));
    }
    Ok(n)
}

/// The first `n` primes; the sign element `-1` is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBasis {
    pub primes: Vec<u64>,
}

impl PrimeBasis {
    pub const SIGN_ELEMENT: i64 = -1;

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

pub fn first_primes(n: usize) -> PrimeBasis {
    PrimeBasis { primes: nprimes(n) }
}

/// The multiset `{⌊i/2⌉ : i = 1..n}` in ascending order, rounding half away
/// from zero.
pub fn diagonal_multiset(n: usize) -> Vec<i64> {
    (1..=n as i64).map(|i| (i + 1) / 2).collect()
}

fn validate_diagonal(n: usize, diag: &[i64]) -> Result<()> {
    let required = diagonal_multiset(n);
    let mut sorted = diag.to_vec();
    sorted.sort_unstable();
    if sorted != required {
        return Err(Error::InvalidOverride(diag.to_vec(), required));
    }
    Ok(())
}

/// Random arrangement of the diagonal multiset, drawn from the diagonal
/// stream of `seed` at position `round`. An override is validated and
/// returned verbatim.
pub fn diagonal_permutation(
    n: usize,
    seed: u64,
    round: u64,
    diagonal_override: Option<&[i64]>,
) -> Result<Vec<i64>> {
    if let Some(diag) = diagonal_override {
        validate_diagonal(n, diag)?;
        return Ok(diag.to_vec());
    }
    let mut diag = diagonal_multiset(n);
    diag.shuffle(&mut stream_rng(seed, Stream::Diagonal, round));
    Ok(diag)
}

fn dbig(s: &str, digits: usize) -> DBig {
    DBig::from_str(s)
        .expect("decimal literal")
        .with_precision(digits)
        .value()
}

/// Relative error bound of the `f64` evaluation of `10^c · ln x`, a wide
/// margin over the few ulps lost in `powf`, `ln` and the product.
const F64_RELATIVE_ERROR: f64 = 1e-13;

/// Evaluates `⌊10^c · ln x⌉` (half away from zero).
///
/// A double-precision estimate is accepted when it is farther from a
/// half-integer than its error bound. Otherwise the value is recomputed in
/// decimal arithmetic with [`GUARD_DIGITS`] beyond the integer part, and at
/// doubled precision while it stays within `10^-TIE_MARGIN_DIGITS` of a tie.
#[derive(Debug, Clone)]
pub struct ScaledLog {
    /// `c` at its shortest decimal representation, so `1.5` means `3/2`.
    exponent: String,
    scale_f64: f64,
    precision: usize,
    scale: OnceLock<DBig>,
}

fn scale_at(exponent: &str, digits: usize) -> DBig {
    (dbig(exponent, digits) * dbig("10", digits).ln()).exp()
}

impl ScaledLog {
    pub fn new(c: f64) -> Self {
        ScaledLog {
            exponent: format!("{c}"),
            scale_f64: 10f64.powf(c),
            // Integer digits of 10^c, plus room for ln x up to 10^8.
            precision: c.max(0.0).ceil() as usize + 9 + GUARD_DIGITS,
            scale: OnceLock::new(),
        }
    }

    pub fn round(&self, x: &BigUint) -> BigInt {
        if let Some(v) = self.round_f64(x) {
            return v;
        }
        self.round_decimal(x)
    }

    fn round_f64(&self, x: &BigUint) -> Option<BigInt> {
        let v = self.scale_f64 * x.to_f64()?.ln();
        if !v.is_finite() || v >= 2f64.powi(52) {
            return None;
        }
        let bound = v.abs() * F64_RELATIVE_ERROR + f64::EPSILON;
        let dist = (v.fract().abs() - 0.5).abs();
        (dist > bound).then(|| BigInt::from(v.round() as i64))
    }

    fn round_decimal(&self, x: &BigUint) -> BigInt {
        let s = x.to_string();
        let mut digits = self.precision.max(s.len() + GUARD_DIGITS);
        let mut scale = if digits == self.precision {
            self.scale
                .get_or_init(|| scale_at(&self.exponent, digits))
                .clone()
        } else {
            scale_at(&self.exponent, digits)
        };
        let margin = dbig(&format!("1e-{TIE_MARGIN_DIGITS}"), digits);
        let half = dbig("0.5", digits);
        let (lo, hi) = (&half - &margin, &half + &margin);
        loop {
            let v = &scale * dbig(&s, digits).ln();
            let frac = &v - v.floor();
            let near_tie = frac > lo && frac < hi;
            if !near_tie || digits >= MAX_LOG_DIGITS {
                // DBig rounds half away from zero.
                let int = v.round().to_int().value();
                return BigInt::from_str(&int.to_string()).expect("integer literal");
            }
            digits = (digits * 2).min(MAX_LOG_DIGITS);
            scale = scale_at(&self.exponent, digits);
        }
    }
}

/// Basis matrix (`n+1` rows, `n` columns) and target of the CVP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CvpInstance {
    pub basis: Basis,
    pub target: Vec<BigInt>,
    pub diagonal: Vec<i64>,
    pub c: f64,
}

pub fn build_cvp(
    modulus: &BigUint,
    c: f64,
    primes: &PrimeBasis,
    diagonal: &[i64],
) -> Result<CvpInstance> {
    let n = primes.len();
    if diagonal.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: diagonal.len(),
        });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidConfig(format!("c = {c} must be positive")));
    }
    if let Some(&bad) = diagonal.iter().find(|&&d| d <= 0) {
        return Err(Error::InvalidConfig(format!(
            "diagonal entry {bad} is not positive"
        )));
    }
    let logs = ScaledLog::new(c);
    let columns = primes
        .primes
        .iter()
        .zip(diagonal)
        .enumerate()
        .map(|(i, (&p, &f))| {
            let mut col = vec![BigInt::zero(); n + 1];
            col[i] = BigInt::from(f);
            col[n] = logs.round(&BigUint::from(p));
            col
        })
        .collect();
    let mut target = vec![BigInt::zero(); n + 1];
    target[n] = logs.round(modulus);
    Ok(CvpInstance {
        basis: Basis::from_columns(columns)?,
        target,
        diagonal: diagonal.to_vec(),
        c,
    })
}

impl CvpInstance {
    /// Checks the structural invariants of the instance.
    pub fn check(&self) -> bool {
        let n = self.basis.len();
        if self.basis.ambient_dim() != n + 1 || self.target.len() != n + 1 {
            return false;
        }
        let diag_ok = self.basis.columns().iter().enumerate().all(|(j, col)| {
            (0..n).all(|i| {
                if i == j {
                    col[i] == BigInt::from(self.diagonal[j]) && self.diagonal[j] > 0
                } else {
                    col[i].is_zero()
                }
            })
        });
        // A positive diagonal block already gives full column rank.
        diag_ok && self.target[..n].iter().all(Zero::is_zero)
    }
}
