//! QUBO cost around the Babai point and its diagonal Hamiltonian.
//!
//! For a bitstring `x = (x_1, …, x_n)` the cost is
//! `F(x) = ‖t − b_op − Σ x_i b_i‖²` over the reduced basis columns `b_i`.
//! The operator form replaces each `x_i` with `(σ_z^i + I)/2`; since it is
//! built from `σ_z` and `I` only it is diagonal in the computational basis,
//! so it is stored as its `2^n` energy table and nothing else.
//!
//! Labeling: the basis state labeled by `x` carries energy `F(x)`, and `x`
//! maps to table index `Σ x_i · 2^(n−i)` (`x_1` is the most significant
//! bit). Whether `σ_z|0⟩ = +|0⟩` or `−|0⟩` only changes which physical state
//! gets the label, never the energies.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{norm_sq, BabaiResult, Basis};

/// Largest qubit count for which the energy table is materialized.
pub const MAX_QUBITS: usize = 20;

/// A bitstring `x_1 … x_n`, printed left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection(pub Vec<bool>);

impl Selection {
    pub fn zeros(n: usize) -> Self {
        Selection(vec![false; n])
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Selection((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Spin values `z_i = 2x_i − 1`.
    pub fn spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidConfig(format!("bad bitstring {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Selection)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuboProblem {
    pub b_op: Vec<BigInt>,
    pub basis_columns: Vec<Vec<BigInt>>,
    pub target: Vec<BigInt>,
}

impl QuboProblem {
    pub fn new(b_op: Vec<BigInt>, basis: &Basis, target: Vec<BigInt>) -> Result<Self> {
        let m = basis.ambient_dim();
        for len in [b_op.len(), target.len()] {
            if len != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: len,
                });
            }
        }
        Ok(QuboProblem {
            b_op,
            basis_columns: basis.columns().to_vec(),
            target,
        })
    }

    pub fn from_babai(babai: &BabaiResult, reduced: &Basis, target: &[BigInt]) -> Result<Self> {
        Self::new(babai.b_op.clone(), reduced, target.to_vec())
    }

    pub fn n_qubits(&self) -> usize {
        self.basis_columns.len()
    }

    /// `t − b_op`.
    fn base_residual(&self) -> Vec<BigInt> {
        self.target
            .iter()
            .zip(&self.b_op)
            .map(|(t, b)| t - b)
            .collect()
    }

    /// `F(x) = ‖t − b_op − Σ x_i b_i‖²` in exact integers.
    pub fn cost(&self, x: &Selection) -> Result<BigUint> {
        if x.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: x.len(),
            });
        }
        let mut r = self.base_residual();
        for (&bit, col) in x.0.iter().zip(&self.basis_columns) {
            if bit {
                for (ri, c) in r.iter_mut().zip(col) {
                    *ri -= c;
                }
            }
        }
        Ok(norm_sq(&r)
            .to_biguint()
            .expect("squared norm is nonnegative"))
    }

    /// The same cost written over spins `z_i ∈ {−1, +1}` with
    /// `x_i = (z_i + 1)/2`.
    pub fn spin_cost(&self, z: &[i8]) -> Result<BigRational> {
        if z.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: z.len(),
            });
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut r: Vec<BigRational> = self
            .base_residual()
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for (&zi, col) in z.iter().zip(&self.basis_columns) {
            let x = (BigRational::from_integer(zi.into()) + BigRational::from_integer(1.into()))
                * &half;
            for (ri, c) in r.iter_mut().zip(col) {
                *ri = &*ri - &x * BigRational::from_integer(c.clone());
            }
        }
        Ok(r.iter().fold(BigRational::zero(), |acc, v| acc + v * v))
    }
}

/// Convenience wrapper over [`QuboProblem::cost`].
pub fn cost_function(problem: &QuboProblem, x: &Selection) -> Result<BigUint> {
    problem.cost(x)
}

/// The Hamiltonian's diagonal: `energies[index(x)] = F(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    energies: Vec<BigUint>,
}

impl DiagonalHamiltonian {
    pub fn from_energies(energies: Vec<BigUint>) -> Result<Self> {
        let len = energies.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "energy table length {len} is not a positive power of two"
            )));
        }
        Ok(DiagonalHamiltonian {
            n_qubits: len.trailing_zeros() as usize,
            energies,
        })
    }

    pub fn from_u64(energies: &[u64]) -> Result<Self> {
        Self::from_energies(energies.iter().map(|&e| BigUint::from(e)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[BigUint] {
        &self.energies
    }

    pub fn energy(&self, x: &Selection) -> &BigUint {
        &self.energies[x.index()]
    }

    /// Energies as floating values, for expectation evaluation.
    pub fn real_energies<T: crate::RealScalar>(&self) -> Vec<T> {
        self.energies
            .iter()
            .map(|e| T::from_f64(e.to_f64().unwrap_or(f64::INFINITY)).expect("finite"))
            .collect()
    }

    pub fn describe_convention(&self) -> &'static str {
        "index = sum x_i * 2^(n-i), x_1 most significant"
    }
}

pub fn build_hamiltonian(problem: &QuboProblem) -> Result<DiagonalHamiltonian> {
    let n = problem.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "{n} qubits exceeds the {MAX_QUBITS}-qubit energy table limit"
        )));
    }
    let energies = (0..1usize << n)
        .map(|idx| problem.cost(&Selection::from_index(idx, n)))
        .collect::<Result<Vec<_>>>()?;
    DiagonalHamiltonian::from_energies(energies)
}

/// Minimal-energy bitstring; ties go to the smallest index.
pub fn exact_ground_state(h: &DiagonalHamiltonian) -> (Selection, BigUint) {
    let (idx, e) = h
        .energies
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.cmp(b).then(i.cmp(j)))
        .expect("table is nonempty");
    (Selection::from_index(idx, h.n_qubits), e.clone())
}
