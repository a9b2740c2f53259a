//! State-vector simulation of a variational quantum eigensolver over a
//! [`DiagonalHamiltonian`].
//!
//! The ansatz is a hardware-efficient circuit: a layer of `R_y` rotations,
//! then `depth` blocks of (CNOT chain, `R_y` layer). Every gate is real, so
//! amplitudes stay real, but they are kept complex to match the usual
//! simulator layout. Parameters are tuned by Nelder-Mead with random
//! restarts.

use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{exact_ground_state, DiagonalHamiltonian, Selection};
use crate::rng::{stream_rng, Stream};
use crate::scalar::RealScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: RealScalar> StateVector<T> {
    /// `|00…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); 1 << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    /// Equal superposition over all basis states.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = T::one() / T::from_usize(dim).unwrap().sqrt();
        StateVector {
            n_qubits,
            amplitudes: vec![Complex::new(a, T::zero()); dim],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "state dimension {dim} is not a power of two"
            )));
        }
        Ok(StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// `|a_x|²` for every basis index.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mask of qubit `q`; qubit 0 is the most significant bit.
    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    pub fn apply_ry(&mut self, q: usize, theta: T) {
        let two = T::one() + T::one();
        let (s, c) = (theta / two).sin_cos();
        let m = self.mask(q);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | m];
                self.amplitudes[i] = a0.scale(c) - a1.scale(s);
                self.amplitudes[i | m] = a0.scale(s) + a1.scale(c);
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let mc = self.mask(control);
        let mt = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amplitudes.swap(i, i | mt);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    pub n_qubits: usize,
    pub depth: usize,
}

impl Ansatz {
    pub fn new(n_qubits: usize, depth: usize) -> Self {
        Ansatz { n_qubits, depth }
    }

    pub fn parameter_count(&self) -> usize {
        self.n_qubits * (self.depth + 1)
    }
}

/// Prepares the ansatz state from `|0…0⟩`. Parameter `layer·n + q` drives
/// the rotation of qubit `q` in rotation layer `layer`.
pub fn apply_ansatz<T: RealScalar>(ansatz: &Ansatz, params: &[T]) -> Result<StateVector<T>> {
    if params.len() != ansatz.parameter_count() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.parameter_count(),
            found: params.len(),
        });
    }
    let n = ansatz.n_qubits;
    let mut state = StateVector::zero_state(n);
    for layer in 0..=ansatz.depth {
        if layer > 0 {
            for q in 0..n.saturating_sub(1) {
                state.apply_cnot(q, q + 1);
            }
        }
        for q in 0..n {
            state.apply_ry(q, params[layer * n + q]);
        }
    }
    Ok(state)
}

/// `Σ_x |a_x|² · E_x`.
pub fn expectation<T: RealScalar>(state: &StateVector<T>, h: &DiagonalHamiltonian) -> Result<T> {
    if state.amplitudes.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: state.amplitudes.len(),
        });
    }
    Ok(expectation_with(state, &h.real_energies::<T>()))
}

fn expectation_with<T: RealScalar>(state: &StateVector<T>, energies: &[T]) -> T {
    state
        .amplitudes
        .iter()
        .zip(energies)
        .fold(T::zero(), |acc, (a, &e)| acc + a.norm_sqr() * e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub depth: usize,
    /// Nelder-Mead iterations per restart.
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Convergence threshold on the spread of simplex values.
    pub tolerance: f64,
    /// Estimate the reported probabilities from this many samples instead of
    /// using exact ones.
    pub shots: Option<u64>,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            depth: 2,
            max_iterations: 500,
            restarts: 5,
            seed: 0,
            tolerance: 1e-8,
            shots: None,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations and restarts must be positive".into(),
            ));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidConfig("shots must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartLog {
    pub restart: u64,
    pub final_expectation: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeOutcome<T> {
    pub best_params: Vec<T>,
    pub best_expectation: T,
    /// Indexed by bitstring index.
    pub probabilities: Vec<T>,
    pub argmax_bitstring: Selection,
    pub per_restart_log: Vec<RestartLog>,
    /// Whether the winning restart met the tolerance.
    pub converged: bool,
    /// Lowest expectation seen at any evaluated parameter vector.
    pub min_evaluated: T,
}

impl<T: RealScalar> VqeOutcome<T> {
    pub fn n_qubits(&self) -> usize {
        self.probabilities.len().trailing_zeros() as usize
    }

    pub fn probability_table(&self) -> Vec<(Selection, T)> {
        let n = self.n_qubits();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (Selection::from_index(i, n), p))
            .collect()
    }
}

struct Minimum<T> {
    point: Vec<T>,
    value: T,
    iterations: usize,
    converged: bool,
    lowest_seen: T,
}

/// Nelder-Mead simplex minimisation with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
fn nelder_mead<T, F>(f: F, start: &[T], step: T, max_iterations: usize, tolerance: T) -> Minimum<T>
where
    T: RealScalar,
    F: Fn(&[T]) -> T,
{
    let dim = start.len();
    let half = T::from_f64(0.5).unwrap();
    let two = T::from_f64(2.0).unwrap();
    let mut lowest = T::infinity();
    let mut eval = |x: &[T]| {
        let v = f(x);
        if v < lowest {
            lowest = v;
        }
        v
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] = p[i] + step;
        let v = eval(&p);
        simplex.push((p, v));
    }
    if dim == 0 {
        let (point, value) = simplex.pop().unwrap();
        return Minimum {
            point,
            value,
            iterations: 0,
            converged: true,
            lowest_seen: lowest,
        };
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        // Stable sort keeps earlier vertices first on ties.
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if simplex[dim].1 - simplex[0].1 <= tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![T::zero(); dim];
        for (p, _) in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(p) {
                *c = *c + x;
            }
        }
        let count = T::from_usize(dim).unwrap();
        for c in centroid.iter_mut() {
            *c = *c / count;
        }
        let along = |coef: T, from: &[T]| -> Vec<T> {
            centroid
                .iter()
                .zip(from)
                .map(|(&c, &w)| c + coef * (c - w))
                .collect()
        };

        let worst = simplex[dim].0.clone();
        let reflected = along(T::one(), &worst);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(two, &worst);
            let fe = eval(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[dim].1 {
                let p = along(half, &worst);
                let v = eval(&p);
                (p, v)
            } else {
                let p = along(-half, &worst);
                let v = eval(&p);
                (p, v)
            };
            if fc < fr.min(simplex[dim].1) {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let p: Vec<T> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(&b, &x)| b + half * (x - b))
                        .collect();
                    let v = eval(&p);
                    *vertex = (p, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (point, value) = simplex.swap_remove(0);
    Minimum {
        point,
        value,
        iterations,
        converged,
        lowest_seen: lowest,
    }
}

/// Index of the largest probability, ties to the smallest index.
fn argmax<T: RealScalar>(probs: &[T]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Runs `config.restarts` independent Nelder-Mead searches from random
/// parameters in `[−π, π]` and keeps the lowest final expectation (ties to
/// the lowest restart index). Restarts run in parallel; each draws from its
/// own seed stream, so the result equals the sequential one.
pub fn optimize<T: RealScalar>(
    h: &DiagonalHamiltonian,
    config: &VqeConfig,
) -> Result<VqeOutcome<T>> {
    config.validate()?;
    let ansatz = Ansatz::new(h.n_qubits(), config.depth);
    let energies = h.real_energies::<T>();
    let ground = T::from_f64(exact_ground_state(h).1.to_f64().unwrap_or(f64::INFINITY)).unwrap();
    let tol = T::from_f64(config.tolerance).unwrap();
    let step = T::FRAC_PI_2();

    let runs: Vec<Minimum<T>> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, Stream::Vqe, r);
            let start: Vec<T> = (0..ansatz.parameter_count())
                .map(|_| {
                    T::from_f64(rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI))
                        .unwrap()
                })
                .collect();
            let objective = |p: &[T]| {
                let state = apply_ansatz(&ansatz, p).expect("parameter count is fixed");
                expectation_with(&state, &energies)
            };
            nelder_mead(objective, &start, step, config.max_iterations, tol)
        })
        .collect();

    let per_restart_log = runs
        .iter()
        .enumerate()
        .map(|(r, m)| RestartLog {
            restart: r as u64,
            final_expectation: m.value.to_f64().unwrap_or(f64::NAN),
            iterations: m.iterations,
            converged: m.converged,
        })
        .collect();
    let min_evaluated = runs
        .iter()
        .fold(T::infinity(), |acc, m| acc.min(m.lowest_seen));
    // Rounding in the state preparation and the 2^n-term sum scales with
    // the largest energy and the machine epsilon of T.
    let scale = energies.iter().fold(T::one(), |acc, e| acc.max(e.abs()));
    let slack = T::epsilon() * T::from_usize(16 * h.dim()).unwrap() * scale;
    if min_evaluated < ground - slack {
        return Err(Error::Inconsistency(format!(
            "expectation {min_evaluated:?} fell below the ground energy {ground:?}"
        )));
    }
    let mut best = 0;
    for (i, m) in runs.iter().enumerate() {
        if m.value < runs[best].value {
            best = i;
        }
    }
    let winner = &runs[best];
    let state = apply_ansatz(&ansatz, &winner.point)?;
    let probabilities = match config.shots {
        None => state.probabilities(),
        Some(shots) => sample_probabilities(&state, shots, config.seed)?,
    };
    let argmax_bitstring = Selection::from_index(argmax(&probabilities), h.n_qubits());
    Ok(VqeOutcome {
        best_params: winner.point.clone(),
        best_expectation: winner.value,
        probabilities,
        argmax_bitstring,
        per_restart_log,
        converged: winner.converged,
        min_evaluated,
    })
}

/// Empirical distribution from `shots` measurements of `state`.
fn sample_probabilities<T: RealScalar>(
    state: &StateVector<T>,
    shots: u64,
    seed: u64,
) -> Result<Vec<T>> {
    let weights: Vec<f64> = state
        .probabilities()
        .iter()
        .map(|p| p.to_f64().unwrap_or(0.0).max(0.0))
        .collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::Inconsistency(format!("cannot sample state: {e}")))?;
    let mut rng = stream_rng(seed, Stream::Shots, 0);
    let mut counts = vec![0u64; weights.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    let total = T::from_u64(shots).unwrap();
    Ok(counts
        .into_iter()
        .map(|c| T::from_u64(c).unwrap() / total)
        .collect())
}

/// One line of the Selection / Value / Probability table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub selection: String,
    pub value: String,
    pub probability: f64,
}

/// Rows sorted by descending probability, ties by bitstring index, with
/// probabilities rounded to `decimals` places.
pub fn report_table<T: RealScalar>(
    outcome: &VqeOutcome<T>,
    h: &DiagonalHamiltonian,
    decimals: u32,
) -> Vec<ReportRow> {
    let scale = 10f64.powi(decimals as i32);
    let mut rows: Vec<(usize, f64)> = outcome
        .probabilities
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.to_f64().unwrap_or(0.0)))
        .collect();
    rows.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    rows.into_iter()
        .map(|(i, p)| ReportRow {
            selection: Selection::from_index(i, h.n_qubits()).to_string(),
            value: h.energies()[i].to_string(),
            probability: (p * scale).round() / scale,
        })
        .collect()
}

pub fn render_table(rows: &[ReportRow]) -> String {
    let mut out = String::from("Selection | Value | Probability\n");
    for r in rows {
        out.push_str(&format!(
            "[{}] | {} | {}\n",
            r.selection,
            r.value,
            fmt_prob(r.probability)
        ));
    }
    out
}

fn fmt_prob(p: f64) -> String {
    let s = format!("{p}");
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{s}.0")
    }
}
