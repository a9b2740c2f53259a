//! Integer factoring through smooth relations found near a lattice closest
//! vector, with a simulated variational eigensolver refining the Babai
//! approximation.
//!
//! Stages, in pipeline order:
//!
//! * [`primes_lattice`] builds the rounded-log CVP instance for `N`.
//! * [`lattice`] reduces it (δ-LLL, exact) and runs Babai's nearest plane.
//! * [`ising`] turns the neighbourhood of the Babai point into a diagonal
//!   Hamiltonian over `n` qubits.
//! * [`vqe`] minimises it with a state-vector VQE simulation.
//! * [`relations`] maps the selected lattice points to uv-pairs and keeps
//!   the smooth relations.
//! * [`gf2`] combines relations into a congruence of squares.
//!
//! [`pipeline`] wires them together and [`fixture`] handles the JSON
//! interchange format.
//!
//! ```
//! use num_bigint::BigUint;
//! use schnorr_vqe::pipeline::{run_pipeline, RunConfig, SelectionMode, Solver};
//! use schnorr_vqe::primes_lattice::FactoringInstance;
//!
//! let instance = FactoringInstance::new(BigUint::from(15u32), 2, 1.5, 3);
//! let config = RunConfig {
//!     solver: Solver::Exact,
//!     selection: SelectionMode::Exhaustive,
//!     max_rounds: 10,
//!     ..RunConfig::new(instance)
//! };
//! let report = run_pipeline(&config)?;
//! assert_eq!(report.factors, Some((BigUint::from(3u32), BigUint::from(5u32))));
//! # Ok::<(), schnorr_vqe::Error>(())
//! ```

pub mod error;
pub mod fixture;
pub mod gf2;
pub mod ising;
pub mod lattice;
pub mod pipeline;
pub mod primes_lattice;
pub mod relations;
pub mod rng;
pub mod scalar;
pub mod vqe;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, RealScalar};

/// Exact scalar used by default for all lattice arithmetic.
pub type Rational = num_rational::BigRational;

/// Gram-Schmidt data over [`Rational`].
pub type GramSchmidt = lattice::GramSchmidtData<Rational>;

/// Double-precision state vector.
pub type StateVector = vqe::StateVector<f64>;

/// Double-precision VQE outcome.
pub type VqeOutcome = vqe::VqeOutcome<f64>;
