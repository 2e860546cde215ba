//! Density-matrix simulation of Grover search under Markov-correlated local
//! unitary noise.
//!
//! The noise is modelled by a walker qubit that selects, at every step,
//! either the ideal Grover operator `G` or a noisy one `G' = chi G`. The
//! walker ⊗ register dynamics is a collision model with two fresh ancilla
//! qubits per step; tracing out the walker gives non-Markovian register
//! dynamics that the [`measures`] module quantifies.
//!
//! Everything is generic over the scalar type ([`scalar::Real`], `f32` or
//! `f64`); the aliases below fix `f64`.
//!
//! ```
//! use grover_noise::{GroverInstance, MarkovNoiseParams, NoiseSpec, SingleQubitUnitary};
//! use grover_noise::markov::{markov_evolve, EvolveOptions};
//!
//! let inst = GroverInstance::with_qubits(4).unwrap();
//! let spec = NoiseSpec::prefix(SingleQubitUnitary::pauli_x(), 1, 4).unwrap();
//! let params = MarkovNoiseParams::new(0.2, 0.5).unwrap();
//! let trace = markov_evolve(&inst, &spec, &params, 5, EvolveOptions::default()).unwrap();
//! assert_eq!(trace.success_series().len(), 6);
//! ```

pub mod collision;
pub mod error;
pub mod grover;
pub mod markov;
pub mod measures;
pub mod noise;
pub mod quantum_core;
pub mod scalar;

pub use error::{Error, Result};
pub use grover::GroverInstance;

/// Complex matrix over `f64`.
pub type Matrix = quantum_core::ComplexMatrix<f64>;
pub type Density = quantum_core::DensityMatrix<f64>;
pub type State = quantum_core::PureState<f64>;
pub type Hermitian = quantum_core::HermitianOperator<f64>;
pub type SingleQubitUnitary = noise::SingleQubitUnitary<f64>;
pub type NoiseSpec = noise::NoiseSpec<f64>;
pub type MarkovNoiseParams = markov::MarkovNoiseParams<f64>;
pub type ThermalBathParams = collision::ThermalBathParams<f64>;
pub type KrausSet = collision::KrausSet<f64>;
pub type DilationUnitary = collision::DilationUnitary<f64>;
pub type EvolutionTrace = markov::EvolutionTrace<f64>;
pub type MeasureResult = measures::MeasureResult<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type Matrix = crate::quantum_core::ComplexMatrix<f32>;
    pub type Density = crate::quantum_core::DensityMatrix<f32>;
    pub type State = crate::quantum_core::PureState<f32>;
    pub type NoiseSpec = crate::noise::NoiseSpec<f32>;
    pub type MarkovNoiseParams = crate::markov::MarkovNoiseParams<f32>;
}
