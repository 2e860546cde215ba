//! Dense complex linear algebra: tensor products, partial traces, Hermitian
//! eigendecomposition, trace norms and state validity checks.
//!
//! Multi-space operators use the factor order
//! `ancilla1 ⊗ ancilla2 ⊗ walker ⊗ system`; the first factor is the most
//! significant part of a basis index.

mod eigen;
mod matrix;
mod ops;
mod state;

pub use eigen::{eigh, eigvalsh, HermitianEigen};
pub use matrix::{partial_trace, tensor, ComplexMatrix};
pub use ops::{LeftAction, WithSpectator};
pub use state::{
    assert_density, trace_distance, trace_norm, trace_norm_of, DensityMatrix, DensityReport,
    HermitianOperator, PureState,
};

pub(crate) use state::matrix_trace_distance;

/// Default tolerances.
pub mod tol {
    /// State-vector normalization.
    pub const NORM: f64 = 1e-12;
    /// Hermiticity of operators handed to the eigensolver.
    pub const HERMITIAN: f64 = 1e-10;
    /// Hermiticity, trace and eigenvalue floor for density matrices.
    pub const DENSITY: f64 = 1e-10;
    /// Smallest trace-distance increment counted as back-flow.
    pub const INCREMENT: f64 = 1e-12;
    /// Global-phase matching in the noise classifier.
    pub const PHASE: f64 = 1e-10;
}
