//! Collisional picture of the correlated-noise dynamics: the walker and the
//! register collide with two fresh ancilla qubits at every step.

mod dilation;
mod kraus;
mod thermal;

pub use dilation::{
    coefficient_channel, dilation_coefficients, dilation_unitary, extract_m, random_density, verify_dilation, Coefficients,
    ControlState, Decomposition, DilationReport, DilationUnitary,
};
pub use kraus::{kraus_step, KrausSet, StepKind};
pub use thermal::{thermal_channel, thermal_kraus, thermal_weights, ThermalBathParams};

use crate::error::Result;
use crate::quantum_core::{ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

/// Joint states `R_0, ..., R_steps` from dense Kraus sets: `first` for the
/// first collision, `steady` afterwards.
pub fn collision_evolve<T: Real>(
    first: &KrausSet<T>,
    steady: &KrausSet<T>,
    initial: &DensityMatrix<T>,
    steps: usize,
) -> Result<Vec<DensityMatrix<T>>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut r: ComplexMatrix<T> = initial.matrix().clone();
    out.push(initial.clone());
    for t in 1..=steps {
        let k = if t == 1 { first } else { steady };
        r = k.apply(&r)?;
        out.push(DensityMatrix::new_unchecked(r.clone()));
    }
    Ok(out)
}
