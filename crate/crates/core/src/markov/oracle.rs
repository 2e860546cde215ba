use super::params::{conditional_probs, MarkovNoiseParams};
use crate::error::{Error, Result};
use crate::grover::{grover_operator, GroverInstance};
use crate::noise::{build_chi, noisy_grover, NoiseSpec};
use crate::quantum_core::{ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

/// Largest horizon [`history_oracle`] will enumerate.
pub const MAX_HISTORY_STEPS: usize = 16;

/// Probability of every operator history of length `steps`.
///
/// Entry `h` belongs to the history whose step `t` (1-based) used the
/// noisy operator iff bit `t - 1` of `h` is set.
pub fn history_weights<T: Real>(params: &MarkovNoiseParams<T>, steps: usize) -> Result<Vec<T>> {
    if steps > MAX_HISTORY_STEPS {
        return Err(Error::TooManyHistories {
            steps,
            limit: MAX_HISTORY_STEPS,
        });
    }
    let c = conditional_probs(params);
    let first = [params.p_ideal(), params.p_noisy()];
    Ok((0..1usize << steps)
        .map(|h| {
            (1..steps).fold(if steps == 0 { T::one() } else { first[h & 1] }, |w, t| {
                w * c.get((h >> t) & 1, (h >> (t - 1)) & 1)
            })
        })
        .collect())
}

/// `rho_T` as the explicit mixture over all `2^T` operator histories,
/// built from dense `G` and `G'`.
pub fn history_oracle<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    params: &MarkovNoiseParams<T>,
    steps: usize,
) -> Result<DensityMatrix<T>> {
    let weights = history_weights(params, steps)?;
    let g = grover_operator::<T>(inst);
    let gp = noisy_grover(&g, &build_chi(inst.qubits(), spec)?)?;
    let ops = [g, gp];
    let rho0 = inst.uniform_superposition::<T>().projector().into_matrix();
    let mut acc = ComplexMatrix::zeros(inst.dim(), inst.dim());
    descend(&ops, &weights, &rho0, 0, 0, steps, &mut acc);
    Ok(DensityMatrix::new_unchecked(acc))
}

// Depth-first over histories so that shared prefixes are propagated once.
fn descend<T: Real>(
    ops: &[ComplexMatrix<T>; 2],
    weights: &[T],
    rho: &ComplexMatrix<T>,
    depth: usize,
    history: usize,
    steps: usize,
    acc: &mut ComplexMatrix<T>,
) {
    if depth == steps {
        let w = weights[history];
        if w != T::zero() {
            *acc = &*acc + &rho.scale_real(w);
        }
        return;
    }
    for (branch, op) in ops.iter().enumerate() {
        let next = op.conjugate(rho).expect("square operators");
        descend(ops, weights, &next, depth + 1, history | (branch << depth), steps, acc);
    }
}
