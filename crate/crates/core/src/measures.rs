//! Discrete-time non-Markovianity witnesses for the reduced register
//! dynamics: trace-distance back-flow over a fixed state pair, and
//! growth of the trace norm of an evolved Hermitian operator on an
//! extended system.
//!
//! Neither quantity is maximized over inputs, so both are lower bounds.

use crate::collision::{coefficient_channel, dilation_coefficients, StepKind, ThermalBathParams};
use crate::error::{Error, Result};
use crate::grover::{GroverInstance, GroverReflection};
use crate::markov::{run_channels, JointState, MarkovNoiseParams, WalkerChannel};
use crate::noise::{NoiseSpec, NoisyGroverOperator};
use crate::quantum_core::{
    matrix_trace_distance, tol, trace_norm_of, ComplexMatrix, DensityMatrix, LeftAction, PureState, WithSpectator,
};
use crate::scalar::{c_real, count, real, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct StatePair<T> {
    pub first: DensityMatrix<T>,
    pub second: DensityMatrix<T>,
}

/// `|s><s|` and `(1/N) [[1, -1], [-1, 1]]` (blocks of size `N/2`): the
/// second state has the top qubit in `|->` and the rest maximally mixed,
/// so the pair has orthogonal supports.
pub fn blp_pair<T: Real>(inst: &GroverInstance) -> Result<StatePair<T>> {
    let n = inst.dim();
    if n % 2 != 0 {
        return Err(Error::invalid("N", "the state pair needs an even dimension"));
    }
    let half = n / 2;
    let inv = T::one() / count::<T>(n);
    let second = ComplexMatrix::from_fn(n, n, |i, j| {
        if i % half != j % half {
            c_real(T::zero())
        } else if (i < half) == (j < half) {
            c_real(inv)
        } else {
            c_real(-inv)
        }
    });
    Ok(StatePair {
        first: inst.uniform_superposition::<T>().projector(),
        second: DensityMatrix::new_unchecked(second),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult<T> {
    /// Sum of the increments of `series` above the counting threshold.
    pub value: T,
    /// `D(t)` or `Gamma(t)` for `t = 0..=horizon`.
    pub series: Vec<T>,
    pub horizon: usize,
    /// Zero does not certify the absence of memory effects.
    pub witness_only: bool,
    /// Trace distance of the two walker ⊗ system states (back-flow only).
    pub joint_series: Option<Vec<T>>,
}

/// Sum of the increments larger than `threshold`.
pub fn positive_increments<T: Real>(series: &[T], threshold: T) -> T {
    series
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > threshold)
        .fold(T::zero(), |a, d| a + d)
}

fn channels<T: Real>(
    params: &MarkovNoiseParams<T>,
    bath: Option<&ThermalBathParams<T>>,
) -> (WalkerChannel<T>, WalkerChannel<T>) {
    match bath {
        None => (
            WalkerChannel::pure_first_step(params),
            WalkerChannel::pure_steady_step(params),
        ),
        Some(b) => (
            coefficient_channel(&dilation_coefficients(StepKind::Initial, params), b.amplitudes()),
            coefficient_channel(&dilation_coefficients(StepKind::Steady, params), b.amplitudes()),
        ),
    }
}

fn plus_walker<T: Real>(system: &ComplexMatrix<T>) -> JointState<T> {
    let h = c_real(T::FRAC_1_SQRT_2());
    JointState::product([h, h], system).expect("square system operator")
}

/// Evolves `|+><+| ⊗ rho` and returns `(rho_t, R_t)` for `t = 0..=steps`.
fn trajectory<T, A, B>(
    ideal: &A,
    noisy: &B,
    first: &WalkerChannel<T>,
    steady: &WalkerChannel<T>,
    rho: &ComplexMatrix<T>,
    steps: usize,
) -> Result<Vec<(ComplexMatrix<T>, ComplexMatrix<T>)>>
where
    T: Real,
    A: LeftAction<T> + ?Sized,
    B: LeftAction<T> + ?Sized,
{
    let mut out = Vec::with_capacity(steps + 1);
    run_channels(ideal, noisy, first, steady, plus_walker(rho), steps, |_, r| {
        out.push((r.system_marginal(), r.to_dense()));
        Ok(())
    })?;
    Ok(out)
}

/// Trace-distance back-flow between the two members of [`blp_pair`],
/// evolved through the pure-ancilla maps or, with `bath`, through the
/// thermal-ancilla maps.
///
/// Also checks that the walker ⊗ system trace distance never grows from
/// `t = 1` on and that `D(t) <= D(0)`; either failure is reported as an
/// invariant violation.
pub fn n_blp<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    params: &MarkovNoiseParams<T>,
    steps: usize,
    bath: Option<&ThermalBathParams<T>>,
) -> Result<MeasureResult<T>> {
    let pair = blp_pair::<T>(inst)?;
    n_blp_for_pair(inst, spec, params, steps, bath, &pair)
}

/// [`n_blp`] for an arbitrary state pair.
pub fn n_blp_for_pair<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    params: &MarkovNoiseParams<T>,
    steps: usize,
    bath: Option<&ThermalBathParams<T>>,
    pair: &StatePair<T>,
) -> Result<MeasureResult<T>> {
    if steps < 2 {
        return Err(Error::invalid("steps", "need a horizon of at least 2"));
    }
    let ideal = GroverReflection::new(*inst);
    let noisy = NoisyGroverOperator::new(inst, spec)?;
    let (first, steady) = channels(params, bath);
    let a = trajectory(&ideal, &noisy, &first, &steady, pair.first.matrix(), steps)?;
    let b = trajectory(&ideal, &noisy, &first, &steady, pair.second.matrix(), steps)?;
    let mut series = Vec::with_capacity(steps + 1);
    let mut joint = Vec::with_capacity(steps + 1);
    for ((rho1, r1), (rho2, r2)) in a.iter().zip(&b) {
        series.push(matrix_trace_distance(rho1, rho2)?);
        joint.push(matrix_trace_distance(r1, r2)?);
    }
    let slack = real::<T>(1e-10);
    for t in 2..joint.len() {
        if joint[t] > joint[t - 1] + slack {
            return Err(Error::InvariantViolation {
                name: format!("joint trace distance monotonicity at t={t}"),
                deviation: (joint[t] - joint[t - 1]).to_f64().unwrap_or(f64::INFINITY),
            });
        }
    }
    if let Some((t, &d)) = series.iter().enumerate().find(|(_, &d)| d > series[0] + slack) {
        return Err(Error::InvariantViolation {
            name: format!("trace distance contraction at t={t}"),
            deviation: (d - series[0]).to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(MeasureResult {
        value: positive_increments(&series, real(tol::INCREMENT)),
        series,
        horizon: steps,
        witness_only: true,
        joint_series: Some(joint),
    })
}

/// Growth of `Gamma_t = ||Tr_walker R_t||_1 / 2` for
/// `R_0 = (1/N) ⊗ (|s><s| - |w><w|)` on an `N`-dimensional spectator ⊗
/// register, evolved through the pure-ancilla maps acting on walker ⊗
/// register only.
pub fn n_cp<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    params: &MarkovNoiseParams<T>,
    steps: usize,
) -> Result<MeasureResult<T>> {
    if steps < 2 {
        return Err(Error::invalid("steps", "need a horizon of at least 2"));
    }
    let n = inst.dim();
    let ideal = WithSpectator {
        inner: GroverReflection::new(*inst),
        spectator_dim: n,
    };
    let noisy = WithSpectator {
        inner: NoisyGroverOperator::new(inst, spec)?,
        spectator_dim: n,
    };
    let s = inst.uniform_superposition::<T>();
    let w = PureState::<T>::basis(n, inst.marked());
    let diff = s.projector().matrix() - w.projector().matrix();
    let r0 = ComplexMatrix::identity(n).scale_real(T::one() / count(n)).kron(&diff);
    let first = WalkerChannel::pure_first_step(params);
    let steady = WalkerChannel::pure_steady_step(params);
    let mut series = Vec::with_capacity(steps + 1);
    let mut failure = None;
    run_channels(&ideal, &noisy, &first, &steady, plus_walker(&r0), steps, |_, r| {
        match trace_norm_of(&r.system_marginal()) {
            Ok(v) => series.push(v * real(0.5)),
            Err(e) => failure = Some(e),
        }
        Ok(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MeasureResult {
        value: positive_increments(&series, real(tol::INCREMENT)),
        series,
        horizon: steps,
        witness_only: true,
        joint_series: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint<T> {
    pub p: T,
    pub mu: T,
    pub temperature: T,
    pub value: T,
}

/// Thermal back-flow at every `(p, mu)` grid point and temperature.
pub fn temperature_sweep<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    grid: &[MarkovNoiseParams<T>],
    steps: usize,
    temperatures: &[T],
) -> Result<Vec<SweepPoint<T>>> {
    let baths = temperatures
        .iter()
        .map(|&t| crate::collision::thermal_weights(t))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(grid.len() * baths.len());
    for params in grid {
        for bath in &baths {
            out.push(SweepPoint {
                p: params.p(),
                mu: params.mu(),
                temperature: bath.temperature,
                value: n_blp(inst, spec, params, steps, Some(bath))?.value,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::thermal_weights;
    use crate::noise::SingleQubitUnitary;
    use crate::quantum_core::{eigvalsh, trace_distance};

    fn sx(n: usize) -> (GroverInstance, NoiseSpec<f64>) {
        (
            GroverInstance::with_qubits(n).unwrap(),
            NoiseSpec::prefix(SingleQubitUnitary::pauli_x(), 1, n).unwrap(),
        )
    }

    #[test]
    fn pair_properties() {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let pair = blp_pair::<f64>(&inst).unwrap();
        assert!(pair.second.report(1e-12).passed());
        let ev = eigvalsh(pair.second.matrix()).unwrap();
        assert_eq!(ev.iter().filter(|&&x| (x - 0.25).abs() < 1e-12).count(), 4);
        let overlap = (pair.first.matrix() * pair.second.matrix()).trace();
        assert!(overlap.norm() < 1e-15);
        assert!((trace_distance(&pair.first, &pair.second).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn increments() {
        assert_eq!(positive_increments(&[1.0, 0.5, 0.7, 0.6, 0.9], 1e-12), 0.2 + 0.30000000000000004);
        assert_eq!(positive_increments(&[1.0, 0.9, 0.8], 1e-12), 0.0);
    }

    #[test]
    fn no_backflow_without_noise() {
        let (inst, spec) = sx(3);
        for mu in [0.0, 0.5, 1.0] {
            let params = MarkovNoiseParams::new(0.0, mu).unwrap();
            assert!(n_blp(&inst, &spec, &params, 20, None).unwrap().value <= 1e-9);
        }
    }

    #[test]
    fn backflow_with_strong_memory() {
        let (inst, spec) = sx(3);
        let strong = n_blp(&inst, &spec, &MarkovNoiseParams::new(0.33, 0.9).unwrap(), 45, None).unwrap();
        assert!(strong.value > 1e-4);
        assert!(strong.witness_only);
        let weak = n_blp(&inst, &spec, &MarkovNoiseParams::new(0.33, 0.3).unwrap(), 45, None).unwrap();
        assert!(weak.value <= 1e-9);
        let doubled = n_blp(&inst, &spec, &MarkovNoiseParams::new(0.33, 0.9).unwrap(), 90, None).unwrap();
        assert!(doubled.value >= strong.value);
    }

    #[test]
    fn cp_witness_initial_value_and_positivity() {
        let (inst, spec) = sx(3);
        let r = n_cp(&inst, &spec, &MarkovNoiseParams::new(0.5, 0.9).unwrap(), 20).unwrap();
        assert!((r.series[0] - (1.0f64 - 1.0 / 8.0).sqrt()).abs() < 1e-12);
        assert!(r.value > 1e-4);
    }

    #[test]
    fn cold_bath_matches_pure_ancillas() {
        let (inst, spec) = sx(3);
        let params = MarkovNoiseParams::new(0.5, 0.9).unwrap();
        let pure = n_blp(&inst, &spec, &params, 30, None).unwrap();
        let cold = n_blp(&inst, &spec, &params, 30, Some(&thermal_weights(0.01).unwrap())).unwrap();
        for (a, b) in pure.series.iter().zip(&cold.series) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn sweep_shape() {
        let (inst, spec) = sx(2);
        let grid = [MarkovNoiseParams::new(0.5, 0.9).unwrap(), MarkovNoiseParams::new(0.0, 0.5).unwrap()];
        let rows = temperature_sweep(&inst, &spec, &grid, 10, &[0.5, 2.0]).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(temperature_sweep(&inst, &spec, &grid, 10, &[0.0]).is_err());
    }

    #[test]
    fn short_horizon_rejected() {
        let (inst, spec) = sx(3);
        let params = MarkovNoiseParams::new(0.5, 0.5).unwrap();
        assert!(n_blp(&inst, &spec, &params, 1, None).is_err());
        assert!(n_cp(&inst, &spec, &params, 1).is_err());
    }
}
