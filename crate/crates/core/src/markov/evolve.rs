use super::channel::{initial_joint_state, JointState, WalkerChannel};
use super::params::MarkovNoiseParams;
use crate::error::{Error, Result};
use crate::grover::{GroverInstance, GroverReflection};
use crate::noise::{NoiseSpec, NoisyGroverOperator};
use crate::quantum_core::{assert_density, ComplexMatrix, DensityMatrix, LeftAction};
use crate::scalar::{real, Real};

/// What [`markov_evolve`] keeps besides the success probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions<T> {
    /// Retain `rho_t` for every step.
    pub keep_states: bool,
    /// Retain the dense joint state `R_t` for every step.
    pub keep_joint: bool,
    /// Validate every `R_t` and `rho_t` as a density matrix at this tolerance.
    pub check_density: Option<T>,
}

impl<T> Default for EvolveOptions<T> {
    fn default() -> Self {
        EvolveOptions {
            keep_states: false,
            keep_joint: false,
            check_density: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub t: usize,
    /// `P(t) = <w|rho_t|w>`
    pub success: T,
    pub state: Option<DensityMatrix<T>>,
    pub joint: Option<ComplexMatrix<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace<T> {
    pub params: MarkovNoiseParams<T>,
    pub marked: usize,
    /// Records for `t = 0..=steps`.
    pub records: Vec<StepRecord<T>>,
}

impl<T: Real> EvolutionTrace<T> {
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn success_series(&self) -> Vec<T> {
        self.records.iter().map(|r| r.success).collect()
    }

    pub fn final_state(&self) -> Option<&DensityMatrix<T>> {
        self.records.last().and_then(|r| r.state.as_ref())
    }
}

/// Runs `first` once and `steady` for every later step, calling `observe`
/// on `R_0, R_1, ..., R_steps`. Stops early on the first observer error.
pub fn run_channels<T, A, B, F>(
    ideal: &A,
    noisy: &B,
    first: &WalkerChannel<T>,
    steady: &WalkerChannel<T>,
    initial: JointState<T>,
    steps: usize,
    mut observe: F,
) -> Result<JointState<T>>
where
    T: Real,
    A: LeftAction<T> + ?Sized,
    B: LeftAction<T> + ?Sized,
    F: FnMut(usize, &JointState<T>) -> Result<()>,
{
    let mut r = initial;
    observe(0, &r)?;
    for t in 1..=steps {
        let channel = if t == 1 { first } else { steady };
        r = channel.apply(ideal, noisy, &r)?;
        observe(t, &r)?;
    }
    Ok(r)
}

fn check_density<T: Real>(name: &str, t: usize, m: &ComplexMatrix<T>, tol: T) -> Result<()> {
    match assert_density(m, tol).violation() {
        None => Ok(()),
        Some((what, dev)) => Err(Error::InvariantViolation {
            name: format!("{name} {what} at t={t}"),
            deviation: dev.to_f64().unwrap_or(f64::INFINITY),
        }),
    }
}

/// Evolves `R_0 = |+><+| ⊗ |s><s|` through the pure-ancilla collision maps
/// with the given system operators and records `P(t)` for `t = 0..=steps`.
pub fn evolve_with_operators<T, A, B>(
    ideal: &A,
    noisy: &B,
    initial_system: &crate::quantum_core::PureState<T>,
    marked: usize,
    params: &MarkovNoiseParams<T>,
    steps: usize,
    options: EvolveOptions<T>,
) -> Result<EvolutionTrace<T>>
where
    T: Real,
    A: LeftAction<T> + ?Sized,
    B: LeftAction<T> + ?Sized,
{
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    if marked >= initial_system.dim() {
        return Err(Error::invalid("marked", format!("index {marked} outside the register")));
    }
    let first = WalkerChannel::pure_first_step(params);
    let steady = WalkerChannel::pure_steady_step(params);
    let mut records = Vec::with_capacity(steps + 1);
    run_channels(
        ideal,
        noisy,
        &first,
        &steady,
        initial_joint_state(initial_system),
        steps,
        |t, r| {
            let rho = r.system_marginal();
            let joint = (options.keep_joint || options.check_density.is_some()).then(|| r.to_dense());
            if let Some(tol) = options.check_density {
                check_density("joint state", t, joint.as_ref().expect("built above"), tol)?;
                check_density("system state", t, &rho, tol)?;
            }
            records.push(StepRecord {
                t,
                success: rho[(marked, marked)].re,
                state: options.keep_states.then(|| DensityMatrix::new_unchecked(rho)),
                joint: if options.keep_joint { joint } else { None },
            });
            Ok(())
        },
    )?;
    Ok(EvolutionTrace {
        params: *params,
        marked,
        records,
    })
}

/// Success-probability series of Grover search under Markov-correlated
/// noise, starting from `|s>`.
pub fn markov_evolve<T: Real>(
    inst: &GroverInstance,
    spec: &NoiseSpec<T>,
    params: &MarkovNoiseParams<T>,
    steps: usize,
    options: EvolveOptions<T>,
) -> Result<EvolutionTrace<T>> {
    let ideal = GroverReflection::new(*inst);
    let noisy = NoisyGroverOperator::new(inst, spec)?;
    evolve_with_operators(
        &ideal,
        &noisy,
        &inst.uniform_superposition(),
        inst.marked(),
        params,
        steps,
        options,
    )
}

/// Default density-check tolerance used by callers that want validation.
pub fn default_check<T: Real>() -> EvolveOptions<T> {
    EvolveOptions {
        keep_states: true,
        keep_joint: false,
        check_density: Some(real(1e-9)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::{grover_operator, ideal_success_series};
    use crate::noise::{build_chi, noisy_grover, SingleQubitUnitary};

    #[test]
    fn zero_noise_reproduces_ideal_search() {
        let inst = GroverInstance::new(5, 9).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::pauli_x(), 2, 5).unwrap();
        let ideal = ideal_success_series::<f64>(&inst, 12);
        for mu in [0.0, 0.4, 1.0] {
            let params = MarkovNoiseParams::new(0.0, mu).unwrap();
            let trace = markov_evolve(&inst, &spec, &params, 12, EvolveOptions::default()).unwrap();
            for (a, b) in trace.success_series().iter().zip(&ideal) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_step_mixture() {
        let inst = GroverInstance::new(3, 2).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::hadamard(), 1, 3).unwrap();
        let params = MarkovNoiseParams::new(0.35, 0.5).unwrap();
        let opts = EvolveOptions { keep_states: true, ..Default::default() };
        let trace = markov_evolve(&inst, &spec, &params, 1, opts).unwrap();
        let g = grover_operator::<f64>(&inst);
        let gp = noisy_grover(&g, &build_chi(3, &spec).unwrap()).unwrap();
        let rho0 = inst.uniform_superposition::<f64>().projector().into_matrix();
        let expected = &g.conjugate(&rho0).unwrap().scale_real(0.65) + &gp.conjugate(&rho0).unwrap().scale_real(0.35);
        assert!(trace.final_state().unwrap().matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn density_checks_pass_along_the_trajectory() {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::hadamard(), 2, 3).unwrap();
        let params = MarkovNoiseParams::new(0.6, 0.3).unwrap();
        let trace = markov_evolve(&inst, &spec, &params, 15, default_check()).unwrap();
        assert!(trace.success_series().iter().all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
        assert_eq!(trace.records.len(), 16);
    }

    #[test]
    fn rejects_zero_steps() {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::<f64>::pauli_x(), 1, 3).unwrap();
        let params = MarkovNoiseParams::new(0.5, 0.5).unwrap();
        assert!(markov_evolve(&inst, &spec, &params, 0, EvolveOptions::default()).is_err());
    }
}
