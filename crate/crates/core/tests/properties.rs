use grover_noise::collision::{
    dilation_coefficients, coefficient_channel, dilation_unitary, kraus_step, random_density, thermal_weights,
    StepKind,
};
use grover_noise::grover::{grover_operator, GroverReflection};
use grover_noise::markov::{
    conditional_probs, history_weights, markov_evolve, run_channels, EvolveOptions, JointState, MarkovNoiseParams,
    WalkerChannel,
};
use grover_noise::noise::{build_chi, noisy_grover, LocalUnitaryProduct, NoiseSpec, NoisyGroverOperator, SingleQubitUnitary};
use grover_noise::quantum_core::{
    eigvalsh, partial_trace, tensor, trace_distance, ComplexMatrix, DensityMatrix, LeftAction,
};
use grover_noise::GroverInstance;
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type M = ComplexMatrix<f64>;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = M> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        M::from_vec(rows, cols, v.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).unwrap()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = M> {
    matrix(dim, dim).prop_map(|a| (&a + &a.adjoint()).scale_real(0.5))
}

fn density(dim: usize) -> impl Strategy<Value = DensityMatrix<f64>> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DensityMatrix::new_unchecked(random_density(dim, &mut rng))
    })
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
fn unitary(dim: usize) -> impl Strategy<Value = M> {
    hermitian(dim).prop_map(|h| grover_noise::quantum_core::eigh(&h).unwrap().vectors.unwrap())
}

fn noise_unitary() -> impl Strategy<Value = SingleQubitUnitary<f64>> {
    (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..1.0f64).prop_map(
        |(pa, pb, theta, r)| {
            let a = Complex::from_polar(r.sqrt(), pa);
            let b = Complex::from_polar((1.0 - r).sqrt(), pb);
            SingleQubitUnitary::new(a, b, theta).unwrap()
        },
    )
}

fn markov_params() -> impl Strategy<Value = MarkovNoiseParams<f64>> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(p, mu)| MarkovNoiseParams::new(p, mu).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_is_associative(a in matrix(2, 3), b in matrix(2, 2), c in matrix(3, 2)) {
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace(r in matrix(12, 12), keep in 0usize..3) {
        let reduced = partial_trace(&r, &[2, 3, 2], &[keep]).unwrap();
        prop_assert!((reduced.trace() - r.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(a in density(2), b in density(4)) {
        let joint = tensor(a.matrix(), b.matrix());
        prop_assert!(partial_trace(&joint, &[2, 4], &[0]).unwrap().max_abs_diff(a.matrix()) < 1e-14);
        prop_assert!(partial_trace(&joint, &[2, 4], &[1]).unwrap().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn eigenvalues_agree_with_nalgebra(h in hermitian(7)) {
        let ours = eigvalsh(&h).unwrap();
        let na = nalgebra::DMatrix::from_fn(7, 7, |i, j| nalgebra::Complex::new(h[(i, j)].re, h[(i, j)].im));
        let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn trace_distance_is_a_metric(a in density(4), b in density(4), c in density(4)) {
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        let cb = trace_distance(&c, &b).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn trace_distance_is_unitarily_invariant(a in density(4), b in density(4), u in unitary(4)) {
        let rot = |d: &DensityMatrix<f64>| DensityMatrix::new_unchecked(u.conjugate(d.matrix()).unwrap());
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&rot(&a), &rot(&b)).unwrap();
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn kraus_maps_contract_trace_distance(a in density(16), b in density(16), pr in markov_params(), steady in any::<bool>()) {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let g = grover_operator(&inst);
        let spec = NoiseSpec::prefix(SingleQubitUnitary::hadamard(), 2, 3).unwrap();
        let gp = noisy_grover(&g, &build_chi(3, &spec).unwrap()).unwrap();
        let kind = if steady { StepKind::Steady } else { StepKind::Initial };
        let k = kraus_step(kind, &pr, &g, &gp).unwrap();
        prop_assert!(k.completeness_defect() < 1e-12);
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&k.apply_density(&a).unwrap(), &k.apply_density(&b).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10);
        prop_assert!(k.apply_density(&a).unwrap().report(1e-9).passed());
    }

    #[test]
    fn dilations_are_unitary(pr in markov_params(), steady in any::<bool>()) {
        let inst = GroverInstance::with_qubits(2).unwrap();
        let g = grover_operator(&inst);
        let gp = noisy_grover(&g, &build_chi(2, &NoiseSpec::prefix(SingleQubitUnitary::pauli_y(), 1, 2).unwrap()).unwrap()).unwrap();
        let kind = if steady { StepKind::Steady } else { StepKind::Initial };
        prop_assert!(dilation_unitary(kind, &pr, &g, &gp).unwrap().matrix().unitarity_defect() < 1e-10);
    }

    #[test]
    fn conditional_columns_sum_to_one(pr in markov_params()) {
        let c = conditional_probs(&pr);
        for from in 0..2 {
            prop_assert!((c.get(0, from) + c.get(1, from) - 1.0).abs() < 1e-15);
            prop_assert!(c.get(0, from) >= 0.0 && c.get(1, from) >= 0.0);
        }
        let total: f64 = history_weights(&pr, 7).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn structured_operators_match_dense(u in noise_unitary(), mask in 1usize..16, marked in 0usize..16, x in matrix(16, 3)) {
        let positions: Vec<usize> = (0..4).filter(|q| mask >> q & 1 == 1).collect();
        let inst = GroverInstance::new(4, marked).unwrap();
        let spec = NoiseSpec::new(u, positions, 4).unwrap();
        let chi = build_chi(4, &spec).unwrap();
        prop_assert!(chi.unitarity_defect() < 1e-12);
        let fast_chi = LocalUnitaryProduct::new(4, &spec).unwrap();
        prop_assert!(fast_chi.apply_left(&x).max_abs_diff(&chi.matmul(&x).unwrap()) < 1e-13);
        let g = grover_operator(&inst);
        prop_assert!(GroverReflection::new(inst).apply_left(&x).max_abs_diff(&g.matmul(&x).unwrap()) < 1e-13);
        let gp = noisy_grover(&g, &chi).unwrap();
        let fast_gp = NoisyGroverOperator::new(&inst, &spec).unwrap();
        prop_assert!(fast_gp.apply_left(&x).max_abs_diff(&gp.matmul(&x).unwrap()) < 1e-13);
    }

    #[test]
    fn success_probability_is_a_probability(u in noise_unitary(), pr in markov_params(), marked in 0usize..8) {
        let inst = GroverInstance::new(3, marked).unwrap();
        let spec = NoiseSpec::prefix(u, 2, 3).unwrap();
        let trace = markov_evolve(&inst, &spec, &pr, 12, EvolveOptions { check_density: Some(1e-9), ..Default::default() }).unwrap();
        for p in trace.success_series() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn sigma_x_success_ignores_layout(pr in markov_params(), mask in 1usize..32) {
        let inst = GroverInstance::with_qubits(5).unwrap();
        let x = SingleQubitUnitary::pauli_x();
        let positions: Vec<usize> = (0..5).filter(|q| mask >> q & 1 == 1).collect();
        let a = markov_evolve(&inst, &NoiseSpec::new(x, positions, 5).unwrap(), &pr, 15, EvolveOptions::default()).unwrap();
        let b = markov_evolve(&inst, &NoiseSpec::prefix(x, 1, 5).unwrap(), &pr, 15, EvolveOptions::default()).unwrap();
        for (p, q) in a.success_series().iter().zip(b.success_series()) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }

    /// Reduced dynamics: `D(rho_t^1, rho_t^2) <= D(rho_0^1, rho_0^2)` for
    /// every `t`, while the joint distance never grows after the first step.
    #[test]
    fn one_shot_contraction_and_joint_monotonicity(a in density(8), b in density(8), pr in markov_params(), temp in prop::option::of(0.05..5.0f64)) {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::pauli_x(), 1, 3).unwrap();
        let (first, steady) = match temp {
            None => (WalkerChannel::pure_first_step(&pr), WalkerChannel::pure_steady_step(&pr)),
            Some(t) => {
                let bath = thermal_weights(t).unwrap();
                (
                    coefficient_channel(&dilation_coefficients(StepKind::Initial, &pr), bath.amplitudes()),
                    coefficient_channel(&dilation_coefficients(StepKind::Steady, &pr), bath.amplitudes()),
                )
            }
        };
        let ideal = GroverReflection::new(inst);
        let noisy = NoisyGroverOperator::new(&inst, &spec).unwrap();
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut runs = Vec::new();
        for rho in [&a, &b] {
            let mut states = Vec::new();
            run_channels(&ideal, &noisy, &first, &steady, JointState::product([h, h], rho.matrix()).unwrap(), 15, |_, r| {
                states.push((r.system_marginal(), r.to_dense()));
                Ok(())
            }).unwrap();
            runs.push(states);
        }
        let d = |x: &M, y: &M| trace_distance(&DensityMatrix::new_unchecked(x.clone()), &DensityMatrix::new_unchecked(y.clone())).unwrap();
        let d0 = d(a.matrix(), b.matrix());
        let joint: Vec<f64> = runs[0].iter().zip(&runs[1]).map(|(x, y)| d(&x.1, &y.1)).collect();
        for (x, y) in runs[0].iter().zip(&runs[1]) {
            prop_assert!(d(&x.0, &y.0) <= d0 + 1e-10);
        }
        for t in 2..joint.len() {
            prop_assert!(joint[t] <= joint[t - 1] + 1e-10);
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let inst = GroverInstance::with_qubits(4).unwrap();
    let spec = NoiseSpec::prefix(SingleQubitUnitary::<f32>::pauli_x(), 2, 4).unwrap();
    let lo = markov_evolve(&inst, &spec, &MarkovNoiseParams::new(0.3f32, 0.6).unwrap(), 10, EvolveOptions::default())
        .unwrap()
        .success_series();
    let spec64 = NoiseSpec::prefix(SingleQubitUnitary::<f64>::pauli_x(), 2, 4).unwrap();
    let hi = markov_evolve(&inst, &spec64, &MarkovNoiseParams::new(0.3, 0.6).unwrap(), 10, EvolveOptions::default())
        .unwrap()
        .success_series();
    for (a, b) in lo.iter().zip(&hi) {
        assert!((*a as f64 - b).abs() < 1e-5);
    }
}
