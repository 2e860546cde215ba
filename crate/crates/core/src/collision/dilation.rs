//! Unitary dilations of the walker ⊗ system Kraus maps onto two ancilla
//! qubits, in the factor order `ancilla1 ⊗ ancilla2 ⊗ walker ⊗ system`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kraus::{KrausSet, StepKind};
use crate::error::{Error, Result};
use crate::markov::{conditional_probs, Branch, MarkovNoiseParams, WalkerChannel, WalkerTerm};
use crate::quantum_core::{matrix_trace_distance, partial_trace, ComplexMatrix};
use crate::scalar::{c_real, count, cplx, real, Real};

/// Real 8×8 coefficient table: `U = sum_{rc} coef[r][c] |r><c| ⊗ V_r`
/// with `V_r = G` for `r < 4` (ancilla1 in `|0>`) and `G'` otherwise.
pub type Coefficients<T> = [[T; 8]; 8];

/// Collision unitary on ancillas ⊗ walker ⊗ system.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationUnitary<T> {
    kind: StepKind,
    coefficients: Coefficients<T>,
    matrix: ComplexMatrix<T>,
    system_dim: usize,
}

fn transition_amplitudes<T: Real>(kind: StepKind, params: &MarkovNoiseParams<T>) -> [T; 4] {
    let (gg, ggp, gpg, gpgp) = match kind {
        StepKind::Initial => (params.p_ideal(), params.p_ideal(), params.p_noisy(), params.p_noisy()),
        StepKind::Steady => {
            let c = conditional_probs(params);
            (c.g_given_g, c.g_given_gp, c.gp_given_g, c.gp_given_gp)
        }
    };
    [gg.sqrt(), ggp.sqrt(), gpg.sqrt(), gpgp.sqrt()]
}

/// Block layout of the collision unitary. Rows and columns are indexed by
/// `4 a1 + 2 a2 + w`.
pub fn dilation_coefficients<T: Real>(kind: StepKind, params: &MarkovNoiseParams<T>) -> Coefficients<T> {
    let [gg, ggp, gpg, gpgp] = transition_amplitudes(kind, params);
    let mut c = [[T::zero(); 8]; 8];
    let entries = [
        (0, 0, gg),
        (0, 5, gpg),
        (1, 2, ggp),
        (1, 7, gpgp),
        (2, 1, ggp),
        (2, 4, gpgp),
        (3, 3, gpg),
        (3, 6, gg),
        (4, 2, gpgp),
        (4, 7, -ggp),
        (5, 0, gpg),
        (5, 5, -gg),
        (6, 3, gg),
        (6, 6, -gpg),
        (7, 1, gpgp),
        (7, 4, -ggp),
    ];
    for (r, col, v) in entries {
        c[r][col] = v;
    }
    c
}

/// Assembles the dense `8N×8N` collision unitary and re-verifies unitarity.
pub fn dilation_unitary<T: Real>(
    kind: StepKind,
    params: &MarkovNoiseParams<T>,
    g: &ComplexMatrix<T>,
    g_noisy: &ComplexMatrix<T>,
) -> Result<DilationUnitary<T>> {
    let u = DilationUnitary::from_coefficients(kind, dilation_coefficients(kind, params), g, g_noisy)?;
    let defect = u.matrix.unitarity_defect();
    if !(defect <= real(1e-10)) {
        return Err(Error::InvariantViolation {
            name: "dilation unitarity".into(),
            deviation: defect.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(u)
}

impl<T: Real> DilationUnitary<T> {
    /// No unitarity check; used to build deliberately broken controls.
    pub fn from_coefficients(
        kind: StepKind,
        coefficients: Coefficients<T>,
        g: &ComplexMatrix<T>,
        g_noisy: &ComplexMatrix<T>,
    ) -> Result<Self> {
        if !g.is_square() || g.rows() != g_noisy.rows() || !g_noisy.is_square() {
            return Err(Error::dims(
                format!("{}x{}", g.rows(), g.cols()),
                format!("{}x{}", g_noisy.rows(), g_noisy.cols()),
            ));
        }
        let d = g.rows();
        let mut matrix = ComplexMatrix::zeros(8 * d, 8 * d);
        for (r, row) in coefficients.iter().enumerate() {
            let v = if r < 4 { g } else { g_noisy };
            for (c, &x) in row.iter().enumerate() {
                if x != T::zero() {
                    matrix.set_block(r * d, c * d, &v.scale_real(x));
                }
            }
        }
        Ok(DilationUnitary {
            kind,
            coefficients,
            matrix,
            system_dim: d,
        })
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn coefficients(&self) -> &Coefficients<T> {
        &self.coefficients
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// `<alpha|U|beta>` on walker ⊗ system, ancilla states indexed `0..4`.
    pub fn ancilla_block(&self, alpha: usize, beta: usize) -> ComplexMatrix<T> {
        let w = 2 * self.system_dim;
        self.matrix.block(alpha * w, beta * w, w, w)
    }

    /// The four Kraus operators `<alpha|U|00>`.
    pub fn pure_kraus(&self) -> KrausSet<T> {
        let ops = (0..4).map(|a| self.ancilla_block(a, 0)).collect();
        let labels = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
        KrausSet::new(ops, labels).expect("equal blocks")
    }

    /// Factored form of the channel for ancillas prepared in the diagonal
    /// state with amplitudes `pi[beta]` (so populations `pi[beta]^2`).
    pub fn walker_channel(&self, pi: [T; 4]) -> WalkerChannel<T> {
        coefficient_channel(&self.coefficients, pi)
    }
}

/// Kraus map `K_{alpha beta} = pi_beta <alpha|U|beta>` of a collision
/// unitary given by its coefficient table, without forming `U`.
pub fn coefficient_channel<T: Real>(coefficients: &Coefficients<T>, pi: [T; 4]) -> WalkerChannel<T> {
    let mut terms = Vec::new();
    for alpha in 0..4 {
        for (beta, &weight) in pi.iter().enumerate() {
            if weight == T::zero() {
                continue;
            }
            let mut walker = [[Complex::new(T::zero(), T::zero()); 2]; 2];
            let mut nonzero = false;
            for (w, row) in walker.iter_mut().enumerate() {
                for (wp, slot) in row.iter_mut().enumerate() {
                    let x = coefficients[2 * alpha + w][2 * beta + wp] * weight;
                    nonzero |= x != T::zero();
                    *slot = c_real(x);
                }
            }
            if nonzero {
                let branch = if alpha < 2 { Branch::Ideal } else { Branch::Noisy };
                terms.push(WalkerTerm { walker, branch });
            }
        }
    }
    WalkerChannel::new(terms)
}

/// Outcome of [`verify_dilation`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationReport<T> {
    pub trials: usize,
    /// Largest trace distance between the two routes.
    pub max_deviation: T,
    /// `max |<alpha|U|00> - K_alpha|` over the first four Kraus operators.
    pub kraus_mismatch: T,
    pub unitarity_defect: T,
}

impl<T: Real> DilationReport<T> {
    /// Route agreement within `tol`, plus exact Kraus blocks and unitarity
    /// within `1e-10`.
    pub fn passed(&self, tol: T) -> bool {
        self.max_deviation <= tol && self.kraus_mismatch <= real(1e-10) && self.unitarity_defect <= real(1e-10)
    }
}

/// Random full-rank density matrix `A A^dagger / Tr`, entries of `A`
/// uniform in the unit square.
pub fn random_density<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
        cplx(real::<T>(rng.gen_range(-1.0..1.0)), real::<T>(rng.gen_range(-1.0..1.0)))
    });
    let r = &a * &a.adjoint();
    let tr = r.trace().re;
    r.scale_real(T::one() / tr)
}

/// Compares `Tr_anc U (|00><00| ⊗ R) U^dagger` with `sum K R K^dagger`
/// on `trials` seeded random states.
///
/// The partial-trace route only sees the `|00>` input columns of `U` and is
/// blind to the sign of a single block, so the report also carries the
/// entrywise Kraus-block mismatch and the unitarity defect.
pub fn verify_dilation<T: Real>(
    u: &DilationUnitary<T>,
    kraus: &KrausSet<T>,
    trials: usize,
    seed: u64,
) -> Result<DilationReport<T>> {
    let w = 2 * u.system_dim;
    if kraus.dim() != w {
        return Err(Error::dims(format!("Kraus operators of dimension {w}"), kraus.dim()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation = T::zero();
    for _ in 0..trials {
        let r = random_density::<T, _>(w, &mut rng);
        let mut big = ComplexMatrix::zeros(4 * w, 4 * w);
        big.set_block(0, 0, &r);
        let evolved = u.matrix.conjugate(&big)?;
        let reduced = partial_trace(&evolved, &[4, w], &[1])?;
        let d = matrix_trace_distance(&reduced, &kraus.apply(&r)?)?;
        max_deviation = max_deviation.max(d);
    }
    let kraus_mismatch = if kraus.len() == 4 {
        (0..4)
            .map(|a| u.ancilla_block(a, 0).max_abs_diff(&kraus.ops()[a]))
            .fold(T::zero(), T::max)
    } else {
        T::infinity()
    };
    Ok(DilationReport {
        trials,
        max_deviation,
        kraus_mismatch,
        unitarity_defect: u.matrix.unitarity_defect(),
    })
}

/// Which ancilla1 state switches the noise on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlState {
    Zero,
    One,
}

/// Result of splitting `U = (controlled-chi) (M' ⊗ 1) (1 ⊗ G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub m_prime: ComplexMatrix<T>,
    pub control: ControlState,
    /// `max |M_full - M' ⊗ 1_N|`
    pub residual: T,
    pub unitarity_defect: T,
    /// Printed ratio entries and whether some ratio of `M'` entries matches
    /// each in magnitude.
    pub ratio_matches: Vec<(String, bool)>,
}

fn controlled<T: Real>(chi: &ComplexMatrix<T>, control: ControlState) -> ComplexMatrix<T> {
    let d = chi.rows();
    let mut c = ComplexMatrix::identity(8 * d);
    let on = match control {
        ControlState::Zero => 0..4,
        ControlState::One => 4..8,
    };
    for b in on {
        c.set_block(b * d, b * d, chi);
    }
    c
}

fn factor<T: Real>(
    u: &DilationUnitary<T>,
    chi: &ComplexMatrix<T>,
    g: &ComplexMatrix<T>,
    control: ControlState,
) -> Result<(ComplexMatrix<T>, T)> {
    let d = u.system_dim;
    let lifted_g = ComplexMatrix::identity(8).kron(g);
    let full = controlled(chi, control)
        .adjoint()
        .matmul(u.matrix())?
        .matmul(&lifted_g.adjoint())?;
    let m = ComplexMatrix::from_fn(8, 8, |r, c| full.block(r * d, c * d, d, d).trace() / c_real(count::<T>(d)));
    let residual = full.max_abs_diff(&m.kron(&ComplexMatrix::identity(d)));
    Ok((m, residual))
}

/// Recovers the 8×8 ancilla–walker unitary `M'` with both control
/// conventions and keeps the one that factorizes.
pub fn extract_m<T: Real>(
    u: &DilationUnitary<T>,
    params: &MarkovNoiseParams<T>,
    chi: &ComplexMatrix<T>,
    g: &ComplexMatrix<T>,
) -> Result<Decomposition<T>> {
    if chi.rows() != u.system_dim || g.rows() != u.system_dim {
        return Err(Error::dims(u.system_dim, format!("{} and {}", chi.rows(), g.rows())));
    }
    let [gg, ggp, gpg, gpgp] = transition_amplitudes(u.kind, params);
    if [gg, ggp, gpg, gpgp].iter().any(|&x| !(x > T::zero())) {
        return Err(Error::invalid("p", "decomposition needs strictly positive transition probabilities"));
    }
    let mut best: Option<(ComplexMatrix<T>, T, ControlState)> = None;
    for control in [ControlState::One, ControlState::Zero] {
        let (m, res) = factor(u, chi, g, control)?;
        if best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((m, res, control));
        }
    }
    let (m_prime, residual, control) = best.expect("two candidates");
    if !(residual <= real(1e-8)) {
        return Err(Error::FactorizationFailed {
            residual: residual.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let printed = [
        ("(sqrt p_g|g - 1)/sqrt p_g'|g", (gg - T::one()) / gpg),
        ("(sqrt p_g|g + 1)/sqrt p_g'|g", (gg + T::one()) / gpg),
        ("sqrt p_g|g'/sqrt p_g'|g'", ggp / gpgp),
        ("1/sqrt p_g'|g'", T::one() / gpgp),
        ("sqrt p_g|g/sqrt p_g'|g", gg / gpg),
        ("(sqrt p_g'|g + 1)/sqrt p_g|g", (gpg + T::one()) / gg),
    ];
    let entries: Vec<T> = m_prime.as_slice().iter().map(|z| z.norm()).filter(|&x| x > real(1e-12)).collect();
    let ratio_matches = printed
        .iter()
        .map(|(label, target)| {
            let hit = entries.iter().any(|&a| {
                entries
                    .iter()
                    .any(|&b| (a / b - target.abs()).abs() <= real::<T>(1e-9) * (T::one() + target.abs()))
            });
            (label.to_string(), hit)
        })
        .collect();
    Ok(Decomposition {
        unitarity_defect: m_prime.unitarity_defect(),
        m_prime,
        control,
        residual,
        ratio_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::kraus::kraus_step;
    use crate::grover::{grover_operator, GroverInstance};
    use crate::noise::{build_chi, noisy_grover, NoiseSpec, SingleQubitUnitary};

    fn ops() -> (ComplexMatrix<f64>, ComplexMatrix<f64>, ComplexMatrix<f64>) {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let spec = NoiseSpec::prefix(SingleQubitUnitary::pauli_x(), 1, 3).unwrap();
        let g = grover_operator(&inst);
        let chi = build_chi(3, &spec).unwrap();
        let gp = noisy_grover(&g, &chi).unwrap();
        (g, gp, chi)
    }

    #[test]
    fn unitary_including_degenerate_probabilities() {
        let (g, gp, _) = ops();
        for (p, mu) in [(0.5, 0.5), (1.0, 0.2), (0.0, 0.7), (0.3, 1.0)] {
            let params = MarkovNoiseParams::new(p, mu).unwrap();
            for kind in [StepKind::Initial, StepKind::Steady] {
                let u = dilation_unitary(kind, &params, &g, &gp).unwrap();
                assert!(u.matrix().unitarity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn ancilla_blocks_are_the_kraus_operators() {
        let (g, gp, _) = ops();
        let params = MarkovNoiseParams::new(0.35, 0.6).unwrap();
        for kind in [StepKind::Initial, StepKind::Steady] {
            let u = dilation_unitary(kind, &params, &g, &gp).unwrap();
            let k = kraus_step(kind, &params, &g, &gp).unwrap();
            for (a, b) in u.pure_kraus().ops().iter().zip(k.ops()) {
                assert_eq!(a.max_abs_diff(b), 0.0);
            }
        }
    }

    #[test]
    fn partial_trace_route_matches_kraus_route() {
        let (g, gp, _) = ops();
        let params = MarkovNoiseParams::new(0.5, 0.7).unwrap();
        let u = dilation_unitary(StepKind::Steady, &params, &g, &gp).unwrap();
        let k = kraus_step(StepKind::Steady, &params, &g, &gp).unwrap();
        let report = verify_dilation(&u, &k, 20, 7).unwrap();
        assert!(report.passed(1e-12), "{report:?}");
    }

    #[test]
    fn corrupted_unitary_is_detected() {
        let (g, gp, _) = ops();
        let params = MarkovNoiseParams::new(0.5, 0.7).unwrap();
        let mut coef = dilation_coefficients(StepKind::Steady, &params);
        coef[5][0] = -coef[5][0];
        let bad = DilationUnitary::from_coefficients(StepKind::Steady, coef, &g, &gp).unwrap();
        let k = kraus_step(StepKind::Steady, &params, &g, &gp).unwrap();
        let report = verify_dilation(&bad, &k, 5, 1).unwrap();
        assert!(!report.passed(1e-12));
        assert!(report.kraus_mismatch > 1e-3 && report.unitarity_defect > 1e-3);
        // a corrupted magnitude also shows up in the evolved states
        let mut coef = dilation_coefficients(StepKind::Steady, &params);
        coef[0][0] = 0.0;
        let bad = DilationUnitary::from_coefficients(StepKind::Steady, coef, &g, &gp).unwrap();
        assert!(verify_dilation(&bad, &k, 5, 1).unwrap().max_deviation > 1e-3);
    }

    #[test]
    fn identity_noise_reduces_to_plain_grover() {
        let inst = GroverInstance::with_qubits(3).unwrap();
        let g = grover_operator::<f64>(&inst);
        let params = MarkovNoiseParams::new(0.0, 0.4).unwrap();
        let u = dilation_unitary(StepKind::Steady, &params, &g, &g).unwrap();
        let k = kraus_step(StepKind::Steady, &params, &g, &g).unwrap();
        assert!(verify_dilation(&u, &k, 5, 3).unwrap().passed(1e-13));
        // the walker still relaxes, but the register sees plain G
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_density::<f64, _>(16, &mut rng);
        let out = partial_trace(&k.apply(&r).unwrap(), &[2, 8], &[1]).unwrap();
        let rho = partial_trace(&r, &[2, 8], &[1]).unwrap();
        assert!(out.max_abs_diff(&g.conjugate(&rho).unwrap()) < 1e-14);
    }

    #[test]
    fn factored_channel_matches_pure_kraus() {
        let (g, gp, _) = ops();
        let params = MarkovNoiseParams::new(0.2, 0.45).unwrap();
        let u = dilation_unitary(StepKind::Steady, &params, &g, &gp).unwrap();
        let ch = u.walker_channel([1.0, 0.0, 0.0, 0.0]);
        let dense = ch.dense_kraus(&g, &gp);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = random_density::<f64, _>(16, &mut rng);
        let via_terms = dense.iter().fold(ComplexMatrix::zeros(16, 16), |acc, k| &acc + &k.conjugate(&r).unwrap());
        assert!(via_terms.max_abs_diff(&u.pure_kraus().apply(&r).unwrap()) < 1e-14);
    }

    #[test]
    fn decomposition_factorizes() {
        let (g, gp, chi) = ops();
        let params = MarkovNoiseParams::new(0.5, 0.5).unwrap();
        let u = dilation_unitary(StepKind::Steady, &params, &g, &gp).unwrap();
        let d = extract_m(&u, &params, &chi, &g).unwrap();
        assert!(d.residual <= 1e-8);
        assert!(d.unitarity_defect <= 1e-8);
        assert_eq!(d.control, ControlState::One);
        assert!(d.ratio_matches.iter().any(|(_, hit)| *hit));
    }

    #[test]
    fn decomposition_needs_positive_probabilities() {
        let (g, gp, chi) = ops();
        let params = MarkovNoiseParams::new(0.5, 1.0).unwrap();
        let u = dilation_unitary(StepKind::Steady, &params, &g, &gp).unwrap();
        assert!(extract_m(&u, &params, &chi, &g).is_err());
    }
}
