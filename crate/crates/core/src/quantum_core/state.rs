use num_complex::Complex;

use super::eigen::eigvalsh;
use super::matrix::ComplexMatrix;
use super::tol;
use crate::error::{Error, Result};
use crate::scalar::{c_zero, count, real, Real};

/// Normalized amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Rejects vectors whose 2-norm differs from one by more than `1e-12`.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let defect = (norm - T::one()).abs();
        if defect > real(tol::NORM) {
            return Err(Error::invalid(
                "amplitudes",
                format!("state norm differs from 1 by {defect}"),
            ));
        }
        Ok(PureState { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![c_zero(); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        PureState { amplitudes }
    }

    /// Equal superposition `2^{-n/2} sum_x |x>` over `n_qubits` qubits.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let amp = Complex::new(T::one() / count::<T>(dim).sqrt(), T::zero());
        PureState {
            amplitudes: vec![amp; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(c_zero(), |acc, (a, &b)| acc + a.conj() * b)
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        DensityMatrix(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }
}

/// Outcome of [`assert_density`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityReport<T> {
    pub hermiticity_defect: T,
    pub trace_defect: T,
    pub min_eigenvalue: T,
    pub tolerance: T,
}

impl<T: Real> DensityReport<T> {
    pub fn passed(&self) -> bool {
        self.hermiticity_defect <= self.tolerance
            && self.trace_defect <= self.tolerance
            && self.min_eigenvalue >= -self.tolerance
    }

    /// Name and size of the first violated condition.
    pub fn violation(&self) -> Option<(&'static str, T)> {
        if self.hermiticity_defect > self.tolerance {
            Some(("hermiticity", self.hermiticity_defect))
        } else if self.trace_defect > self.tolerance {
            Some(("unit trace", self.trace_defect))
        } else if self.min_eigenvalue < -self.tolerance {
            Some(("positivity", -self.min_eigenvalue))
        } else {
            None
        }
    }
}

/// Hermiticity, trace and positivity diagnostics for a square matrix.
///
/// Non-square input reports infinite defects instead of failing.
pub fn assert_density<T: Real>(rho: &ComplexMatrix<T>, tol: T) -> DensityReport<T> {
    if !rho.is_square() {
        return DensityReport {
            hermiticity_defect: T::infinity(),
            trace_defect: T::infinity(),
            min_eigenvalue: T::neg_infinity(),
            tolerance: tol,
        };
    }
    let herm = rho.hermiticity_defect();
    let trace_defect = (rho.trace() - Complex::new(T::one(), T::zero())).norm();
    let min_eigenvalue = if rho.is_finite() {
        eigvalsh(rho)
            .ok()
            .and_then(|v| v.first().copied())
            .unwrap_or(T::neg_infinity())
    } else {
        T::neg_infinity()
    };
    DensityReport {
        hermiticity_defect: if rho.is_finite() { herm } else { T::infinity() },
        trace_defect,
        min_eigenvalue,
        tolerance: tol,
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T>(ComplexMatrix<T>);

impl<T: Real> DensityMatrix<T> {
    /// Validates with the default tolerance of `1e-10`.
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(m, real(tol::DENSITY))
    }

    pub fn with_tolerance(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        let report = assert_density(&m, tol);
        match report.violation() {
            None => Ok(DensityMatrix(m)),
            Some(("hermiticity", d)) => Err(Error::NotHermitian {
                defect: d.to_f64().unwrap_or(f64::INFINITY),
            }),
            Some((name, d)) => Err(Error::InvariantViolation {
                name: format!("density matrix {name}"),
                deviation: d.to_f64().unwrap_or(f64::INFINITY),
            }),
        }
    }

    /// Wraps a matrix produced by a trace-preserving map without re-checking.
    pub fn new_unchecked(m: ComplexMatrix<T>) -> Self {
        DensityMatrix(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(dim).scale_real(T::one() / count(dim)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    /// Real part of the diagonal entry `<i|rho|i>`.
    pub fn population(&self, i: usize) -> T {
        self.0[(i, i)].re
    }

    pub fn report(&self, tol: T) -> DensityReport<T> {
        assert_density(&self.0, tol)
    }
}

/// Hermitian matrix with arbitrary real trace.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T>(ComplexMatrix<T>);

impl<T: Real> HermitianOperator<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", m.rows(), m.cols())));
        }
        let defect = m.hermiticity_defect();
        if !(defect <= real(tol::HERMITIAN)) {
            return Err(Error::NotHermitian {
                defect: defect.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        Ok(HermitianOperator(m))
    }

    pub fn new_unchecked(m: ComplexMatrix<T>) -> Self {
        HermitianOperator(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

impl<T: Real> From<DensityMatrix<T>> for HermitianOperator<T> {
    fn from(d: DensityMatrix<T>) -> Self {
        HermitianOperator(d.0)
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm<T: Real>(h: &HermitianOperator<T>) -> Result<T> {
    trace_norm_of(h.matrix())
}

/// Trace norm of a raw matrix that is Hermitian up to `1e-10`.
pub fn trace_norm_of<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let defect = m.hermiticity_defect();
    if !(defect <= real(tol::HERMITIAN)) {
        return Err(Error::NotHermitian {
            defect: defect.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(eigvalsh(m)?.into_iter().map(T::abs).sum())
}

/// `D(rho1, rho2) = ||rho1 - rho2||_1 / 2`
pub fn trace_distance<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    matrix_trace_distance(rho1.matrix(), rho2.matrix())
}

pub(crate) fn matrix_trace_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::dims(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    Ok(trace_norm_of(&(a - b))? * real(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_real;

    #[test]
    fn maximally_mixed_qubit_is_a_density_matrix() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(rho.report(1e-10).passed());
    }

    #[test]
    fn negative_eigenvalue_fails() {
        let m = ComplexMatrix::diagonal(&[c_real(1.5), c_real(-0.5)]);
        let report = assert_density(&m, 1e-10);
        assert!(!report.passed());
        assert_eq!(report.violation().unwrap().0, "positivity");
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn non_square_reports_failure() {
        let m = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(!assert_density(&m, 1e-10).passed());
    }

    #[test]
    fn trace_norm_of_density_is_one() {
        let s = PureState::<f64>::uniform(3);
        let h: HermitianOperator<f64> = s.projector().into();
        assert!((trace_norm(&h).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_of_projector_difference() {
        // eigenvalues are +-sqrt(1 - |<w|s>|^2)
        let s = PureState::<f64>::uniform(3);
        let w = PureState::<f64>::basis(8, 0);
        let diff = s.projector().matrix() - w.projector().matrix();
        let got = trace_norm(&HermitianOperator::new(diff).unwrap()).unwrap();
        assert!((got - 2.0 * (1.0f64 - 1.0 / 8.0).sqrt()).abs() < 1e-14);
        assert!((got - 1.8708).abs() < 1e-4);
    }

    #[test]
    fn trace_norm_of_zero_and_rejection_of_non_hermitian() {
        let z = HermitianOperator::new(ComplexMatrix::<f64>::zeros(4, 4)).unwrap();
        assert_eq!(trace_norm(&z).unwrap(), 0.0);
        let bad = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(HermitianOperator::new(bad.clone()), Err(Error::NotHermitian { .. })));
        assert!(trace_norm_of(&bad).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let zero = PureState::<f64>::basis(2, 0).projector();
        let one = PureState::<f64>::basis(2, 1).projector();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(trace_distance(&zero, &mixed).is_err());
    }

    #[test]
    fn pure_state_normalization_checked() {
        assert!(PureState::new(vec![c_real(1.0), c_real(1.0)]).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(PureState::new(vec![c_real(h), c_real(h)]).is_ok());
    }
}
