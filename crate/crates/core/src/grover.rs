//! Noiseless Grover search over `N = 2^n` basis states with one marked
//! element.
//!
//! Basis indices are 0-based; element label `x` in `1..=N` is index `x - 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quantum_core::{ComplexMatrix, LeftAction, PureState};
use crate::scalar::{c_real, c_zero, count, real, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroverInstance {
    n: usize,
    marked: usize,
}

impl GroverInstance {
    pub fn new(n: usize, marked: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", format!("need at least 2 qubits, got {n}")));
        }
        if n > 20 {
            return Err(Error::invalid("n", format!("{n} qubits is beyond dense simulation")));
        }
        if marked >= 1 << n {
            return Err(Error::invalid(
                "marked",
                format!("index {marked} outside [0, {})", 1usize << n),
            ));
        }
        Ok(GroverInstance { n, marked })
    }

    /// Instance with the marked element at index 0.
    pub fn with_qubits(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn uniform_superposition<T: Real>(&self) -> PureState<T> {
        PureState::uniform(self.n)
    }

    pub fn marked_state<T: Real>(&self) -> PureState<T> {
        PureState::basis(self.dim(), self.marked)
    }
}

/// `|s> = N^{-1/2} sum_x |x>`
pub fn uniform_superposition<T: Real>(inst: &GroverInstance) -> PureState<T> {
    inst.uniform_superposition()
}

/// `G = -1 + 2|s><s| - (4/sqrt N)|s><w| + 2|w><w|`, assembled entrywise.
pub fn grover_operator<T: Real>(inst: &GroverInstance) -> ComplexMatrix<T> {
    let n = count::<T>(inst.dim());
    let w = inst.marked();
    let two_over_n = real::<T>(2.0) / n;
    let four_over_n = real::<T>(4.0) / n;
    ComplexMatrix::from_fn(inst.dim(), inst.dim(), |i, j| {
        // 2|s><s| has entries 2/N; (4/sqrt N)|s><w| has 4/N in column w
        let mut v = two_over_n;
        if j == w {
            v = v - four_over_n;
        }
        if i == j {
            v = v - T::one();
        }
        if i == w && j == w {
            v = v + real(2.0);
        }
        c_real(v)
    })
}

/// `D = 2|s><s| - 1`
pub fn diffuser<T: Real>(inst: &GroverInstance) -> ComplexMatrix<T> {
    let s = inst.uniform_superposition::<T>();
    let ss = ComplexMatrix::outer(s.amplitudes(), s.amplitudes());
    &ss.scale_real(real(2.0)) - &ComplexMatrix::identity(inst.dim())
}

/// `O = 1 - 2|w><w|`
pub fn oracle<T: Real>(inst: &GroverInstance) -> ComplexMatrix<T> {
    let mut o = ComplexMatrix::identity(inst.dim());
    o[(inst.marked(), inst.marked())] = c_real(-T::one());
    o
}

/// Grover operator applied in `O(N)` per column without forming the matrix.
#[derive(Clone, Copy, Debug)]
pub struct GroverReflection {
    inst: GroverInstance,
}

impl GroverReflection {
    pub fn new(inst: GroverInstance) -> Self {
        GroverReflection { inst }
    }

    pub fn instance(&self) -> &GroverInstance {
        &self.inst
    }
}

impl<T: Real> LeftAction<T> for GroverReflection {
    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        // G X = -X + 1 ((2/N) sum_i X_i - (4/N) X_w) + 2 e_w X_w
        let dim = self.inst.dim();
        assert_eq!(x.rows(), dim, "Grover operator dimension mismatch");
        let w = self.inst.marked();
        let nf = count::<T>(dim);
        let cols = x.cols();
        let mut col_sum = vec![c_zero::<T>(); cols];
        for i in 0..dim {
            for (acc, &v) in col_sum.iter_mut().zip(x.row(i)) {
                *acc = *acc + v;
            }
        }
        let marked_row = x.row(w).to_vec();
        let shift: Vec<Complex<T>> = col_sum
            .iter()
            .zip(&marked_row)
            .map(|(&s, &m)| s * (real::<T>(2.0) / nf) - m * (real::<T>(4.0) / nf))
            .collect();
        let mut out = ComplexMatrix::zeros(dim, cols);
        for i in 0..dim {
            let src = x.row(i);
            let dst = out.row_mut(i);
            for k in 0..cols {
                dst[k] = shift[k] - src[k];
            }
        }
        for (d, &m) in out.row_mut(w).iter_mut().zip(&marked_row) {
            *d = *d + m * real::<T>(2.0);
        }
        out
    }
}

/// `P(t) = |<w| G^t |s>|^2` for `t = 0..=steps`, by repeated multiplication.
pub fn ideal_success_series<T: Real>(inst: &GroverInstance, steps: usize) -> Vec<T> {
    let g = grover_operator::<T>(inst);
    let mut psi = inst.uniform_superposition::<T>().amplitudes().to_vec();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi[inst.marked()].norm_sqr());
    for _ in 0..steps {
        psi = g.matvec(&psi).expect("square operator");
        out.push(psi[inst.marked()].norm_sqr());
    }
    out
}

/// `floor(pi/4 * sqrt(N))`
pub fn optimal_iterations(database_size: usize) -> Result<usize> {
    if database_size < 4 {
        return Err(Error::invalid(
            "N",
            format!("database size must be at least 4, got {database_size}"),
        ));
    }
    Ok((std::f64::consts::FRAC_PI_4 * (database_size as f64).sqrt()).floor() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_superposition_amplitudes() {
        let one = PureState::<f64>::uniform(1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(one.amplitudes().iter().all(|a| (a.re - h).abs() < 1e-15 && a.im == 0.0));
        let inst = GroverInstance::with_qubits(5).unwrap();
        let s = inst.uniform_superposition::<f64>();
        assert_eq!(s.dim(), 32);
        assert!(s.amplitudes().iter().all(|a| (a.re - 1.0 / 32f64.sqrt()).abs() < 1e-16));
        for w in [0, 7, 31] {
            let ov = PureState::<f64>::basis(32, w).inner(&s);
            assert!((ov.re - 1.0 / 32f64.sqrt()).abs() < 1e-16);
        }
    }

    #[test]
    fn grover_operator_is_unitary() {
        for n in 2..=7 {
            let g = grover_operator::<f64>(&GroverInstance::new(n, (1 << n) - 1).unwrap());
            assert!(g.unitarity_defect() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn grover_operator_equals_diffuser_times_oracle() {
        for (n, w) in [(2, 0), (3, 5), (5, 17)] {
            let inst = GroverInstance::new(n, w).unwrap();
            let g = grover_operator::<f64>(&inst);
            let product = &diffuser(&inst) * &oracle(&inst);
            assert!(g.max_abs_diff(&product) < 1e-12);
        }
    }

    #[test]
    fn four_element_search_hits_in_one_step() {
        let inst = GroverInstance::with_qubits(2).unwrap();
        let g = grover_operator::<f64>(&inst);
        let out = g.matvec(inst.uniform_superposition::<f64>().amplitudes()).unwrap();
        assert!((out[0].re - 1.0).abs() < 1e-15);
        assert!(out[0].im.abs() < 1e-15);
    }

    #[test]
    fn ideal_series_for_32_elements() {
        let inst = GroverInstance::with_qubits(5).unwrap();
        let p = ideal_success_series::<f64>(&inst, 10);
        assert!((p[0] - 1.0 / 32.0).abs() < 1e-15);
        let best = (0..p.len()).max_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap()).unwrap();
        assert_eq!(best, 4);
        let expected = (9.0 * (1.0f64 / 32f64.sqrt()).asin()).sin().powi(2);
        assert!((p[4] - expected).abs() < 1e-12);
        assert!((p[4] - 0.99918).abs() < 1e-5);
    }

    #[test]
    fn optimal_iteration_counts() {
        assert_eq!(optimal_iterations(32).unwrap(), 4);
        assert_eq!(optimal_iterations(4).unwrap(), 1);
        assert_eq!(optimal_iterations(64).unwrap(), 6);
        assert!(optimal_iterations(2).is_err());
    }

    #[test]
    fn structured_reflection_matches_dense() {
        let inst = GroverInstance::new(4, 9).unwrap();
        let dense = grover_operator::<f64>(&inst);
        let fast = GroverReflection::new(inst);
        assert!(LeftAction::<f64>::to_dense(&fast).max_abs_diff(&dense) < 1e-15);
    }

    #[test]
    fn instance_validation() {
        assert!(GroverInstance::new(1, 0).is_err());
        assert!(GroverInstance::new(3, 8).is_err());
        assert!(GroverInstance::new(3, 7).is_ok());
    }
}
