use super::matrix::ComplexMatrix;
use crate::scalar::Real;

/// A square operator that can act on the left of a (possibly rectangular)
/// matrix whose row count equals its dimension.
///
/// Dense matrices implement it by multiplication; structured operators such
/// as the Grover reflection or a product of single-qubit gates implement it
/// in `O(dim * cols)` time.
pub trait LeftAction<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// `self * x`
    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T>;

    /// `self * x * self^dagger`
    fn conjugate(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        // (V (V X)^dagger)^dagger = V X V^dagger
        self.apply_left(&self.apply_left(x).adjoint()).adjoint()
    }

    fn to_dense(&self) -> ComplexMatrix<T> {
        self.apply_left(&ComplexMatrix::identity(self.dim()))
    }
}

impl<T: Real> LeftAction<T> for ComplexMatrix<T> {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(x).expect("operator/matrix dimension mismatch")
    }

    fn conjugate(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(x)
            .and_then(|y| y.matmul(&self.adjoint()))
            .expect("operator/matrix dimension mismatch")
    }

    fn to_dense(&self) -> ComplexMatrix<T> {
        self.clone()
    }
}

impl<T: Real, A: LeftAction<T> + ?Sized> LeftAction<T> for &A {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        (**self).apply_left(x)
    }

    fn conjugate(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        (**self).conjugate(x)
    }
}

/// `1_spectator ⊗ V`: lifts an operator onto a space with an untouched
/// leading factor.
#[derive(Clone, Debug)]
pub struct WithSpectator<V> {
    pub inner: V,
    pub spectator_dim: usize,
}

impl<T: Real, V: LeftAction<T>> LeftAction<T> for WithSpectator<V> {
    fn dim(&self) -> usize {
        self.spectator_dim * self.inner.dim()
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let d = self.inner.dim();
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for a in 0..self.spectator_dim {
            let slab = x.block(a * d, 0, d, x.cols());
            out.set_block(a * d, 0, &self.inner.apply_left(&slab));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn spectator_lift_matches_kronecker() {
        let v = ComplexMatrix::<f64>::from_fn(3, 3, |i, j| cplx((i + 2 * j) as f64, i as f64 - j as f64));
        let lifted = WithSpectator {
            inner: v.clone(),
            spectator_dim: 2,
        };
        let dense = ComplexMatrix::identity(2).kron(&v);
        let x = ComplexMatrix::from_fn(6, 6, |i, j| cplx((i * j) as f64 * 0.1, (i + j) as f64));
        assert!(lifted.apply_left(&x).max_abs_diff(&dense.matmul(&x).unwrap()) < 1e-12);
        assert!(lifted.conjugate(&x).max_abs_diff(&dense.conjugate(&x).unwrap()) < 1e-11);
    }
}
