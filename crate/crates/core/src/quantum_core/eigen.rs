//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! a real plane rotation that annihilates it. Sweeps stop once the
//! off-diagonal Frobenius mass falls below `eps * ||A||_F`.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Option<ComplexMatrix<T>>,
}

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    jacobi(h, false).map(|e| e.values)
}

pub fn eigh<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    jacobi(h, true)
}

fn off_diagonal_mass<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi<T: Real>(h: &ComplexMatrix<T>, want_vectors: bool) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", h.rows(), h.cols())));
    }
    let n = h.rows();
    let scale = h.frobenius_norm();
    let mut a = h.clone();
    // symmetrize so rounding in the input cannot stall the sweeps
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()).scale(real(0.5));
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let eps = T::epsilon();
    let target = eps * scale;

    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_mass(&a) <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= eps * eps * scale {
                        continue;
                    }
                    let phase = apq / r; // e^{i phi}
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (r + r);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                    let j00 = Complex::new(c, T::zero());
                    let j01 = Complex::new(s, T::zero());
                    let j10 = phase.conj() * (-s);
                    let j11 = phase.conj() * c;
                    rotate(&mut a, p, q, [j00, j01, j10, j11]);
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    a[(p, p)] = Complex::new(app - t * r, T::zero());
                    a[(q, q)] = Complex::new(aqq + t * r, T::zero());
                    if let Some(v) = v.as_mut() {
                        rotate_columns(v, p, q, [j00, j01, j10, j11]);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok(HermitianEigen { values, vectors })
}

/// `A <- J^dagger A J` for `J` acting on coordinates `p`, `q`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize, j: [Complex<T>; 4]) {
    rotate_columns(a, p, q, j);
    let [j00, j01, j10, j11] = j;
    let n = a.cols();
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)];
        a[(p, k)] = j00.conj() * xp + j10.conj() * xq;
        a[(q, k)] = j01.conj() * xp + j11.conj() * xq;
    }
}

/// `A <- A J`
fn rotate_columns<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize, j: [Complex<T>; 4]) {
    let [j00, j01, j10, j11] = j;
    for k in 0..a.rows() {
        let xp = a[(k, p)];
        let xq = a[(k, q)];
        a[(k, p)] = xp * j00 + xq * j10;
        a[(k, q)] = xp * j01 + xq * j11;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c_real, cplx};

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let m = ComplexMatrix::diagonal(&[c_real(3.0), c_real(-1.0), c_real(2.0)]);
        assert_eq!(eigvalsh(&m).unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y = ComplexMatrix::from_rows(&[
            vec![c_real(0.0f64), cplx(0.0, -1.0)],
            vec![cplx(0.0, 1.0), c_real(0.0)],
        ])
        .unwrap();
        let e = eigh(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let v = e.vectors.unwrap();
        let d = ComplexMatrix::diagonal(&e.values.iter().map(|&x| c_real(x)).collect::<Vec<_>>());
        let rebuilt = &(&v * &d) * &v.adjoint();
        assert!(rebuilt.max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn reconstruction_of_dense_hermitian() {
        let n = 7;
        let h = ComplexMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                c_real(i * 0.3 - 1.0)
            } else {
                let re = (i + 2.0 * j).sin() + (j + 2.0 * i).sin();
                let im = (i - j) * 0.1;
                cplx(re * 0.5, im)
            }
        });
        assert!(h.hermiticity_defect() < 1e-15);
        let e = eigh(&h).unwrap();
        let v = e.vectors.unwrap();
        assert!(v.unitarity_defect() < 1e-13);
        let d = ComplexMatrix::diagonal(&e.values.iter().map(|&x| c_real(x)).collect::<Vec<_>>());
        assert!((&(&v * &d) * &v.adjoint()).max_abs_diff(&h) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(eigvalsh(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn works_in_single_precision() {
        let m = ComplexMatrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let v = eigvalsh(&m).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-6 && (v[1] - 3.0).abs() < 1e-6);
    }
}
