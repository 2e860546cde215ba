//! Local unitary noise on the search register.
//!
//! The noise operator `chi_m` applies one single-qubit unitary `U` to `m`
//! chosen qubits and leaves the others alone; the noisy Grover operator is
//! `G' = chi_m G`. Qubit 0 is the most significant tensor factor.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grover::{GroverInstance, GroverReflection};
use crate::quantum_core::{tol, ComplexMatrix, LeftAction};
use crate::scalar::{c_one, c_real, c_zero, count, cplx, real, Real};

/// `U = [[a, b], [-conj(b) e^{i theta}, conj(a) e^{i theta}]]`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitUnitary<T> {
    a: Complex<T>,
    b: Complex<T>,
    theta: T,
}

impl<T: Real> SingleQubitUnitary<T> {
    /// Fails unless `|a|^2 + |b|^2 = 1` within `1e-10`. `theta` is reduced
    /// into `[0, 2 pi)`.
    pub fn new(a: Complex<T>, b: Complex<T>, theta: T) -> Result<Self> {
        let defect = (a.norm_sqr() + b.norm_sqr() - T::one()).abs();
        if !(defect <= real(1e-10)) {
            return Err(Error::Normalization {
                defect: defect.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        let two_pi = T::PI() + T::PI();
        let mut theta = theta % two_pi;
        if theta < T::zero() {
            theta = theta + two_pi;
        }
        Ok(SingleQubitUnitary { a, b, theta })
    }

    pub fn identity() -> Self {
        SingleQubitUnitary {
            a: c_one(),
            b: c_zero(),
            theta: T::zero(),
        }
    }

    pub fn pauli_x() -> Self {
        SingleQubitUnitary {
            a: c_zero(),
            b: c_one(),
            theta: T::PI(),
        }
    }

    pub fn pauli_y() -> Self {
        SingleQubitUnitary {
            a: c_zero(),
            b: cplx(T::zero(), -T::one()),
            theta: T::PI(),
        }
    }

    pub fn pauli_z() -> Self {
        SingleQubitUnitary {
            a: c_one(),
            b: c_zero(),
            theta: T::PI(),
        }
    }

    /// `(sigma_x + sigma_z) / sqrt 2`
    pub fn hadamard() -> Self {
        let h = c_real(T::FRAC_1_SQRT_2());
        SingleQubitUnitary {
            a: h,
            b: h,
            theta: T::PI(),
        }
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn entries(&self) -> [[Complex<T>; 2]; 2] {
        let phase = Complex::from_polar(T::one(), self.theta);
        [
            [self.a, self.b],
            [-self.b.conj() * phase, self.a.conj() * phase],
        ]
    }

    pub fn matrix(&self) -> ComplexMatrix<T> {
        let e = self.entries();
        ComplexMatrix::from_rows(&[e[0].to_vec(), e[1].to_vec()]).expect("2x2")
    }
}

/// Noise unitary together with the qubits it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec<T> {
    unitary: SingleQubitUnitary<T>,
    positions: Vec<usize>,
}

impl<T: Real> NoiseSpec<T> {
    /// Positions must be distinct qubit indices below `n`; at least one is required.
    pub fn new(unitary: SingleQubitUnitary<T>, positions: Vec<usize>, n: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("m", "noise needs at least one site"));
        }
        if let Some(&p) = positions.iter().find(|&&p| p >= n) {
            return Err(Error::PositionOutOfRange { position: p, n });
        }
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != positions.len() {
            return Err(Error::invalid("positions", "qubit positions must be distinct"));
        }
        Ok(NoiseSpec {
            unitary,
            positions: sorted,
        })
    }

    /// `U^{⊗m} ⊗ 1^{⊗(n-m)}`
    pub fn prefix(unitary: SingleQubitUnitary<T>, m: usize, n: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::invalid("m", format!("noise strength {m} outside [1, {n}]")));
        }
        Self::new(unitary, (0..m).collect(), n)
    }

    pub fn unitary(&self) -> &SingleQubitUnitary<T> {
        &self.unitary
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Noise strength `m`.
    pub fn strength(&self) -> usize {
        self.positions.len()
    }

    fn check_register(&self, n: usize) -> Result<()> {
        match self.positions.iter().find(|&&p| p >= n) {
            Some(&p) => Err(Error::PositionOutOfRange { position: p, n }),
            None => Ok(()),
        }
    }

    /// Number of noisy qubits on which basis index `k` has bit value 1.
    pub fn excitations(&self, k: usize, n: usize) -> usize {
        self.positions
            .iter()
            .filter(|&&p| (k >> (n - 1 - p)) & 1 == 1)
            .count()
    }
}

/// `chi_m` applied gate by gate in `O(m N)` per column.
#[derive(Clone, Debug)]
pub struct LocalUnitaryProduct<T> {
    n: usize,
    gate: [[Complex<T>; 2]; 2],
    positions: Vec<usize>,
}

impl<T: Real> LocalUnitaryProduct<T> {
    pub fn new(n: usize, spec: &NoiseSpec<T>) -> Result<Self> {
        spec.check_register(n)?;
        Ok(LocalUnitaryProduct {
            n,
            gate: spec.unitary().entries(),
            positions: spec.positions().to_vec(),
        })
    }
}

impl<T: Real> LeftAction<T> for LocalUnitaryProduct<T> {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(x.rows(), 1 << self.n, "noise operator dimension mismatch");
        let mut out = x.clone();
        let cols = x.cols();
        let [[u00, u01], [u10, u11]] = self.gate;
        let data = out.as_mut_slice();
        for &q in &self.positions {
            let bit = 1usize << (self.n - 1 - q);
            for i in (0..(1usize << self.n)).filter(|i| i & bit == 0) {
                let j = i | bit;
                let (lo, hi) = data.split_at_mut(j * cols);
                let ri = &mut lo[i * cols..(i + 1) * cols];
                let rj = &mut hi[..cols];
                for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
                    let (xa, xb) = (*a, *b);
                    *a = u00 * xa + u01 * xb;
                    *b = u10 * xa + u11 * xb;
                }
            }
        }
        out
    }
}

/// `G' = chi_m G` without forming either matrix.
#[derive(Clone, Debug)]
pub struct NoisyGroverOperator<T> {
    grover: GroverReflection,
    chi: LocalUnitaryProduct<T>,
}

impl<T: Real> NoisyGroverOperator<T> {
    pub fn new(inst: &GroverInstance, spec: &NoiseSpec<T>) -> Result<Self> {
        Ok(NoisyGroverOperator {
            grover: GroverReflection::new(*inst),
            chi: LocalUnitaryProduct::new(inst.qubits(), spec)?,
        })
    }
}

impl<T: Real> LeftAction<T> for NoisyGroverOperator<T> {
    fn dim(&self) -> usize {
        LeftAction::<T>::dim(&self.grover)
    }

    fn apply_left(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.chi.apply_left(&self.grover.apply_left(x))
    }
}

/// Dense `chi_m`: Kronecker product over qubit slots of `U` (noisy) or `1_2`.
pub fn build_chi<T: Real>(n: usize, spec: &NoiseSpec<T>) -> Result<ComplexMatrix<T>> {
    spec.check_register(n)?;
    let u = spec.unitary().matrix();
    let id = ComplexMatrix::identity(2);
    Ok((0..n).fold(ComplexMatrix::identity(1), |acc, q| {
        let factor = if spec.positions().contains(&q) { &u } else { &id };
        acc.kron(factor)
    }))
}

/// `G' = chi G`
pub fn noisy_grover<T: Real>(g: &ComplexMatrix<T>, chi: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if g.rows() != chi.cols() || !g.is_square() || !chi.is_square() {
        return Err(Error::dims(
            format!("square {0}x{0}", g.rows()),
            format!("{}x{}", chi.rows(), chi.cols()),
        ));
    }
    chi.matmul(g)
}

/// Closed-form quantities for a noise unitary on `m` of `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlaps<T> {
    /// Row sum of `chi_m` for a row with `q` excited noisy qubits.
    pub psi_q: Complex<T>,
    /// `<s|chi_m|s>`
    pub s_chi_s: Complex<T>,
    /// One-step success probability when the marked row has `q` excitations.
    pub success_one_step: T,
}

pub fn closed_form_overlaps<T: Real>(
    u: &SingleQubitUnitary<T>,
    n: usize,
    m: usize,
    q: usize,
) -> Result<Overlaps<T>> {
    if q > m || m > n {
        return Err(Error::invalid(
            "q",
            format!("need 0 <= q <= m <= n, got q={q}, m={m}, n={n}"),
        ));
    }
    let (a, b, theta) = (u.a(), u.b(), u.theta());
    let phase = Complex::from_polar(T::one(), theta);
    let excite_phase = Complex::from_polar(T::one(), theta * count(q));
    let plus = a + b;
    let minus = a.conj() - b.conj();
    let psi_q = excite_phase * plus.powu((m - q) as u32) * minus.powu(q as u32);
    let nf = count::<T>(1 << n);
    let s_chi_s = (plus + phase * minus).powu(m as u32) * (count::<T>(1 << (n - m)) / nf);
    let diag = excite_phase * a.powu((m - q) as u32) * a.conj().powu(q as u32);
    let amp = psi_q * (T::one() - real::<T>(4.0) / nf) + diag * real::<T>(2.0);
    Ok(Overlaps {
        psi_q,
        s_chi_s,
        success_one_step: amp.norm_sqr() / nf,
    })
}

/// Two-step success probability under `sigma_y` noise:
/// `(1/N) |(4/N)(1 - 4/N)(-1)^m - 8/N + 3|^2`.
pub fn sigma_y_p2<T: Real>(database_size: usize, m: usize) -> T {
    let nf = count::<T>(database_size);
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let four_n = real::<T>(4.0) / nf;
    let inner = four_n * (T::one() - four_n) * sign - real::<T>(8.0) / nf + real::<T>(3.0);
    inner * inner / nf
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseTag {
    /// Success probability independent of the noise strength.
    FullInvariant,
    /// Success probability depends only on the parity of the noise strength.
    ParityInvariant,
    NotGood,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseClass {
    pub tag: NoiseTag,
    /// Pauli matrix matching `U` up to a global phase.
    pub canonical: Option<Pauli>,
}

fn pauli_entries<T: Real>(p: Pauli) -> [[Complex<T>; 2]; 2] {
    let (o, z, i) = (c_one::<T>(), c_zero::<T>(), cplx(T::zero(), T::one()));
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

/// Whether `u = e^{i phi} p` for some phase, normalizing by the first
/// nonzero entry of `u`.
fn matches_up_to_phase<T: Real>(u: &[[Complex<T>; 2]; 2], p: &[[Complex<T>; 2]; 2]) -> bool {
    let tol = real::<T>(tol::PHASE);
    let flat_u = [u[0][0], u[0][1], u[1][0], u[1][1]];
    let flat_p = [p[0][0], p[0][1], p[1][0], p[1][1]];
    let Some(k) = flat_u.iter().position(|z| z.norm() > tol) else {
        return false;
    };
    if flat_p[k].norm() <= tol {
        return false;
    }
    let phase = flat_u[k] / flat_p[k];
    flat_u
        .iter()
        .zip(&flat_p)
        .all(|(&a, &b)| (a - b * phase).norm() <= tol)
}

pub fn classify_noise<T: Real>(u: &SingleQubitUnitary<T>) -> NoiseClass {
    let e = u.entries();
    for p in [Pauli::I, Pauli::X, Pauli::Z] {
        if matches_up_to_phase(&e, &pauli_entries(p)) {
            return NoiseClass {
                tag: NoiseTag::FullInvariant,
                canonical: Some(p),
            };
        }
    }
    if matches_up_to_phase(&e, &pauli_entries(Pauli::Y)) {
        return NoiseClass {
            tag: NoiseTag::ParityInvariant,
            canonical: Some(Pauli::Y),
        };
    }
    NoiseClass {
        tag: NoiseTag::NotGood,
        canonical: None,
    }
}

/// `G` and `G'` for `U = sigma_x` restricted to the invariant subspace
/// spanned by `{|s̄>, |w>, |w'>}`, in that order.
pub fn sigma_x_reduced<T: Real>(database_size: usize) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    if database_size < 4 {
        return Err(Error::invalid("N", format!("need N >= 4, got {database_size}")));
    }
    let nf = count::<T>(database_size);
    let two = real::<T>(2.0);
    let r = two * (nf - two).sqrt() / nf;
    let d = two * (nf - two) / nf - T::one();
    let t = two / nf;
    let g = ComplexMatrix::from_real_rows(&[
        &[d, -r, r],
        &[r, T::one() - t, t],
        &[r, -t, t - T::one()],
    ])?;
    let g_noisy = ComplexMatrix::from_real_rows(&[
        &[d, -r, r],
        &[r, -t, t - T::one()],
        &[r, T::one() - t, t],
    ])?;
    Ok((g, g_noisy))
}

/// Index `w'` of the marked state's image under `chi_m` for the default
/// prefix layout.
///
/// For `|a| = 1` the noise is diagonal and `w' = w`. For `|b| = 1` the top
/// `m` bits of `w` are flipped. In 1-based labels this is
/// `N - N/2^m - w + 2 r` with `r` the 1-based position of `w` inside its
/// block of `N/2^m` labels.
pub fn w_prime<T: Real>(u: &SingleQubitUnitary<T>, w: usize, m: usize, n: usize) -> Result<usize> {
    let big_n = 1usize << n;
    if w >= big_n || m == 0 || m > n {
        return Err(Error::invalid("w", format!("need w < {big_n} and 1 <= m <= n")));
    }
    let tol = real::<T>(1e-10);
    if (u.a().norm() - T::one()).abs() <= tol {
        return Ok(w);
    }
    if (u.b().norm() - T::one()).abs() > tol {
        return Err(Error::invalid("U", "w' is defined only for |a| = 1 or |b| = 1"));
    }
    let block = big_n >> m;
    let label = w + 1;
    let r = (label - 1) % block + 1;
    Ok(big_n + 2 * r - block - label - 1)
}
