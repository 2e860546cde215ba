//! Walker ⊗ system channels whose Kraus operators all factor as
//! `c ⊗ V` with `c` a 2×2 walker matrix and `V` either the ideal or the
//! noisy Grover operator.
//!
//! Working on the four `N×N` walker blocks of the joint state keeps every
//! step at a handful of `V X V^dagger` products, which is what makes the
//! long sweeps affordable.

use num_complex::Complex;

use super::params::{conditional_probs, MarkovNoiseParams};
use crate::error::{Error, Result};
use crate::quantum_core::{ComplexMatrix, DensityMatrix, LeftAction, PureState};
use crate::scalar::{c_real, c_zero, Real};

/// Which system operator a Kraus term carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Ideal,
    Noisy,
}

impl Branch {
    fn index(self) -> usize {
        match self {
            Branch::Ideal => 0,
            Branch::Noisy => 1,
        }
    }
}

/// One Kraus operator `walker ⊗ V_branch`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerTerm<T> {
    pub walker: [[Complex<T>; 2]; 2],
    pub branch: Branch,
}

impl<T: Real> WalkerTerm<T> {
    /// `weight |to><from| ⊗ V_branch`
    pub fn transition(to: usize, from: usize, weight: T, branch: Branch) -> Self {
        let mut walker = [[c_zero(); 2]; 2];
        walker[to][from] = c_real(weight);
        WalkerTerm { walker, branch }
    }

    pub fn walker_matrix(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(&[self.walker[0].to_vec(), self.walker[1].to_vec()]).expect("2x2")
    }

    /// Dense `2N×2N` operator.
    pub fn to_dense(&self, ideal: &ComplexMatrix<T>, noisy: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let v = match self.branch {
            Branch::Ideal => ideal,
            Branch::Noisy => noisy,
        };
        self.walker_matrix().kron(v)
    }
}

/// Kraus map given as a list of factored terms.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerChannel<T> {
    terms: Vec<WalkerTerm<T>>,
    // mix[b][i][j][k][l] = sum over terms on branch b of c_ik conj(c_jl)
    mix: Box<[[[[[Complex<T>; 2]; 2]; 2]; 2]; 2]>,
}

impl<T: Real> WalkerChannel<T> {
    pub fn new(terms: Vec<WalkerTerm<T>>) -> Self {
        let mut mix = Box::new([[[[[c_zero(); 2]; 2]; 2]; 2]; 2]);
        for term in &terms {
            let c = &term.walker;
            let b = term.branch.index();
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            mix[b][i][j][k][l] = mix[b][i][j][k][l] + c[i][k] * c[j][l].conj();
                        }
                    }
                }
            }
        }
        WalkerChannel { terms, mix }
    }

    /// First collision: the walker is prepared according to the stationary
    /// probabilities, whatever its previous state.
    pub fn pure_first_step(params: &MarkovNoiseParams<T>) -> Self {
        let g = params.p_ideal().sqrt();
        let gp = params.p_noisy().sqrt();
        Self::new(vec![
            WalkerTerm::transition(0, 0, g, Branch::Ideal),
            WalkerTerm::transition(0, 1, g, Branch::Ideal),
            WalkerTerm::transition(1, 0, gp, Branch::Noisy),
            WalkerTerm::transition(1, 1, gp, Branch::Noisy),
        ])
    }

    /// Later collisions: transitions weighted by the conditional probabilities.
    pub fn pure_steady_step(params: &MarkovNoiseParams<T>) -> Self {
        let c = conditional_probs(params);
        Self::new(vec![
            WalkerTerm::transition(0, 0, c.g_given_g.sqrt(), Branch::Ideal),
            WalkerTerm::transition(0, 1, c.g_given_gp.sqrt(), Branch::Ideal),
            WalkerTerm::transition(1, 0, c.gp_given_g.sqrt(), Branch::Noisy),
            WalkerTerm::transition(1, 1, c.gp_given_gp.sqrt(), Branch::Noisy),
        ])
    }

    pub fn terms(&self) -> &[WalkerTerm<T>] {
        &self.terms
    }

    /// `max |sum_k c_k^dagger c_k - 1|`, computed per branch-free walker factor.
    ///
    /// Since `V` is unitary for both branches this equals the completeness
    /// defect of the full Kraus set.
    pub fn completeness_defect(&self) -> T {
        let mut acc = ComplexMatrix::<T>::zeros(2, 2);
        for term in &self.terms {
            let c = term.walker_matrix();
            acc = &acc + &(&c.adjoint() * &c);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// Dense Kraus operators on walker ⊗ system.
    pub fn dense_kraus(&self, ideal: &ComplexMatrix<T>, noisy: &ComplexMatrix<T>) -> Vec<ComplexMatrix<T>> {
        self.terms.iter().map(|t| t.to_dense(ideal, noisy)).collect()
    }

    /// `R -> sum_k K_k R K_k^dagger` with `V_ideal`, `V_noisy` given as
    /// left actions. `R` need not be Hermitian.
    pub fn apply<A, B>(&self, ideal: &A, noisy: &B, r: &JointState<T>) -> Result<JointState<T>>
    where
        A: LeftAction<T> + ?Sized,
        B: LeftAction<T> + ?Sized,
    {
        let d = r.system_dim();
        if ideal.dim() != d || noisy.dim() != d {
            return Err(Error::dims(
                format!("system operators of dimension {d}"),
                format!("{} and {}", ideal.dim(), noisy.dim()),
            ));
        }
        let zero = c_zero::<T>();
        let mut out: [[Option<ComplexMatrix<T>>; 2]; 2] = Default::default();
        for b in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let Some(block) = &r.blocks[k][l] else { continue };
                    let needed = (0..4).any(|ij| self.mix[b][ij / 2][ij % 2][k][l] != zero);
                    if !needed {
                        continue;
                    }
                    let moved = if b == 0 {
                        ideal.conjugate(block)
                    } else {
                        noisy.conjugate(block)
                    };
                    for i in 0..2 {
                        for j in 0..2 {
                            let w = self.mix[b][i][j][k][l];
                            if w == zero {
                                continue;
                            }
                            let slot = out[i][j].get_or_insert_with(|| ComplexMatrix::zeros(d, d));
                            slot.add_scaled(w, &moved);
                        }
                    }
                }
            }
        }
        Ok(JointState { d, blocks: out })
    }
}

/// Operator on walker ⊗ system stored as its four walker blocks
/// `<k|R|l>`; blocks that are exactly zero are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState<T> {
    d: usize,
    blocks: [[Option<ComplexMatrix<T>>; 2]; 2],
}

impl<T: Real> JointState<T> {
    /// `|walker><walker| ⊗ rho` for a pure walker state.
    pub fn product(walker: [Complex<T>; 2], system: &ComplexMatrix<T>) -> Result<Self> {
        if !system.is_square() {
            return Err(Error::dims("square system operator", format!("{}x{}", system.rows(), system.cols())));
        }
        let mut blocks: [[Option<ComplexMatrix<T>>; 2]; 2] = Default::default();
        for k in 0..2 {
            for l in 0..2 {
                let w = walker[k] * walker[l].conj();
                if w != c_zero() {
                    blocks[k][l] = Some(system.scale(w));
                }
            }
        }
        Ok(JointState {
            d: system.rows(),
            blocks,
        })
    }

    pub fn from_dense(r: &ComplexMatrix<T>) -> Result<Self> {
        if !r.is_square() || r.rows() % 2 != 0 {
            return Err(Error::dims("square matrix of even dimension", format!("{}x{}", r.rows(), r.cols())));
        }
        let d = r.rows() / 2;
        let mut blocks: [[Option<ComplexMatrix<T>>; 2]; 2] = Default::default();
        for k in 0..2 {
            for l in 0..2 {
                blocks[k][l] = Some(r.block(k * d, l * d, d, d));
            }
        }
        Ok(JointState { d, blocks })
    }

    pub fn system_dim(&self) -> usize {
        self.d
    }

    pub fn block(&self, k: usize, l: usize) -> Option<&ComplexMatrix<T>> {
        self.blocks[k][l].as_ref()
    }

    /// Whether both walker coherence blocks are absent.
    pub fn is_walker_diagonal(&self) -> bool {
        self.blocks[0][1].is_none() && self.blocks[1][0].is_none()
    }

    pub fn to_dense(&self) -> ComplexMatrix<T> {
        let mut r = ComplexMatrix::zeros(2 * self.d, 2 * self.d);
        for k in 0..2 {
            for l in 0..2 {
                if let Some(b) = &self.blocks[k][l] {
                    r.set_block(k * self.d, l * self.d, b);
                }
            }
        }
        r
    }

    /// `Tr_walker R`
    pub fn system_marginal(&self) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for k in 0..2 {
            if let Some(b) = &self.blocks[k][k] {
                out = &out + b;
            }
        }
        out
    }

    /// `Tr_system R`
    pub fn walker_marginal(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(2, 2, |k, l| self.blocks[k][l].as_ref().map_or(c_zero(), |b| b.trace()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..2).fold(c_zero(), |acc, k| acc + self.blocks[k][k].as_ref().map_or(c_zero(), |b| b.trace()))
    }

    /// `sum_k <k, x|R|k, x>`
    pub fn population(&self, x: usize) -> T {
        (0..2)
            .filter_map(|k| self.blocks[k][k].as_ref())
            .map(|b| b[(x, x)].re)
            .sum()
    }
}

/// `R_0 = |+><+| ⊗ |s><s|` with `|+> = (|g> + |g'>)/sqrt 2`.
pub fn initial_joint_state<T: Real>(system: &PureState<T>) -> JointState<T> {
    let h = c_real(T::FRAC_1_SQRT_2());
    JointState::product([h, h], system.projector().matrix()).expect("projector is square")
}

/// The initial joint state as a validated dense density matrix.
pub fn initial_joint_density<T: Real>(system: &PureState<T>) -> DensityMatrix<T> {
    DensityMatrix::new_unchecked(initial_joint_state(system).to_dense())
}

/// The superoperators `S_0` and `S` read as transition maps between walker
/// populations: the term `p_{k|l} |k><l| ⊗ Phi` sends `Phi[<l|R|l>]`
/// to the block `|k><k|`.
///
/// Walker coherences of the input are not read. On every walker-diagonal
/// state this coincides with the Kraus map of the same kind.
pub fn transition_superoperator<T, A, B>(
    weights: [[T; 2]; 2],
    ideal: &A,
    noisy: &B,
    r: &JointState<T>,
) -> JointState<T>
where
    T: Real,
    A: LeftAction<T> + ?Sized,
    B: LeftAction<T> + ?Sized,
{
    let d = r.system_dim();
    let mut blocks: [[Option<ComplexMatrix<T>>; 2]; 2] = Default::default();
    for (to, row) in weights.iter().enumerate() {
        let mut acc: Option<ComplexMatrix<T>> = None;
        for (from, &w) in row.iter().enumerate() {
            let Some(b) = &r.blocks[from][from] else { continue };
            if w == T::zero() {
                continue;
            }
            let moved = if to == 0 { ideal.conjugate(b) } else { noisy.conjugate(b) };
            acc.get_or_insert_with(|| ComplexMatrix::zeros(d, d))
                .add_scaled(c_real(w), &moved);
        }
        blocks[to][to] = acc;
    }
    JointState { d, blocks }
}

/// Weight tables `[to][from]` for the first and later transition maps.
pub fn transition_weights<T: Real>(params: &MarkovNoiseParams<T>, first: bool) -> [[T; 2]; 2] {
    if first {
        [
            [params.p_ideal(), params.p_ideal()],
            [params.p_noisy(), params.p_noisy()],
        ]
    } else {
        let c = conditional_probs(params);
        [[c.g_given_g, c.g_given_gp], [c.gp_given_g, c.gp_given_gp]]
    }
}
