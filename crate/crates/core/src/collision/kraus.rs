use crate::error::{Error, Result};
use crate::markov::{conditional_probs, MarkovNoiseParams};
use crate::quantum_core::{ComplexMatrix, DensityMatrix};
use crate::scalar::{c_real, Real};

/// First collision or any later one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Initial,
    Steady,
}

/// Ordered Kraus operators with outcome labels.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet<T> {
    ops: Vec<ComplexMatrix<T>>,
    labels: Vec<String>,
}

impl<T: Real> KrausSet<T> {
    /// All operators must share one square shape.
    pub fn new(ops: Vec<ComplexMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::invalid("ops", "a Kraus set needs at least one operator"));
        };
        if ops.len() != labels.len() {
            return Err(Error::dims(format!("{} labels", ops.len()), labels.len()));
        }
        let (r, c) = (first.rows(), first.cols());
        if r != c {
            return Err(Error::dims("square Kraus operators", format!("{r}x{c}")));
        }
        if let Some(bad) = ops.iter().find(|k| k.rows() != r || k.cols() != c) {
            return Err(Error::dims(format!("{r}x{c}"), format!("{}x{}", bad.rows(), bad.cols())));
        }
        Ok(KrausSet { ops, labels })
    }

    pub fn ops(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `max |sum K^dagger K - 1|`
    pub fn completeness_defect(&self) -> T {
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim(), self.dim()), |acc, k| &acc + &(&k.adjoint() * k));
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// `max |sum K K^dagger - 1|`; zero for unital maps.
    pub fn unitality_defect(&self) -> T {
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim(), self.dim()), |acc, k| &acc + &(k * &k.adjoint()));
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// `sum K R K^dagger`
    pub fn apply(&self, r: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if r.rows() != self.dim() || r.cols() != self.dim() {
            return Err(Error::dims(
                format!("{0}x{0}", self.dim()),
                format!("{}x{}", r.rows(), r.cols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(r.rows(), r.cols());
        for k in &self.ops {
            out = &out + &k.conjugate(r)?;
        }
        Ok(out)
    }

    pub fn apply_density(&self, r: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::new_unchecked(self.apply(r.matrix())?))
    }
}

/// Pure-ancilla Kraus operators on walker ⊗ system:
/// `c_gg |g><g| ⊗ G`, `c_gg' |g><g'| ⊗ G`, `c_g'g |g'><g| ⊗ G'`,
/// `c_g'g' |g'><g'| ⊗ G'`, where the first collision uses the stationary
/// probabilities and later ones the conditionals.
pub fn kraus_step<T: Real>(
    kind: StepKind,
    params: &MarkovNoiseParams<T>,
    g: &ComplexMatrix<T>,
    g_noisy: &ComplexMatrix<T>,
) -> Result<KrausSet<T>> {
    if !g.is_square() || g.rows() != g_noisy.rows() || g.cols() != g_noisy.cols() {
        return Err(Error::dims(
            format!("{}x{}", g.rows(), g.cols()),
            format!("{}x{}", g_noisy.rows(), g_noisy.cols()),
        ));
    }
    let (gg, ggp, gpg, gpgp) = match kind {
        StepKind::Initial => (params.p_ideal(), params.p_ideal(), params.p_noisy(), params.p_noisy()),
        StepKind::Steady => {
            let c = conditional_probs(params);
            (c.g_given_g, c.g_given_gp, c.gp_given_g, c.gp_given_gp)
        }
    };
    let unit = |to: usize, from: usize, w: T| {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(to, from)] = c_real(w.sqrt());
        m
    };
    let ops = vec![
        unit(0, 0, gg).kron(g),
        unit(0, 1, ggp).kron(g),
        unit(1, 0, gpg).kron(g_noisy),
        unit(1, 1, gpgp).kron(g_noisy),
    ];
    let labels = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    KrausSet::new(ops, labels)
}
