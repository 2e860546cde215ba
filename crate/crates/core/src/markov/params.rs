use crate::error::{Error, Result};
use crate::scalar::Real;

/// Noise probability `p` and memory `mu` of the two-state Markov chain that
/// decides between the ideal and the noisy Grover operator at each step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovNoiseParams<T> {
    p: T,
    mu: T,
}

impl<T: Real> MarkovNoiseParams<T> {
    pub fn new(p: T, mu: T) -> Result<Self> {
        for (name, v) in [("p", p), ("mu", mu)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::invalid(name, format!("{v} is outside [0, 1]")));
            }
        }
        Ok(MarkovNoiseParams { p, mu })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Stationary probability of the ideal operator, `1 - p`.
    pub fn p_ideal(&self) -> T {
        T::one() - self.p
    }

    /// Stationary probability of the noisy operator, `p`.
    pub fn p_noisy(&self) -> T {
        self.p
    }
}

/// `p_{k|l}`: probability of operator `k` given that `l` fired on the
/// previous step. `g` is the ideal operator, `g'` the noisy one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalProbs<T> {
    pub g_given_g: T,
    pub gp_given_g: T,
    pub g_given_gp: T,
    pub gp_given_gp: T,
}

impl<T: Real> ConditionalProbs<T> {
    /// `p_{to|from}` with 0 = ideal, 1 = noisy.
    pub fn get(&self, to: usize, from: usize) -> T {
        match (to, from) {
            (0, 0) => self.g_given_g,
            (1, 0) => self.gp_given_g,
            (0, 1) => self.g_given_gp,
            (1, 1) => self.gp_given_gp,
            _ => panic!("walker index out of range"),
        }
    }
}

/// `p_{k|l} = (1 - mu) p_k + mu [k = l]`
pub fn conditional_probs<T: Real>(params: &MarkovNoiseParams<T>) -> ConditionalProbs<T> {
    let keep = T::one() - params.mu();
    ConditionalProbs {
        g_given_g: keep * params.p_ideal() + params.mu(),
        gp_given_g: keep * params.p_noisy(),
        g_given_gp: keep * params.p_ideal(),
        gp_given_gp: keep * params.p_noisy() + params.mu(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memoryless_and_perfect_memory() {
        let c = conditional_probs(&MarkovNoiseParams::new(0.3, 0.0).unwrap());
        assert_eq!((c.g_given_g, c.g_given_gp), (0.7, 0.7));
        assert_eq!((c.gp_given_g, c.gp_given_gp), (0.3, 0.3));
        let c = conditional_probs(&MarkovNoiseParams::new(0.3, 1.0).unwrap());
        assert_eq!((c.g_given_g, c.gp_given_gp), (1.0, 1.0));
        assert_eq!((c.gp_given_g, c.g_given_gp), (0.0, 0.0));
    }

    #[test]
    fn intermediate_memory() {
        let c = conditional_probs(&MarkovNoiseParams::new(0.7f64, 0.5).unwrap());
        assert!((c.gp_given_gp - 0.85).abs() < 1e-15);
        assert!((c.g_given_gp - 0.15).abs() < 1e-15);
        for from in 0..2 {
            assert!((c.get(0, from) + c.get(1, from) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(MarkovNoiseParams::new(1.2, 0.5).is_err());
        assert!(MarkovNoiseParams::new(0.5, -0.1).is_err());
        assert!(MarkovNoiseParams::new(f64::NAN, 0.5).is_err());
    }
}
