use super::dilation::DilationUnitary;
use super::kraus::KrausSet;
use crate::error::{Error, Result};
use crate::markov::WalkerChannel;
use crate::scalar::Real;

/// Two-level ancilla at dimensionless temperature `T` with Boltzmann
/// weights `z1 >= z2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalBathParams<T> {
    pub temperature: T,
    pub z1: T,
    pub z2: T,
}

impl<T: Real> ThermalBathParams<T> {
    /// Kraus weights `pi_beta` for the two-ancilla basis `00, 01, 10, 11`:
    /// square roots of the product-state populations.
    pub fn amplitudes(&self) -> [T; 4] {
        let mixed = (self.z1 * self.z2).sqrt();
        [self.z1, mixed, mixed, self.z2]
    }
}

/// `z1 = 1/(1 + e^{-1/T})`, `z2 = e^{-1/T}/(1 + e^{-1/T})`
pub fn thermal_weights<T: Real>(temperature: T) -> Result<ThermalBathParams<T>> {
    if !(temperature > T::zero()) || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("must be positive and finite, got {temperature}"),
        ));
    }
    let boltz = (-temperature.recip()).exp();
    let z1 = (T::one() + boltz).recip();
    Ok(ThermalBathParams {
        temperature,
        z1,
        z2: boltz * z1,
    })
}

/// Sixteen operators `K_{alpha beta} = pi_beta <alpha|U|beta>`.
pub fn thermal_kraus<T: Real>(u: &DilationUnitary<T>, bath: &ThermalBathParams<T>) -> KrausSet<T> {
    let pi = bath.amplitudes();
    let mut ops = Vec::with_capacity(16);
    let mut labels = Vec::with_capacity(16);
    for alpha in 0..4 {
        for (beta, &w) in pi.iter().enumerate() {
            ops.push(u.ancilla_block(alpha, beta).scale_real(w));
            labels.push(format!("{alpha:02b}{beta:02b}"));
        }
    }
    KrausSet::new(ops, labels).expect("equal blocks")
}

/// Factored form of [`thermal_kraus`].
pub fn thermal_channel<T: Real>(u: &DilationUnitary<T>, bath: &ThermalBathParams<T>) -> WalkerChannel<T> {
    u.walker_channel(bath.amplitudes())
}
