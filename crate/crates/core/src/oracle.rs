//! Closed-form predictions of the dispersive exchange model, used to check
//! the full engine when both delocalized modes are far detuned.
//!
//! In that regime the atoms only swap their excitation through virtual
//! photons at rate `λ′`: `|e₁g₂⟩ → cos(λ′t)|e₁g₂⟩ − i sin(λ′t)|g₁e₂⟩`,
//! whatever the field state, and `(|e₁g₂⟩ + |g₁e₂⟩)/√2` is stationary.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::TimeGrid;
use crate::model::EffectiveParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivePrediction {
    pub lambda_prime: f64,
    pub times: TimeGrid,
    pub concurrence: Vec<f64>,
}

fn require_valid(eff: &EffectiveParams) -> Result<()> {
    if eff.valid {
        Ok(())
    } else {
        Err(Error::DispersiveInvalid)
    }
}

/// Concurrence `|sin(2λ′t)|` for atoms starting in `|e₁g₂⟩`.
pub fn effective_concurrence_eg(eff: &EffectiveParams, grid: &TimeGrid) -> Result<EffectivePrediction> {
    require_valid(eff)?;
    Ok(concurrence_eg_curve(eff.lambda_prime, grid))
}

/// The `|e₁g₂⟩` curve for a bare exchange rate, without a validity check.
pub fn concurrence_eg_curve(lambda_prime: f64, grid: &TimeGrid) -> EffectivePrediction {
    EffectivePrediction {
        lambda_prime,
        times: grid.clone(),
        concurrence: grid
            .samples()
            .iter()
            .map(|t| (2.0 * lambda_prime * t).sin().abs())
            .collect(),
    }
}

/// Concurrence of the symmetric Bell state: an eigenstate of the exchange
/// model, so constant at 1.
pub fn effective_frozen_bell(eff: &EffectiveParams, grid: &TimeGrid) -> Result<EffectivePrediction> {
    require_valid(eff)?;
    Ok(EffectivePrediction {
        lambda_prime: eff.lambda_prime,
        times: grid.clone(),
        concurrence: vec![1.0; grid.len()],
    })
}

/// The exchange-model Hamiltonian on the atoms for fixed delocalized photon
/// numbers `(m1, m2)`:
///
/// ```text
/// −Σᵢ [ (g²/2δ₁′ m₁ + g²/2δ₂′ m₂) σ_zᵢ + λ |eᵢ⟩⟨eᵢ| ] + λ′ (S₁⁺S₂⁻ + h.c.)
/// ```
///
/// in the basis `{e₁e₂, e₁g₂, g₁e₂, g₁g₂}`. The Stark terms are the same on
/// `|e₁g₂⟩` and `|g₁e₂⟩`, which is why they drop out of the predictions above.
pub fn effective_atomic_hamiltonian(eff: &EffectiveParams, m1: u32, m2: u32) -> Matrix4<f64> {
    let g2 = eff.coupling * eff.coupling;
    let stark = g2 / (2.0 * eff.delta1_prime) * m1 as f64 + g2 / (2.0 * eff.delta2_prime) * m2 as f64;
    // σ_z1 + σ_z2 and the number of excited atoms, per basis state
    let sz = [2.0, 0.0, 0.0, -2.0];
    let excited = [2.0, 1.0, 1.0, 0.0];
    let mut h = Matrix4::zeros();
    for k in 0..4 {
        h[(k, k)] = -(stark * sz[k] + eff.lambda * excited[k]);
    }
    h[(1, 2)] = eff.lambda_prime;
    h[(2, 1)] = eff.lambda_prime;
    h
}

/// Atomic amplitudes `cos(λ′t)|e₁g₂⟩ − i sin(λ′t)|g₁e₂⟩`.
pub fn exchange_amplitudes(lambda_prime: f64, t: f64) -> [Complex64; 4] {
    let z = Complex64::new(0.0, 0.0);
    let (s, c) = (lambda_prime * t).sin_cos();
    [z, Complex64::new(c, 0.0), Complex64::new(0.0, -s), z]
}
