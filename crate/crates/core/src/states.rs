//! Thermal fields, initial atomic states, and the product initial state
//! `|atoms⟩⟨atoms| ⊗ ρ_th(n̄₁) ⊗ ρ_th(n̄₂)`.
//!
//! The field part is diagonal in the Fock basis, so the initial density
//! operator is an exact mixture of pure states `|atoms⟩|n₁,n₂⟩` with weights
//! `P₁(n₁)P₂(n₂)`. The unitary engine evolves that ensemble.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Thermal photon-number probability `n̄ⁿ / (n̄+1)ⁿ⁺¹`.
pub fn thermal_pmf(n_bar: f64, n: u32) -> Result<f64> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(invalid("n_bar", format!("must be finite and >= 0, got {n_bar}")));
    }
    let ratio = n_bar / (n_bar + 1.0);
    Ok(ratio.powi(n as i32) / (n_bar + 1.0))
}

/// A thermal field truncated at Fock index `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub n_bar: f64,
    pub cutoff: u32,
}

impl ThermalSpec {
    pub fn new(n_bar: f64, cutoff: u32) -> Result<Self> {
        thermal_pmf(n_bar, 0)?;
        Ok(Self { n_bar, cutoff })
    }

    /// Probabilities `P(0..=cutoff)`, not renormalized.
    pub fn pmf(&self) -> Vec<f64> {
        let ratio = self.n_bar / (self.n_bar + 1.0);
        let mut p = 1.0 / (self.n_bar + 1.0);
        let mut out = Vec::with_capacity(self.cutoff as usize + 1);
        for _ in 0..=self.cutoff {
            out.push(p);
            p *= ratio;
        }
        out
    }

    /// Probability mass kept by the truncation, `1 − (n̄/(n̄+1))^(cutoff+1)`.
    pub fn retained_mass(&self) -> f64 {
        1.0 - (self.n_bar / (self.n_bar + 1.0)).powi(self.cutoff as i32 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomicInitialState {
    #[serde(rename = "e1g2")]
    E1G2,
    #[serde(rename = "g1e2")]
    G1E2,
    #[serde(rename = "e1e2")]
    E1E2,
    #[serde(rename = "g1g2")]
    G1G2,
    /// `(|e₁g₂⟩ + |g₁e₂⟩)/√2`
    BellPlus,
}

impl AtomicInitialState {
    pub const ALL: [AtomicInitialState; 5] = [Self::E1G2, Self::G1E2, Self::E1E2, Self::G1G2, Self::BellPlus];

    /// Amplitudes over `{e₁e₂, e₁g₂, g₁e₂, g₁g₂}`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Self::E1E2 => [one, zero, zero, zero],
            Self::E1G2 => [zero, one, zero, zero],
            Self::G1E2 => [zero, zero, one, zero],
            Self::G1G2 => [zero, zero, zero, one],
            Self::BellPlus => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [zero, h, h, zero]
            }
        }
    }

    /// Number of atomic excitations. Every supported state has a definite
    /// value, so each ensemble member lives in a single sector.
    pub fn excitation(self) -> u32 {
        match self {
            Self::G1G2 => 0,
            Self::E1G2 | Self::G1E2 | Self::BellPlus => 1,
            Self::E1E2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::E1G2 => "e1g2",
            Self::G1E2 => "g1e2",
            Self::E1E2 => "e1e2",
            Self::G1G2 => "g1g2",
            Self::BellPlus => "bell_plus",
        }
    }
}

impl fmt::Display for AtomicInitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AtomicInitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| invalid("initial_state", format!("unknown initial state `{s}`")))
    }
}

/// One pure member `|atoms⟩|n1,n2⟩` of the initial mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub n1: u32,
    pub n2: u32,
    /// Renormalized weight.
    pub weight: f64,
    pub atoms: AtomicInitialState,
}

impl Trajectory {
    pub fn excitation(&self) -> u32 {
        self.atoms.excitation() + self.n1 + self.n2
    }
}

/// The initial state as a weighted set of pure trajectories, sorted
/// lexicographically by `(n1, n2)`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub trajectories: Vec<Trajectory>,
    /// Product-thermal mass kept before renormalization.
    pub retained_mass: f64,
    pub max_excitation: u32,
}

impl Ensemble {
    /// Weighted mean photon number of cavity `mode` (0 or 1) at t = 0.
    pub fn mean_photon(&self, mode: usize) -> f64 {
        self.trajectories
            .iter()
            .map(|t| t.weight * if mode == 0 { t.n1 } else { t.n2 } as f64)
            .sum()
    }
}

/// Builds the trajectory ensemble of `|atoms⟩⟨atoms| ⊗ ρ_th1 ⊗ ρ_th2`.
///
/// Fock indices are capped per mode by each field's `cutoff`, and members
/// whose total excitation exceeds the larger of the two cutoffs are dropped.
/// The surviving weights are renormalized to sum to one; the raw surviving
/// mass is kept in [`Ensemble::retained_mass`].
pub fn initial_density(atoms: AtomicInitialState, th1: &ThermalSpec, th2: &ThermalSpec) -> Result<Ensemble> {
    let max_excitation = th1.cutoff.max(th2.cutoff);
    let p1 = th1.pmf();
    let p2 = th2.pmf();
    let mut trajectories = Vec::new();
    for (n1, &w1) in p1.iter().enumerate() {
        for (n2, &w2) in p2.iter().enumerate() {
            let t = Trajectory {
                n1: n1 as u32,
                n2: n2 as u32,
                weight: w1 * w2,
                atoms,
            };
            if t.weight > 0.0 && t.excitation() <= max_excitation {
                trajectories.push(t);
            }
        }
    }
    if trajectories.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let retained_mass: f64 = trajectories.iter().map(|t| t.weight).sum();
    for t in &mut trajectories {
        t.weight /= retained_mass;
    }
    if retained_mass < 0.999 {
        log::warn!(
            "thermal truncation keeps {retained_mass:.6} of the initial mass (cutoff {max_excitation}); consider a larger cutoff"
        );
    } else {
        log::debug!("thermal truncation keeps {retained_mass:.9} (cutoff {max_excitation})");
    }
    Ok(Ensemble {
        trajectories,
        retained_mass,
        max_excitation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_values() {
        assert_eq!(thermal_pmf(1.0, 0).unwrap(), 0.5);
        assert_eq!(thermal_pmf(1.0, 1).unwrap(), 0.25);
        assert_eq!(thermal_pmf(0.0, 0).unwrap(), 1.0);
        assert_eq!(thermal_pmf(0.0, 3).unwrap(), 0.0);
        assert!(thermal_pmf(-0.1, 0).is_err());
    }

    #[test]
    fn pmf_ratio_recursion() {
        for n_bar in [0.1, 1.0, 5.0, 10.0] {
            for n in 0..40 {
                let r = thermal_pmf(n_bar, n + 1).unwrap() / thermal_pmf(n_bar, n).unwrap();
                assert!((r - n_bar / (n_bar + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn truncated_mass_matches_geometric_tail() {
        for (n_bar, cutoff) in [(0.1, 5), (1.0, 15), (10.0, 60)] {
            let th = ThermalSpec::new(n_bar, cutoff).unwrap();
            let direct: f64 = th.pmf().iter().sum();
            assert!((direct - th.retained_mass()).abs() < 1e-14);
        }
        // Two independent modes at n̄ = 1, cutoff 15: (1 − 2⁻¹⁶)².
        let th = ThermalSpec::new(1.0, 15).unwrap();
        let product = th.retained_mass() * th.retained_mass();
        assert!((product - (1.0 - 0.5f64.powi(16)).powi(2)).abs() < 1e-15);
        assert!((product - 0.99997).abs() < 5e-6);
    }

    #[test]
    fn vacuum_fields_give_single_trajectory() {
        let th = ThermalSpec::new(0.0, 5).unwrap();
        let e = initial_density(AtomicInitialState::E1G2, &th, &th).unwrap();
        assert_eq!(e.trajectories.len(), 1);
        assert_eq!(e.trajectories[0].weight, 1.0);
        assert_eq!((e.trajectories[0].n1, e.trajectories[0].n2), (0, 0));
    }

    #[test]
    fn ensemble_respects_excitation_cap_and_order() {
        let th = ThermalSpec::new(1.0, 15).unwrap();
        let e = initial_density(AtomicInitialState::E1G2, &th, &th).unwrap();
        assert!(e.trajectories.iter().all(|t| t.excitation() <= 15));
        assert!(e
            .trajectories
            .windows(2)
            .all(|w| (w[0].n1, w[0].n2) < (w[1].n1, w[1].n2)));
        // brute-force mass with n1 + n2 <= 14
        let mut brute = 0.0;
        for n1 in 0..=14 {
            for n2 in 0..=(14 - n1) {
                brute += thermal_pmf(1.0, n1).unwrap() * thermal_pmf(1.0, n2).unwrap();
            }
        }
        assert!((e.retained_mass - brute).abs() < 1e-14);
        let total: f64 = e.trajectories.iter().map(|t| t.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_members_keep_the_superposition() {
        let th = ThermalSpec::new(0.1, 5).unwrap();
        let e = initial_density(AtomicInitialState::BellPlus, &th, &th).unwrap();
        assert!(e.trajectories.len() > 1);
        assert!(e.trajectories.iter().all(|t| t.atoms == AtomicInitialState::BellPlus));
        let a = AtomicInitialState::BellPlus.amplitudes();
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_zero_with_excited_atoms_is_empty() {
        let th = ThermalSpec::new(0.5, 0).unwrap();
        assert!(matches!(
            initial_density(AtomicInitialState::E1E2, &th, &th),
            Err(Error::EmptyEnsemble)
        ));
    }

    #[test]
    fn parse_names() {
        for k in AtomicInitialState::ALL {
            assert_eq!(k.name().parse::<AtomicInitialState>().unwrap(), k);
        }
        assert!("e2g1".parse::<AtomicInitialState>().is_err());
    }
}
