//! Hopping Hamiltonian
//!
//! ```text
//! H = Σᵢ [ δᵢ aᵢ†aᵢ + gᵢ (Sᵢ⁺ aᵢ + Sᵢ⁻ aᵢ†) ] + J (a₁†a₂ + a₁a₂†)
//! ```
//!
//! built sector by sector, plus its rewriting in the delocalized modes
//! `b₁ = (a₁+a₂)/√2`, `b₂ = (a₁−a₂)/√2` and the parameters of the dispersive
//! atom–atom exchange model. All rates are in units of the reference coupling
//! `g`, times are dimensionless `gt`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{BasisState, Level, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g1: f64,
    pub g2: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Photon hopping strength `J`.
    pub hopping: f64,
    pub n_bar1: f64,
    pub n_bar2: f64,
}

impl ModelParams {
    /// `g₁ = g₂ = 1`, `δ₁ = δ₂ = delta`, `n̄₁ = n̄₂ = n_bar`.
    pub fn symmetric(delta: f64, hopping: f64, n_bar: f64) -> Self {
        Self {
            g1: 1.0,
            g2: 1.0,
            delta1: delta,
            delta2: delta,
            hopping,
            n_bar1: n_bar,
            n_bar2: n_bar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("g1", self.g1), ("g2", self.g2)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(invalid(name, format!("must be finite and >= 0, got {g}")));
            }
        }
        for (name, v) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("hopping", self.hopping),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        for (name, n) in [("n_bar1", self.n_bar1), ("n_bar2", self.n_bar2)] {
            if !(n.is_finite() && n >= 0.0) {
                return Err(invalid(name, format!("must be finite and >= 0, got {n}")));
            }
        }
        Ok(())
    }

    fn is_symmetric(&self) -> bool {
        self.g1 == self.g2 && self.delta1 == self.delta2
    }

    fn coupling(&self, atom: usize) -> f64 {
        if atom == 0 {
            self.g1
        } else {
            self.g2
        }
    }

    fn detuning(&self, mode: usize) -> f64 {
        if mode == 0 {
            self.delta1
        } else {
            self.delta2
        }
    }
}

/// Hermitian matrix of an operator restricted to one excitation sector, in
/// that sector's canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBlock {
    pub excitation: u32,
    pub matrix: DMatrix<Complex64>,
}

impl HermitianBlock {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest `|H − H†|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }
}

/// Matrix element accumulator over a sector: `rows[out][in] += amp`.
fn assemble<F>(sub: &Subspace, mut apply: F) -> DMatrix<Complex64>
where
    F: FnMut(&BasisState, &mut dyn FnMut(BasisState, f64)),
{
    let dim = sub.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, state) in sub.basis().iter().enumerate() {
        apply(state, &mut |target, amp| {
            if amp == 0.0 {
                return;
            }
            let row = sub
                .index_of(&target)
                .expect("excitation-conserving term left its sector");
            m[(row, col)] += Complex64::new(amp, 0.0);
        });
    }
    m
}

/// Matrix of the hopping Hamiltonian on `sub`. Photon ladder operators carry
/// `√n` factors; every term conserves the excitation number, so nothing
/// leaves the sector.
pub fn build_hamiltonian_block(params: &ModelParams, sub: &Subspace) -> HermitianBlock {
    let matrix = assemble(sub, |s, emit| hamiltonian_terms(params, s, emit));
    HermitianBlock {
        excitation: sub.excitation(),
        matrix,
    }
}

/// Emits `(target, amplitude)` for every term of `H|s⟩`.
pub(crate) fn hamiltonian_terms(params: &ModelParams, s: &BasisState, emit: &mut dyn FnMut(BasisState, f64)) {
    emit(*s, params.detuning(0) * s.n1 as f64 + params.detuning(1) * s.n2 as f64);
    for i in 0..2 {
        let g = params.coupling(i);
        let n = s.photons(i);
        match s.atom(i) {
            // S⁺a: absorb a photon from the local mode
            Level::Ground if n > 0 => emit(
                s.with_atom(i, Level::Excited).with_photons(i, n - 1),
                g * (n as f64).sqrt(),
            ),
            // S⁻a†: emit into the local mode
            Level::Excited => emit(
                s.with_atom(i, Level::Ground).with_photons(i, n + 1),
                g * ((n + 1) as f64).sqrt(),
            ),
            _ => {}
        }
    }
    let j = params.hopping;
    if s.n2 > 0 {
        let amp = j * ((s.n1 + 1) as f64).sqrt() * (s.n2 as f64).sqrt();
        emit(
            BasisState {
                n1: s.n1 + 1,
                n2: s.n2 - 1,
                ..*s
            },
            amp,
        );
    }
    if s.n1 > 0 {
        let amp = j * (s.n1 as f64).sqrt() * ((s.n2 + 1) as f64).sqrt();
        emit(
            BasisState {
                n1: s.n1 - 1,
                n2: s.n2 + 1,
                ..*s
            },
            amp,
        );
    }
}

/// The same Hamiltonian written in the delocalized modes,
///
/// ```text
/// H = δ₁′ b₁†b₁ + δ₂′ b₂†b₂ + g/√2 [ b₁(S₁⁺+S₂⁺) + b₂(S₁⁺−S₂⁺) + h.c. ]
/// ```
///
/// with `δ₁′ = δ+J`, `δ₂′ = δ−J`. The basis labels of `sub` are read as
/// delocalized photon numbers `(m₁, m₂)`. Requires symmetric couplings and
/// detunings.
pub fn build_delocalized_block(params: &ModelParams, sub: &Subspace) -> Result<HermitianBlock> {
    if params.g1 != params.g2 {
        return Err(invalid("g2", "delocalized form requires g1 == g2"));
    }
    if params.delta1 != params.delta2 {
        return Err(invalid("delta2", "delocalized form requires delta1 == delta2"));
    }
    let g = params.g1 * FRAC_1_SQRT_2;
    let shifted = [params.delta1 + params.hopping, params.delta1 - params.hopping];
    // sign of atom i's coupling to delocalized mode k
    let sign = [[1.0, 1.0], [1.0, -1.0]];
    let matrix = assemble(sub, |s, emit| {
        emit(*s, shifted[0] * s.n1 as f64 + shifted[1] * s.n2 as f64);
        for (i, row) in sign.iter().enumerate() {
            for (k, &sk) in row.iter().enumerate() {
                let m = s.photons(k);
                let amp = g * sk;
                match s.atom(i) {
                    Level::Ground if m > 0 => emit(
                        s.with_atom(i, Level::Excited).with_photons(k, m - 1),
                        amp * (m as f64).sqrt(),
                    ),
                    Level::Excited => emit(
                        s.with_atom(i, Level::Ground).with_photons(k, m + 1),
                        amp * ((m + 1) as f64).sqrt(),
                    ),
                    _ => {}
                }
            }
        }
    });
    Ok(HermitianBlock {
        excitation: sub.excitation(),
        matrix,
    })
}

/// Default factor by which each delocalized detuning must exceed
/// `√(n̄+1)·g/√2` for the exchange model to count as valid.
pub const DEFAULT_DISPERSIVE_RATIO: f64 = 10.0;

/// Parameters of the dispersive exchange model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Stark shift `g²/(2δ₁′) + g²/(2δ₂′)`.
    pub lambda: f64,
    /// Atom–atom exchange rate `g²/(2δ₁′) − g²/(2δ₂′)`.
    pub lambda_prime: f64,
    pub delta1_prime: f64,
    pub delta2_prime: f64,
    pub coupling: f64,
    /// Whether both delocalized detunings are far enough from resonance.
    pub valid: bool,
}

pub fn effective_params(params: &ModelParams) -> Result<EffectiveParams> {
    effective_params_with_ratio(params, DEFAULT_DISPERSIVE_RATIO)
}

pub fn effective_params_with_ratio(params: &ModelParams, ratio: f64) -> Result<EffectiveParams> {
    params.validate()?;
    if !params.is_symmetric() {
        return Err(invalid(
            "g2",
            "the exchange model is derived for g1 == g2 and delta1 == delta2",
        ));
    }
    let g = params.g1;
    let delta1_prime = params.delta1 + params.hopping;
    let delta2_prime = params.delta1 - params.hopping;
    let scale = 1.0f64.max(params.delta1.abs() + params.hopping.abs());
    for d in [delta1_prime, delta2_prime] {
        if d.abs() <= 1e-12 * scale {
            return Err(Error::Resonance { detuning: d });
        }
    }
    let a = g * g / (2.0 * delta1_prime);
    let b = g * g / (2.0 * delta2_prime);
    let threshold = |n_bar: f64| ratio * (n_bar + 1.0).sqrt() * g * FRAC_1_SQRT_2;
    let valid = delta1_prime.abs() >= threshold(params.n_bar1) && delta2_prime.abs() >= threshold(params.n_bar2);
    Ok(EffectiveParams {
        lambda: a + b,
        lambda_prime: a - b,
        delta1_prime,
        delta2_prime,
        coupling: g,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::enumerate_subspace;
    use nalgebra::SymmetricEigen;

    fn real_part(b: &HermitianBlock) -> DMatrix<f64> {
        b.matrix.map(|z| z.re)
    }

    fn sorted_eigenvalues(b: &HermitianBlock) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(real_part(b)).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn vacuum_sector_is_zero() {
        let p = ModelParams::symmetric(3.0, 2.0, 0.5);
        let b = build_hamiltonian_block(&p, &enumerate_subspace(0));
        assert_eq!(b.dim(), 1);
        assert_eq!(b.matrix[(0, 0)], Complex64::new(0.0, 0.0));
        let d = build_delocalized_block(&p, &enumerate_subspace(0)).unwrap();
        assert_eq!(d.matrix[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_excitation_block() {
        let (g, delta, j) = (1.3, 0.7, 2.1);
        let p = ModelParams {
            g1: g,
            g2: g,
            delta1: delta,
            delta2: delta,
            hopping: j,
            n_bar1: 0.0,
            n_bar2: 0.0,
        };
        let b = build_hamiltonian_block(&p, &enumerate_subspace(1));
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, g, 0.0, //
                0.0, 0.0, 0.0, g, //
                g, 0.0, delta, j, //
                0.0, g, j, delta,
            ],
        );
        assert_eq!(real_part(&b), expected);
        assert!(b.is_real());
    }

    #[test]
    fn decoupled_cavities_reproduce_jaynes_cummings_rungs() {
        // J = 0, δ = 0: the 8-dim N=2 sector splits into single-cavity ladders.
        let p = ModelParams::symmetric(0.0, 0.0, 0.0);
        let e = sorted_eigenvalues(&build_hamiltonian_block(&p, &enumerate_subspace(2)));
        // Each atom with two photons in its own cavity: ±√2. One excitation in each
        // cavity: sums of ±1 pairs → -2, 0, 0, 2. Plus ±√2 twice.
        let r2 = 2f64.sqrt();
        let mut expected = vec![-2.0, -r2, -r2, 0.0, 0.0, r2, r2, 2.0];
        expected.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn delocalized_spectrum_matches_on_single_excitation() {
        let p = ModelParams::symmetric(10.0, 3.0, 0.0);
        let sub = enumerate_subspace(1);
        let a = sorted_eigenvalues(&build_hamiltonian_block(&p, &sub));
        let b = sorted_eigenvalues(&build_delocalized_block(&p, &sub).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn delocalized_field_levels_are_shifted_by_hopping() {
        let p = ModelParams::symmetric(0.0, 4.0, 0.0);
        let sub = enumerate_subspace(1);
        let d = build_delocalized_block(&p, &sub).unwrap();
        // |g g⟩|1⟩_b1|0⟩ and |g g⟩|0⟩|1⟩_b2 sit at δ₁′ = J and δ₂′ = −J.
        assert_eq!(d.matrix[(2, 2)].re, 4.0);
        assert_eq!(d.matrix[(3, 3)].re, -4.0);
    }

    #[test]
    fn delocalized_form_rejects_asymmetric_coupling() {
        let mut p = ModelParams::symmetric(0.0, 4.0, 0.0);
        p.g1 = 2.0;
        assert!(build_delocalized_block(&p, &enumerate_subspace(2)).is_err());
    }

    #[test]
    fn exchange_rate_for_resonant_atoms() {
        let e = effective_params(&ModelParams::symmetric(0.0, 10.0, 0.1)).unwrap();
        assert!((e.lambda_prime - 0.1).abs() < 1e-15);
        assert!(e.lambda.abs() < 1e-15);
        assert!(e.valid);
    }

    #[test]
    fn exchange_cancels_without_hopping() {
        let e = effective_params(&ModelParams::symmetric(10.0, 0.0, 0.0)).unwrap();
        assert_eq!(e.lambda_prime, 0.0);
        assert!((e.lambda - 0.1).abs() < 1e-15);
    }

    #[test]
    fn resonant_delocalized_mode_is_an_error() {
        let r = effective_params(&ModelParams::symmetric(10.0, 10.0, 0.0));
        assert!(matches!(r, Err(Error::Resonance { .. })));
    }

    #[test]
    fn weak_hopping_is_flagged_invalid() {
        let e = effective_params(&ModelParams::symmetric(0.0, 2.0, 1.0)).unwrap();
        assert!(!e.valid);
    }

    #[test]
    fn exchange_rate_is_odd_in_hopping() {
        for j in [0.5, 3.0, 17.0] {
            let a = effective_params(&ModelParams::symmetric(0.0, j, 0.0)).unwrap();
            let b = effective_params(&ModelParams::symmetric(0.0, -j, 0.0)).unwrap();
            assert!((a.lambda_prime + b.lambda_prime).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = ModelParams::symmetric(0.0, 1.0, 0.0);
        p.g2 = -0.5;
        assert!(p.validate().is_err());
        p.g2 = 0.0;
        assert!(p.validate().is_ok());
        let mut p = ModelParams::symmetric(0.0, 1.0, 0.0);
        p.n_bar1 = -1.0;
        assert!(p.validate().is_err());
    }
}
