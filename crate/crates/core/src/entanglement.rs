//! Two-atom reduced density matrices and their entanglement.
//!
//! The reduced matrix is stored in the basis `{e₁e₂, e₁g₂, g₁e₂, g₁g₂}`. For
//! the initial states handled here it has the X pattern
//!
//! ```text
//! ⎛ A  0  0  G ⎞
//! ⎜ 0  B  E  0 ⎟
//! ⎜ 0  E* C  0 ⎟
//! ⎝ G* 0  0  D ⎠
//! ```
//!
//! and the concurrence reduces to `2·max(0, |E| − √(AD), |G| − √(BC))`.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::FullDensity;

/// Off-pattern magnitude below which a matrix counts as X-shaped.
pub const X_FORM_TOLERANCE: f64 = 1e-10;

/// Most negative eigenvalue treated as rounding noise (clamped to zero).
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

// Eigenvalues of ρ below this are set to zero before taking square roots.
const RANK_FLOOR: f64 = 1e-13;

// (row, col) positions outside the X pattern
const OFF_X: [(usize, usize); 8] = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)];

/// Reduced density matrix of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicDensity(Matrix4<Complex64>);

impl AtomicDensity {
    /// Wraps `m`, replacing it with its Hermitian part.
    pub fn from_matrix(m: Matrix4<Complex64>) -> Self {
        Self((m + m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `|ψ⟩⟨ψ|` for amplitudes over the atomic basis.
    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        let mut m = Matrix4::zeros();
        for s in 0..4 {
            for t in 0..4 {
                m[(s, t)] = amplitudes[s] * amplitudes[t].conj();
            }
        }
        Self::from_matrix(m)
    }

    /// X-shaped state from its six parameters.
    pub fn x_state(a: f64, b: f64, c: f64, d: f64, e: Complex64, g: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        Self::from_matrix(Matrix4::new(
            r(a),
            z,
            z,
            g,
            z,
            r(b),
            e,
            z,
            z,
            e.conj(),
            r(c),
            z,
            g.conj(),
            z,
            z,
            r(d),
        ))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn a(&self) -> f64 {
        self.0[(0, 0)].re
    }
    pub fn b(&self) -> f64 {
        self.0[(1, 1)].re
    }
    pub fn c(&self) -> f64 {
        self.0[(2, 2)].re
    }
    pub fn d(&self) -> f64 {
        self.0[(3, 3)].re
    }
    /// `⟨e₁g₂|ρ|g₁e₂⟩`
    pub fn e(&self) -> Complex64 {
        self.0[(1, 2)]
    }
    /// `⟨e₁e₂|ρ|g₁g₂⟩`
    pub fn g(&self) -> Complex64 {
        self.0[(0, 3)]
    }

    /// Largest magnitude among the eight entries outside the X pattern.
    pub fn off_x_magnitude(&self) -> f64 {
        OFF_X.iter().map(|&(i, j)| self.0[(i, j)].norm()).fold(0.0, f64::max)
    }

    pub fn is_x_form(&self) -> bool {
        self.off_x_magnitude() <= X_FORM_TOLERANCE
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        let mut v = [e[0], e[1], e[2], e[3]];
        v.sort_by(f64::total_cmp);
        v
    }

    /// Clamps eigenvalues in `(−tolerance, 0)` to zero and renormalizes the
    /// trace. A more negative eigenvalue is an error.
    pub fn into_physical(self, tolerance: f64) -> Result<Self> {
        let eig = SymmetricEigen::new(self.0);
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tolerance {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        if min >= 0.0 {
            return Ok(self);
        }
        let clamped = eig.eigenvalues.map(|x| x.max(0.0));
        let total: f64 = clamped.iter().sum();
        let m = reconstruct(&eig.eigenvectors, clamped.as_slice()) / Complex64::new(total, 0.0);
        Ok(Self::from_matrix(m))
    }
}

fn reconstruct(vectors: &Matrix4<Complex64>, values: &[f64]) -> Matrix4<Complex64> {
    let mut scaled = *vectors;
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    scaled * vectors.adjoint()
}

/// `σ_y ⊗ σ_y` in the atomic basis (real anti-diagonal `−1, 1, 1, −1`).
fn spin_flip() -> Matrix4<Complex64> {
    let mut y = Matrix4::zeros();
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y
}

/// Wootters concurrence for an arbitrary two-qubit state.
///
/// The square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)` are the
/// singular values of `√ρ (σ_y⊗σ_y) √ρ*`, which is what is evaluated here.
pub fn concurrence_general(rho: &AtomicDensity) -> Result<f64> {
    let eig = SymmetricEigen::new(rho.0);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOLERANCE {
        return Err(Error::NotPositive { eigenvalue: min });
    }
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&x| if x <= RANK_FLOOR { 0.0 } else { x.sqrt() })
        .collect();
    let sqrt_rho = reconstruct(&eig.eigenvectors, &roots);
    let t = sqrt_rho * spin_flip() * sqrt_rho.conjugate();
    let mut s: Vec<f64> = t.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Closed-form concurrence of an X-shaped state. Non-X input is rejected.
pub fn concurrence_x(rho: &AtomicDensity) -> Result<f64> {
    let off = rho.off_x_magnitude();
    if off > X_FORM_TOLERANCE {
        return Err(Error::NotXForm { magnitude: off });
    }
    let (a, b, c, d) = (rho.a(), rho.b(), rho.c(), rho.d());
    let first = rho.e().norm() - (a * d).max(0.0).sqrt();
    let second = rho.g().norm() - (b * c).max(0.0).sqrt();
    Ok((2.0 * first.max(second).max(0.0)).min(1.0))
}

/// Concurrence through the X formula when it applies, the general route
/// otherwise.
pub fn concurrence(rho: &AtomicDensity) -> Result<f64> {
    if rho.is_x_form() {
        concurrence_x(rho)
    } else {
        concurrence_general(rho)
    }
}

/// `⟨σ_z⊗I + I⊗σ_z⟩` with `σ_z = |e⟩⟨e| − |g⟩⟨g|`, equal to `2(A − D)`.
pub fn population_inversion(rho: &AtomicDensity) -> f64 {
    2.0 * (rho.a() - rho.d())
}

/// Traces the two cavity fields out of a full density matrix.
pub fn partial_trace_fields(rho: &FullDensity) -> AtomicDensity {
    let m = rho.matrix();
    let mut out = Matrix4::zeros();
    for group in rho.space().field_groups() {
        for (s, is) in group.iter().enumerate() {
            let Some(is) = *is else { continue };
            for (t, it) in group.iter().enumerate() {
                if let Some(it) = *it {
                    out[(s, t)] += m[(is, it)];
                }
            }
        }
    }
    AtomicDensity::from_matrix(out)
}

/// `⟨aᵢ†aᵢ⟩` for cavity `mode` (0 or 1).
pub fn mean_photon(rho: &FullDensity, mode: usize) -> f64 {
    let m = rho.matrix();
    rho.space()
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| m[(i, i)].re * s.photons(mode) as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::AtomicInitialState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_x_state(rng: &mut impl Rng) -> AtomicDensity {
        let mut w = [0.0; 4];
        for x in &mut w {
            *x = rng.random::<f64>();
        }
        let total: f64 = w.iter().sum();
        let [a, b, cc, d] = w.map(|x| x / total);
        let phase = |rng: &mut dyn rand::RngCore| {
            let th = rng.random::<f64>() * std::f64::consts::TAU;
            c(th.cos(), th.sin())
        };
        let e = phase(rng) * (b * cc).sqrt() * rng.random::<f64>();
        let g = phase(rng) * (a * d).sqrt() * rng.random::<f64>();
        AtomicDensity::x_state(a, b, cc, d, e, g)
    }

    #[test]
    fn bell_and_product_states() {
        let bell = AtomicDensity::pure(AtomicInitialState::BellPlus.amplitudes());
        assert!((concurrence_general(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!((concurrence_x(&bell).unwrap() - 1.0).abs() < 1e-12);
        let product = AtomicDensity::pure(AtomicInitialState::E1G2.amplitudes());
        assert!(concurrence_general(&product).unwrap() < 1e-12);
    }

    #[test]
    fn werner_state_at_half_mixing() {
        let bell = AtomicDensity::pure(AtomicInitialState::BellPlus.amplitudes());
        let p = 0.5;
        let m = bell.matrix() * c(p, 0.0) + Matrix4::identity() * c((1.0 - p) / 4.0, 0.0);
        let w = AtomicDensity::from_matrix(m);
        // closed form max(0, (3p − 1)/2)
        assert!((concurrence_general(&w).unwrap() - 0.25).abs() < 1e-12);
        assert!((concurrence_x(&w).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn x_formula_examples() {
        let z = c(0.0, 0.0);
        let bell = AtomicDensity::x_state(0.0, 0.5, 0.5, 0.0, c(0.5, 0.0), z);
        assert!((concurrence_x(&bell).unwrap() - 1.0).abs() < 1e-15);
        let partial = AtomicDensity::x_state(0.1, 0.4, 0.4, 0.1, c(0.4, 0.0), z);
        assert!((concurrence_x(&partial).unwrap() - 0.6).abs() < 1e-15);
        let dead = AtomicDensity::x_state(0.25, 0.25, 0.25, 0.25, c(0.1, 0.0), z);
        assert_eq!(concurrence_x(&dead).unwrap(), 0.0);
    }

    #[test]
    fn x_formula_rejects_general_states() {
        let amps = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)];
        let r = concurrence_x(&AtomicDensity::pure(amps));
        assert!(matches!(r, Err(Error::NotXForm { .. })));
    }

    #[test]
    fn x_formula_agrees_with_general_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let rho = random_x_state(&mut rng);
            let x = concurrence_x(&rho).unwrap();
            let g = concurrence_general(&rho).unwrap();
            assert!((x - g).abs() < 1e-10, "{x} vs {g}");
        }
    }

    #[test]
    fn negative_states_are_rejected() {
        let rho = AtomicDensity::x_state(0.6, 0.2, 0.3, -0.1, c(0.0, 0.0), c(0.0, 0.0));
        assert!(concurrence_general(&rho).is_err());
        assert!(rho.into_physical(POSITIVITY_TOLERANCE).is_err());
    }

    #[test]
    fn clamping_removes_tiny_negativity() {
        let rho = AtomicDensity::x_state(0.5, 0.5 + 1e-12, 0.0, -1e-12, c(0.0, 0.0), c(0.0, 0.0));
        let fixed = rho.into_physical(POSITIVITY_TOLERANCE).unwrap();
        assert!(fixed.eigenvalues()[0] >= -1e-15);
        assert!((fixed.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inversion_values() {
        let inv = |k: AtomicInitialState| population_inversion(&AtomicDensity::pure(k.amplitudes()));
        assert_eq!(inv(AtomicInitialState::E1E2), 2.0);
        assert_eq!(inv(AtomicInitialState::G1G2), -2.0);
        assert!(inv(AtomicInitialState::BellPlus).abs() < 1e-15);
    }
}
