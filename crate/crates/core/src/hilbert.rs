//! Excitation-number sectors of the atoms ⊗ field₁ ⊗ field₂ space.
//!
//! The total excitation (excited atoms plus photons) commutes with the
//! hopping Hamiltonian, so every dynamical quantity is computed sector by
//! sector. A sector's basis is listed in four families:
//!
//! | family | atoms  | photons        |
//! |--------|--------|----------------|
//! | a      | e₁g₂   | n₁ + n₂ = N−1  |
//! | b      | g₁e₂   | n₁ + n₂ = N−1  |
//! | c      | g₁g₂   | n₁ + n₂ = N    |
//! | d      | e₁e₂   | n₁ + n₂ = N−2  |
//!
//! each in decreasing `n1`. That ordering is fixed so block matrices are
//! reproducible bit for bit.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub fn excitation(self) -> u32 {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }
}

/// Two-atom configurations in the fixed reduced-density ordering
/// `{e₁e₂, e₁g₂, g₁e₂, g₁g₂}`.
pub const ATOMIC_BASIS: [(Level, Level); 4] = [
    (Level::Excited, Level::Excited),
    (Level::Excited, Level::Ground),
    (Level::Ground, Level::Excited),
    (Level::Ground, Level::Ground),
];

/// Position of an atomic configuration in [`ATOMIC_BASIS`].
pub fn atomic_index(atom1: Level, atom2: Level) -> usize {
    match (atom1, atom2) {
        (Level::Excited, Level::Excited) => 0,
        (Level::Excited, Level::Ground) => 1,
        (Level::Ground, Level::Excited) => 2,
        (Level::Ground, Level::Ground) => 3,
    }
}

/// `|atom1 atom2⟩ ⊗ |n1⟩ ⊗ |n2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub atom1: Level,
    pub atom2: Level,
    pub n1: u32,
    pub n2: u32,
}

impl BasisState {
    pub fn new(atom1: Level, atom2: Level, n1: u32, n2: u32) -> Self {
        Self { atom1, atom2, n1, n2 }
    }

    pub fn excitation(&self) -> u32 {
        self.atom1.excitation() + self.atom2.excitation() + self.n1 + self.n2
    }

    pub fn atomic_index(&self) -> usize {
        atomic_index(self.atom1, self.atom2)
    }

    pub fn atom(&self, which: usize) -> Level {
        if which == 0 {
            self.atom1
        } else {
            self.atom2
        }
    }

    pub fn photons(&self, mode: usize) -> u32 {
        if mode == 0 {
            self.n1
        } else {
            self.n2
        }
    }

    pub(crate) fn with_atom(mut self, which: usize, level: Level) -> Self {
        if which == 0 {
            self.atom1 = level;
        } else {
            self.atom2 = level;
        }
        self
    }

    pub(crate) fn with_photons(mut self, mode: usize, n: u32) -> Self {
        if mode == 0 {
            self.n1 = n;
        } else {
            self.n2 = n;
        }
        self
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |x: Level| if x == Level::Excited { 'e' } else { 'g' };
        write!(f, "|{}1{}2⟩|{}⟩|{}⟩", l(self.atom1), l(self.atom2), self.n1, self.n2)
    }
}

/// Ordered basis of one excitation sector.
#[derive(Debug, Clone)]
pub struct Subspace {
    excitation: u32,
    basis: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl Subspace {
    fn from_basis(excitation: u32, basis: Vec<BasisState>) -> Self {
        let index = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self {
            excitation,
            basis,
            index,
        }
    }

    pub fn excitation(&self) -> u32 {
        self.excitation
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.basis[i]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Canonical basis of the `excitation`-sector, optionally keeping only
/// states with at most `photon_cap` photons per mode.
fn sector_states(excitation: u32, photon_cap: Option<u32>) -> Vec<BasisState> {
    use Level::{Excited as E, Ground as G};
    let families: [(Level, Level, Option<u32>); 4] = [
        (E, G, excitation.checked_sub(1)),
        (G, E, excitation.checked_sub(1)),
        (G, G, Some(excitation)),
        (E, E, excitation.checked_sub(2)),
    ];
    let mut basis = Vec::new();
    for (atom1, atom2, photons) in families {
        let Some(m) = photons else { continue };
        for n1 in (0..=m).rev() {
            let s = BasisState::new(atom1, atom2, n1, m - n1);
            if photon_cap.is_none_or(|cap| s.n1 <= cap && s.n2 <= cap) {
                basis.push(s);
            }
        }
    }
    basis
}

/// Canonical basis of the sector with total excitation `excitation`.
/// Dimension is 1, 4, and `4N` for `N = 0`, `1`, `N ≥ 2`.
pub fn enumerate_subspace(excitation: u32) -> Subspace {
    Subspace::from_basis(excitation, sector_states(excitation, None))
}

/// The sector restricted to at most `photon_cap` photons per cavity. Used by
/// the dissipative engine, whose truncation is per mode.
pub fn enumerate_truncated_subspace(excitation: u32, photon_cap: u32) -> Subspace {
    Subspace::from_basis(excitation, sector_states(excitation, Some(photon_cap)))
}

// (mean photon number, cutoff) pairs the rule must reproduce exactly; between
// them the cutoff is interpolated linearly, and beyond the last anchor it grows
// by 5 per photon.
const CUTOFF_ANCHORS: [(f64, f64); 4] = [(0.0, 5.0), (0.1, 5.0), (1.0, 15.0), (10.0, 60.0)];

/// Largest excitation number retained for thermal fields of mean occupation
/// `n_bar`: 5 at n̄ = 0.1, 15 at n̄ = 1, 60 at n̄ = 10, monotone in between
/// and growing as 5n̄ for hot fields.
pub fn cutoff_for(n_bar: f64) -> Result<u32> {
    if !n_bar.is_finite() || n_bar < 0.0 {
        return Err(invalid("n_bar", format!("must be finite and >= 0, got {n_bar}")));
    }
    let (last_n, last_cut) = CUTOFF_ANCHORS[CUTOFF_ANCHORS.len() - 1];
    let raw = if n_bar >= last_n {
        last_cut + 5.0 * (n_bar - last_n)
    } else {
        let seg = CUTOFF_ANCHORS
            .windows(2)
            .find(|w| n_bar <= w[1].0)
            .expect("n_bar below last anchor");
        let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
        y0 + (y1 - y0) * (n_bar - x0) / (x1 - x0)
    };
    // Absorb rounding noise so the anchors land on their integers.
    Ok((raw - 1e-9).ceil().max(0.0) as u32)
}
