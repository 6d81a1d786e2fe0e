//! Unitary evolution of the thermal ensemble.
//!
//! Each ensemble member `|atoms⟩|n₁,n₂⟩` has a definite excitation number and
//! evolves inside one sector. Every sector Hamiltonian is diagonalized once;
//! a time sample then costs one phase multiplication and one basis change
//! per sector, with all members of a sector handled as the columns of one
//! matrix. The reduced atomic state is the weighted sum of the members'
//! partial traces, accumulated in `(n₁, n₂)` order at every sample so the
//! result does not depend on the execution policy.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{AtomicDensity, POSITIVITY_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::hilbert::{cutoff_for, enumerate_subspace, BasisState, Subspace, ATOMIC_BASIS};
use crate::model::{build_hamiltonian_block, HermitianBlock, ModelParams};
use crate::states::{initial_density, AtomicInitialState, Ensemble, ThermalSpec};

/// Strictly increasing dimensionless times `gt ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TimeGrid("no samples".into()));
        }
        if samples.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::TimeGrid("samples must be finite and >= 0".into()));
        }
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::TimeGrid("samples must be strictly increasing".into()));
        }
        Ok(Self(samples))
    }

    /// `count` evenly spaced samples on `[0, t_max]`.
    pub fn linspace(t_max: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(Error::TimeGrid("no samples".into())),
            1 => Self::new(vec![t_max]),
            _ => Self::new((0..count).map(|i| t_max * i as f64 / (count - 1) as f64).collect()),
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.0
    }
}

#[derive(Debug, Clone)]
enum Eigenvectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Spectral decomposition `H = V diag(E) V†` of one block.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vec<f64>,
    vectors: Eigenvectors,
}

impl Propagator {
    pub fn new(block: &HermitianBlock) -> Result<Self> {
        let scale = block.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let deviation = block.hermiticity_defect();
        if deviation > 1e-12 * scale {
            return Err(Error::NotHermitian { deviation });
        }
        if block.is_real() {
            let eig = SymmetricEigen::new(block.matrix.map(|z| z.re));
            Ok(Self {
                energies: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Real(eig.eigenvectors),
            })
        } else {
            let eig = SymmetricEigen::new(block.matrix.clone());
            Ok(Self {
                energies: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Complex(eig.eigenvectors),
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `V† Ψ`: coordinates of the columns of `states` in the eigenbasis.
    fn to_eigenbasis(&self, states: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match &self.vectors {
            Eigenvectors::Real(v) => {
                let re = v.tr_mul(&states.map(|z| z.re));
                let im = v.tr_mul(&states.map(|z| z.im));
                combine(&re, &im)
            }
            Eigenvectors::Complex(v) => v.ad_mul(states),
        }
    }

    /// `V diag(e^{−iEt}) C` for eigenbasis coordinates `C`.
    fn propagate(&self, coeffs: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        let mut phased = coeffs.clone();
        for (j, &e) in self.energies.iter().enumerate() {
            let p = Complex64::from_polar(1.0, -e * t);
            phased.row_mut(j).iter_mut().for_each(|z| *z *= p);
        }
        match &self.vectors {
            Eigenvectors::Real(v) => {
                let re = v * phased.map(|z| z.re);
                let im = v * phased.map(|z| z.im);
                combine(&re, &im)
            }
            Eigenvectors::Complex(v) => v * phased,
        }
    }

    /// `exp(−iHt) ψ`.
    pub fn apply(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let m = DMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
        let out = self.propagate(&self.to_eigenbasis(&m), t);
        DVector::from_column_slice(out.as_slice())
    }
}

fn combine(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(im, Complex64::new)
}

/// `exp(−iHt)·initial` at every grid sample.
pub fn evolve_trajectory(
    block: &HermitianBlock,
    initial: &DVector<Complex64>,
    grid: &TimeGrid,
) -> Result<Vec<DVector<Complex64>>> {
    if initial.len() != block.dim() {
        return Err(invalid("initial", "vector dimension does not match the block"));
    }
    let prop = Propagator::new(block)?;
    let m = DMatrix::from_column_slice(initial.len(), 1, initial.as_slice());
    let coeffs = prop.to_eigenbasis(&m);
    Ok(grid
        .samples()
        .iter()
        .map(|&t| DVector::from_column_slice(prop.propagate(&coeffs, t).as_slice()))
        .collect())
}

/// Amplitude vector of `|atoms⟩|n1,n2⟩` in the canonical basis of `sub`.
pub fn embed(atoms: AtomicInitialState, n1: u32, n2: u32, sub: &Subspace) -> Result<DVector<Complex64>> {
    let mut v = DVector::zeros(sub.dim());
    for (k, amp) in atoms.amplitudes().into_iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let (a1, a2) = ATOMIC_BASIS[k];
        let s = BasisState::new(a1, a2, n1, n2);
        let i = sub.index_of(&s).ok_or_else(|| {
            invalid(
                "atoms",
                format!("{s} is not in the excitation-{} sector", sub.excitation()),
            )
        })?;
        v[i] = amp;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnitaryOptions {
    /// Overrides the excitation cutoff chosen from the mean photon numbers.
    pub cutoff: Option<u32>,
    pub exec: Exec,
}

/// Reduced atomic state and cavity occupations at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub rho: AtomicDensity,
    pub mean_photon: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct UnitaryRun {
    pub snapshots: Vec<Snapshot>,
    pub cutoff: u32,
    pub retained_mass: f64,
    pub trajectories: usize,
}

struct SectorPlan {
    propagator: Propagator,
    /// Eigenbasis coordinates of the members, one column each.
    coeffs: DMatrix<Complex64>,
    /// Ensemble index of each column.
    members: Vec<usize>,
    /// Per photon pair, the sector indices of the four atomic configurations,
    /// with the photon numbers.
    groups: Vec<([Option<usize>; 4], [u32; 2])>,
}

fn field_groups(sub: &Subspace) -> Vec<([Option<usize>; 4], [u32; 2])> {
    let mut map: BTreeMap<(u32, u32), [Option<usize>; 4]> = BTreeMap::new();
    for (i, s) in sub.basis().iter().enumerate() {
        map.entry((s.n1, s.n2)).or_insert([None; 4])[s.atomic_index()] = Some(i);
    }
    map.into_iter().map(|((a, b), g)| (g, [a, b])).collect()
}

fn plan_sector(params: &ModelParams, ensemble: &Ensemble, excitation: u32, members: Vec<usize>) -> Result<SectorPlan> {
    let sub = enumerate_subspace(excitation);
    let block = build_hamiltonian_block(params, &sub);
    let propagator = Propagator::new(&block)?;
    let mut initial = DMatrix::zeros(sub.dim(), members.len());
    for (c, &m) in members.iter().enumerate() {
        let t = &ensemble.trajectories[m];
        initial.set_column(c, &embed(t.atoms, t.n1, t.n2, &sub)?);
    }
    Ok(SectorPlan {
        coeffs: propagator.to_eigenbasis(&initial),
        propagator,
        members,
        groups: field_groups(&sub),
    })
}

type Contribution = (Matrix4<Complex64>, [f64; 2]);

fn sample(plans: &[SectorPlan], ensemble: &Ensemble, t: f64) -> Result<Snapshot> {
    let zero = (Matrix4::<Complex64>::zeros(), [0.0; 2]);
    let mut slots: Vec<Contribution> = vec![zero; ensemble.trajectories.len()];
    for plan in plans {
        let psi = plan.propagator.propagate(&plan.coeffs, t);
        for (c, &member) in plan.members.iter().enumerate() {
            let col = psi.column(c);
            let (rho, photons) = &mut slots[member];
            for (idx, n) in &plan.groups {
                let amps = idx.map(|i| i.map(|i| col[i]));
                for s in 0..4 {
                    let Some(a) = amps[s] else { continue };
                    let p = a.norm_sqr();
                    photons[0] += p * n[0] as f64;
                    photons[1] += p * n[1] as f64;
                    for u in 0..4 {
                        if let Some(b) = amps[u] {
                            rho[(s, u)] += a * b.conj();
                        }
                    }
                }
            }
        }
    }
    let mut rho = Matrix4::<Complex64>::zeros();
    let mut photons = [0.0; 2];
    for (traj, (r, p)) in ensemble.trajectories.iter().zip(&slots) {
        rho += r * Complex64::new(traj.weight, 0.0);
        photons[0] += traj.weight * p[0];
        photons[1] += traj.weight * p[1];
    }
    let rho = AtomicDensity::from_matrix(rho).into_physical(POSITIVITY_TOLERANCE)?;
    Ok(Snapshot {
        time: t,
        rho,
        mean_photon: photons,
    })
}

/// Evolves an explicit ensemble.
pub fn simulate_ensemble(
    params: &ModelParams,
    ensemble: &Ensemble,
    grid: &TimeGrid,
    exec: Exec,
) -> Result<Vec<Snapshot>> {
    params.validate()?;
    let mut by_sector: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, t) in ensemble.trajectories.iter().enumerate() {
        by_sector.entry(t.excitation()).or_default().push(i);
    }
    let sectors: Vec<(u32, Vec<usize>)> = by_sector.into_iter().collect();
    let plans = exec
        .map(&sectors, |(n, members)| {
            plan_sector(params, ensemble, *n, members.clone())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    exec.map(grid.samples(), |&t| sample(&plans, ensemble, t))
        .into_iter()
        .collect()
}

/// Reduced atomic state and cavity occupations for the thermal initial state
/// `|atoms⟩⟨atoms| ⊗ ρ_th(n̄₁) ⊗ ρ_th(n̄₂)`.
pub fn simulate(
    params: &ModelParams,
    atoms: AtomicInitialState,
    grid: &TimeGrid,
    opts: &UnitaryOptions,
) -> Result<UnitaryRun> {
    params.validate()?;
    let cutoff = match opts.cutoff {
        Some(c) => c,
        None => cutoff_for(params.n_bar1.max(params.n_bar2))?,
    };
    let ensemble = initial_density(
        atoms,
        &ThermalSpec::new(params.n_bar1, cutoff)?,
        &ThermalSpec::new(params.n_bar2, cutoff)?,
    )?;
    let snapshots = simulate_ensemble(params, &ensemble, grid, opts.exec)?;
    Ok(UnitaryRun {
        snapshots,
        cutoff,
        retained_mass: ensemble.retained_mass,
        trajectories: ensemble.trajectories.len(),
    })
}

/// Reduced atomic density at each grid sample, with the default cutoff.
pub fn reduced_atomic_density(
    params: &ModelParams,
    atoms: AtomicInitialState,
    grid: &TimeGrid,
) -> Result<Vec<AtomicDensity>> {
    let run = simulate(params, atoms, grid, &UnitaryOptions::default())?;
    Ok(run.snapshots.into_iter().map(|s| s.rho).collect())
}
