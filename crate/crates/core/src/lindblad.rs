//! Thermal master equation on the truncated atoms ⊗ field₁ ⊗ field₂ space.
//!
//! ```text
//! ρ̇ = −i[H, ρ] + Σᵢ ( κ(n̄+1) D[aᵢ] + κn̄ D[aᵢ†] + γ(n̄+1) D[Sᵢ⁻] + γn̄ D[Sᵢ⁺] ) ρ
//! D[L]ρ = LρL† − ½{L†L, ρ}
//! ```
//!
//! Each cavity keeps Fock states `0..=n_max`. The basis is ordered by total
//! excitation, and every term of the generator maps the excitation-diagonal
//! blocks of ρ into themselves, so a state that starts block diagonal (all
//! product initial states with thermal fields do) is propagated on its blocks
//! only.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{partial_trace_fields, AtomicDensity};
use crate::error::{invalid, Error, Result};
use crate::evolution::TimeGrid;
use crate::hilbert::{enumerate_truncated_subspace, BasisState, Level};
use crate::model::{hamiltonian_terms, ModelParams};
use crate::states::{AtomicInitialState, ThermalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationParams {
    /// Cavity decay rate κ.
    pub kappa: f64,
    /// Atomic spontaneous emission rate γ.
    pub gamma: f64,
    /// Reservoir occupation.
    pub n_bar: f64,
}

impl DissipationParams {
    pub fn new(kappa: f64, gamma: f64, n_bar: f64) -> Result<Self> {
        let p = Self { kappa, gamma, n_bar };
        p.validate()?;
        Ok(p)
    }

    /// Rates with `κγ = g²/cooperativity` and `γ = ratio·κ`.
    pub fn from_cooperativity(cooperativity: f64, gamma_over_kappa: f64, n_bar: f64) -> Result<Self> {
        if !(cooperativity.is_finite() && cooperativity > 0.0) {
            return Err(invalid("cooperativity", "must be finite and > 0"));
        }
        if !(gamma_over_kappa.is_finite() && gamma_over_kappa > 0.0) {
            return Err(invalid("gamma_over_kappa", "must be finite and > 0"));
        }
        let kappa = (1.0 / (cooperativity * gamma_over_kappa)).sqrt();
        Self::new(kappa, gamma_over_kappa * kappa, n_bar)
    }

    /// `g²/(κγ)` in units of `g`.
    pub fn cooperativity(&self) -> f64 {
        1.0 / (self.kappa * self.gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("gamma", self.gamma), ("n_bar", self.n_bar)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

type PhotonPair = (u32, u32);

/// Truncated product space with at most `n_max` photons per cavity.
#[derive(Debug)]
pub struct FullSpace {
    n_max: u32,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    sectors: Vec<Range<usize>>,
    field_groups: Vec<[Option<usize>; 4]>,
}

impl FullSpace {
    pub fn new(n_max: u32) -> Arc<Self> {
        let mut states = Vec::new();
        let mut sectors = Vec::new();
        for n in 0..=(2 * n_max + 2) {
            let start = states.len();
            states.extend_from_slice(enumerate_truncated_subspace(n, n_max).basis());
            sectors.push(start..states.len());
        }
        let index: HashMap<_, _> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut groups: Vec<(PhotonPair, [Option<usize>; 4])> = Vec::new();
        let mut group_of: HashMap<(u32, u32), usize> = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            let g = *group_of.entry((s.n1, s.n2)).or_insert_with(|| {
                groups.push(((s.n1, s.n2), [None; 4]));
                groups.len() - 1
            });
            groups[g].1[s.atomic_index()] = Some(i);
        }
        groups.sort_by_key(|(f, _)| *f);
        Arc::new(Self {
            n_max,
            states,
            index,
            sectors,
            field_groups: groups.into_iter().map(|(_, g)| g).collect(),
        })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Index ranges of the excitation sectors, in increasing excitation.
    pub fn sectors(&self) -> &[Range<usize>] {
        &self.sectors
    }

    /// For each photon pair `(n1, n2)`, the indices of the four atomic
    /// configurations (in atomic-basis order).
    pub fn field_groups(&self) -> &[[Option<usize>; 4]] {
        &self.field_groups
    }
}

/// Density matrix on a [`FullSpace`].
#[derive(Debug, Clone)]
pub struct FullDensity {
    space: Arc<FullSpace>,
    matrix: DMatrix<Complex64>,
}

impl FullDensity {
    pub fn from_matrix(space: Arc<FullSpace>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(invalid("rho", "matrix dimension does not match the space"));
        }
        Ok(Self { space, matrix })
    }

    /// `|atoms⟩⟨atoms| ⊗ ρ_th(n̄₁) ⊗ ρ_th(n̄₂)` with each thermal distribution
    /// cut at `n_max` and renormalized. Returns the state and the raw
    /// retained mass of the two truncated distributions.
    pub fn thermal_product(
        space: Arc<FullSpace>,
        atoms: AtomicInitialState,
        n_bar1: f64,
        n_bar2: f64,
    ) -> Result<(Self, f64)> {
        let th1 = ThermalSpec::new(n_bar1, space.n_max())?;
        let th2 = ThermalSpec::new(n_bar2, space.n_max())?;
        let (p1, p2) = (th1.pmf(), th2.pmf());
        let mass = th1.retained_mass() * th2.retained_mass();
        let amps = atoms.amplitudes();
        let dim = space.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (n1, w1) in p1.iter().enumerate() {
            for (n2, w2) in p2.iter().enumerate() {
                let w = w1 * w2 / mass;
                let idx = |k: usize| {
                    let (a1, a2) = crate::hilbert::ATOMIC_BASIS[k];
                    space.index_of(&BasisState::new(a1, a2, n1 as u32, n2 as u32))
                };
                for s in 0..4 {
                    for t in 0..4 {
                        let amp = amps[s] * amps[t].conj();
                        if amp == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        if let (Some(i), Some(j)) = (idx(s), idx(t)) {
                            m[(i, j)] += amp * w;
                        }
                    }
                }
            }
        }
        Ok((Self { space, matrix: m }, mass))
    }

    pub fn space(&self) -> &Arc<FullSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

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

    /// Whether every entry coupling different excitation sectors vanishes.
    pub fn is_sector_diagonal(&self) -> bool {
        let sector_of = sector_lookup(&self.space);
        let m = &self.matrix;
        (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| sector_of[i] == sector_of[j] || m[(i, j)].norm() == 0.0))
    }

    /// Largest population of a state with a cavity at the Fock cap.
    pub fn edge_population(&self) -> f64 {
        let cap = self.space.n_max;
        self.space
            .states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.n1 == cap || s.n2 == cap)
            .map(|(i, _)| self.matrix[(i, i)].re)
            .fold(0.0, f64::max)
    }

    pub fn reduced(&self) -> AtomicDensity {
        partial_trace_fields(self)
    }
}

fn sector_lookup(space: &FullSpace) -> Vec<usize> {
    let mut out = vec![0; space.dim()];
    for (k, r) in space.sectors.iter().enumerate() {
        for i in r.clone() {
            out[i] = k;
        }
    }
    out
}

/// A jump operator with at most one nonzero per column, stored as the
/// target row and amplitude for each column (rate already folded in).
#[derive(Debug, Clone)]
struct Jump {
    target: Vec<Option<(usize, f64)>>,
}

/// The generator for fixed model and dissipation parameters.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: Arc<FullSpace>,
    /// Columns of `H − (i/2) Σ L†L`, as `(row, value)`.
    heff: Vec<Vec<(usize, Complex64)>>,
    jumps: Vec<Jump>,
}

impl Liouvillian {
    pub fn new(params: &ModelParams, diss: &DissipationParams, space: Arc<FullSpace>) -> Result<Self> {
        params.validate()?;
        diss.validate()?;
        let dim = space.dim();
        let n_max = space.n_max();
        let mut heff: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (col, s) in space.states().iter().enumerate() {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            hamiltonian_terms(params, s, &mut |target, amp| {
                if amp == 0.0 {
                    return;
                }
                // terms leaving the per-mode cap are truncated away
                if let Some(row) = space.index_of(&target) {
                    match entries.iter_mut().find(|(r, _)| *r == row) {
                        Some(e) => e.1 += amp,
                        None => entries.push((row, amp)),
                    }
                }
            });
            heff[col] = entries.into_iter().map(|(r, v)| (r, Complex64::new(v, 0.0))).collect();
        }

        let (kappa, gamma, n_bar) = (diss.kappa, diss.gamma, diss.n_bar);
        let mut jumps = Vec::new();
        for mode in 0..2 {
            for (rate, raise) in [(kappa * (n_bar + 1.0), false), (kappa * n_bar, true)] {
                if rate == 0.0 {
                    continue;
                }
                let amp = rate.sqrt();
                jumps.push(Jump {
                    target: space
                        .states()
                        .iter()
                        .map(|s| {
                            let n = s.photons(mode);
                            let (to, f) = if raise {
                                if n >= n_max {
                                    return None;
                                }
                                (n + 1, ((n + 1) as f64).sqrt())
                            } else {
                                if n == 0 {
                                    return None;
                                }
                                (n - 1, (n as f64).sqrt())
                            };
                            space.index_of(&s.with_photons(mode, to)).map(|r| (r, amp * f))
                        })
                        .collect(),
                });
            }
        }
        for atom in 0..2 {
            for (rate, from, to) in [
                (gamma * (n_bar + 1.0), Level::Excited, Level::Ground),
                (gamma * n_bar, Level::Ground, Level::Excited),
            ] {
                if rate == 0.0 {
                    continue;
                }
                let amp = rate.sqrt();
                jumps.push(Jump {
                    target: space
                        .states()
                        .iter()
                        .map(|s| {
                            if s.atom(atom) != from {
                                return None;
                            }
                            space.index_of(&s.with_atom(atom, to)).map(|r| (r, amp))
                        })
                        .collect(),
                });
            }
        }
        // −(i/2) Σ L†L is diagonal for single-entry-per-column jumps
        for jump in &jumps {
            for (col, t) in jump.target.iter().enumerate() {
                if let Some((_, v)) = t {
                    let diag = Complex64::new(0.0, -0.5 * v * v);
                    match heff[col].iter_mut().find(|(r, _)| *r == col) {
                        Some(e) => e.1 += diag,
                        None => heff[col].push((col, diag)),
                    }
                }
            }
        }
        Ok(Self { space, heff, jumps })
    }

    pub fn space(&self) -> &Arc<FullSpace> {
        &self.space
    }

    /// Gershgorin bound on the generator's frequencies, used to size steps.
    pub fn frequency_bound(&self) -> f64 {
        self.heff
            .iter()
            .map(|col| col.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Writes `L(ρ)` into `out`, treating only entries of `rho` inside the
    /// given diagonal blocks as nonzero. `x` is scratch space.
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64], x: &mut [Complex64], blocks: &[Range<usize>]) {
        let dim = self.space.dim();
        let i_unit = Complex64::new(0.0, 1.0);
        out.fill(Complex64::new(0.0, 0.0));
        for r in blocks {
            // x = H_eff ρ on the block
            for j in r.clone() {
                let xcol = &mut x[j * dim..(j + 1) * dim];
                for i in r.clone() {
                    xcol[i] = Complex64::new(0.0, 0.0);
                }
                for k in r.clone() {
                    let rkj = rho[k + j * dim];
                    if rkj.re == 0.0 && rkj.im == 0.0 {
                        continue;
                    }
                    for &(i, h) in &self.heff[k] {
                        xcol[i] += h * rkj;
                    }
                }
            }
            // −i H_eff ρ + i ρ H_eff†, using ρ H_eff† = (H_eff ρ)† for Hermitian ρ
            for j in r.clone() {
                for i in r.clone() {
                    out[i + j * dim] += -i_unit * x[i + j * dim] + i_unit * x[j + i * dim].conj();
                }
            }
            for jump in &self.jumps {
                for l in r.clone() {
                    let Some((rl, vl)) = jump.target[l] else { continue };
                    for k in r.clone() {
                        let Some((rk, vk)) = jump.target[k] else { continue };
                        out[rk + rl * dim] += rho[k + l * dim] * (vk * vl);
                    }
                }
            }
        }
    }

    /// `dρ/dt` for a Hermitian `rho`.
    pub fn rhs(&self, rho: &FullDensity) -> FullDensity {
        let dim = self.space.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut x = DMatrix::zeros(dim, dim);
        let all = 0..dim;
        self.apply(
            rho.matrix.as_slice(),
            out.as_mut_slice(),
            x.as_mut_slice(),
            std::slice::from_ref(&all),
        );
        FullDensity {
            space: self.space.clone(),
            matrix: out,
        }
    }
}

/// `dρ/dt` of the thermal master equation.
pub fn lindblad_rhs(params: &ModelParams, diss: &DissipationParams, rho: &FullDensity) -> Result<FullDensity> {
    Ok(Liouvillian::new(params, diss, rho.space.clone())?.rhs(rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Upper bound on the step; the step is also limited to
    /// `step_scale / frequency_bound`.
    pub max_step: f64,
    pub step_scale: f64,
    pub min_step: f64,
    pub trace_tolerance: f64,
    /// When set, the run is repeated at half the step and the reduced
    /// states compared against this tolerance.
    pub convergence_tolerance: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            max_step: 0.005,
            step_scale: 0.5,
            min_step: 1e-9,
            trace_tolerance: 1e-8,
            convergence_tolerance: None,
        }
    }
}

struct Rk4 {
    dim: usize,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim * dim];
        Self {
            dim,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z.clone(),
            scratch: z,
        }
    }

    fn step(&mut self, l: &Liouvillian, rho: &mut [Complex64], h: f64, blocks: &[Range<usize>]) {
        let [k1, k2, k3, k4] = &mut self.k;
        l.apply(rho, k1, &mut self.scratch, blocks);
        axpy_into(&mut self.stage, rho, 0.5 * h, k1);
        l.apply(&self.stage, k2, &mut self.scratch, blocks);
        axpy_into(&mut self.stage, rho, 0.5 * h, k2);
        l.apply(&self.stage, k3, &mut self.scratch, blocks);
        axpy_into(&mut self.stage, rho, h, k3);
        l.apply(&self.stage, k4, &mut self.scratch, blocks);
        let w = h / 6.0;
        for idx in 0..rho.len() {
            rho[idx] += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
        }
        hermitize(rho, self.dim, blocks);
    }
}

fn axpy_into(out: &mut [Complex64], base: &[Complex64], a: f64, dir: &[Complex64]) {
    for ((o, b), d) in out.iter_mut().zip(base).zip(dir) {
        *o = b + d * a;
    }
}

fn hermitize(rho: &mut [Complex64], dim: usize, blocks: &[Range<usize>]) {
    for r in blocks {
        for j in r.clone() {
            let d = &mut rho[j + j * dim];
            d.im = 0.0;
            for i in r.start..j {
                let avg = (rho[i + j * dim] + rho[j + i * dim].conj()) * 0.5;
                rho[i + j * dim] = avg;
                rho[j + i * dim] = avg.conj();
            }
        }
    }
}

/// Growth of the Fock-edge population that triggers a truncation warning.
pub const EDGE_WARNING: f64 = 1e-4;

/// Integrates from `gt = 0`, calling `observe` at every grid sample.
pub fn integrate_with<T, F>(
    liouvillian: &Liouvillian,
    rho0: &FullDensity,
    grid: &TimeGrid,
    opts: &IntegratorOptions,
    mut observe: F,
) -> Result<Vec<T>>
where
    F: FnMut(f64, &FullDensity) -> T,
{
    if rho0.space.n_max != liouvillian.space.n_max {
        return Err(invalid("rho0", "state and generator live on different spaces"));
    }
    let dim = liouvillian.space.dim();
    let blocks: Vec<Range<usize>> = if rho0.is_sector_diagonal() {
        liouvillian.space.sectors().to_vec()
    } else {
        std::iter::once(0..dim).collect()
    };
    let bound = liouvillian.frequency_bound().max(1e-12);
    let step = opts.max_step.min(opts.step_scale / bound);
    if step.is_nan() || step < opts.min_step {
        return Err(Error::StepUnderflow { step });
    }

    let mut state = rho0.clone();
    let mut rk = Rk4::new(dim);
    let mut now = 0.0;
    let initial_edge = rho0.edge_population();
    let mut edge = initial_edge;
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid.samples() {
        let span = t - now;
        if span > 0.0 {
            let n = (span / step).ceil().max(1.0);
            let h = span / n;
            if h < opts.min_step {
                return Err(Error::StepUnderflow { step: h });
            }
            for _ in 0..n as usize {
                rk.step(liouvillian, state.matrix.as_mut_slice(), h, &blocks);
            }
            now = t;
        }
        let tr = state.trace().re;
        if (tr - 1.0).abs() > opts.trace_tolerance || !tr.is_finite() {
            return Err(Error::TraceDrift { trace: tr, time: t });
        }
        edge = edge.max(state.edge_population());
        out.push(observe(t, &state));
    }
    // the truncated thermal tail already sits on the edge; only growth is reported
    if edge - initial_edge > EDGE_WARNING {
        log::warn!(
            "population at the Fock cap n_max = {} grew to {edge:.3e}; consider raising it",
            liouvillian.space.n_max
        );
    }
    Ok(out)
}

/// Density matrix at every grid sample.
pub fn integrate_master_equation(
    params: &ModelParams,
    diss: &DissipationParams,
    rho0: &FullDensity,
    grid: &TimeGrid,
    opts: &IntegratorOptions,
) -> Result<Vec<FullDensity>> {
    let l = Liouvillian::new(params, diss, rho0.space.clone())?;
    let states = integrate_with(&l, rho0, grid, opts, |_, rho| rho.clone())?;
    if let Some(tol) = opts.convergence_tolerance {
        let coarse: Vec<_> = states.iter().map(FullDensity::reduced).collect();
        check_convergence(&l, rho0, grid, opts, &coarse, tol)?;
    }
    Ok(states)
}

/// Reduced atomic state at every grid sample, with the optional
/// step-halving check from `opts`.
pub fn integrate_reduced(
    liouvillian: &Liouvillian,
    rho0: &FullDensity,
    grid: &TimeGrid,
    opts: &IntegratorOptions,
) -> Result<Vec<(AtomicDensity, [f64; 2])>> {
    let observe = |_: f64, rho: &FullDensity| {
        (
            rho.reduced(),
            [
                crate::entanglement::mean_photon(rho, 0),
                crate::entanglement::mean_photon(rho, 1),
            ],
        )
    };
    let out = integrate_with(liouvillian, rho0, grid, opts, observe)?;
    if let Some(tol) = opts.convergence_tolerance {
        let coarse: Vec<_> = out.iter().map(|(r, _)| *r).collect();
        check_convergence(liouvillian, rho0, grid, opts, &coarse, tol)?;
    }
    Ok(out)
}

/// Largest entrywise change of the reduced states when the step is halved.
pub fn step_halving_difference(
    liouvillian: &Liouvillian,
    rho0: &FullDensity,
    grid: &TimeGrid,
    opts: &IntegratorOptions,
    coarse: &[AtomicDensity],
) -> Result<f64> {
    let bound = liouvillian.frequency_bound().max(1e-12);
    let halved = IntegratorOptions {
        max_step: 0.5 * opts.max_step.min(opts.step_scale / bound),
        convergence_tolerance: None,
        ..*opts
    };
    let fine = integrate_with(liouvillian, rho0, grid, &halved, |_, rho| rho.reduced())?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max))
}

fn check_convergence(
    l: &Liouvillian,
    rho0: &FullDensity,
    grid: &TimeGrid,
    opts: &IntegratorOptions,
    coarse: &[AtomicDensity],
    tolerance: f64,
) -> Result<()> {
    let difference = step_halving_difference(l, rho0, grid, opts, coarse)?;
    if difference > tolerance {
        return Err(Error::NotConverged { difference, tolerance });
    }
    Ok(())
}
