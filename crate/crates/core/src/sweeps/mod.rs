//! Parameter sweeps: one axis of model parameters crossed with a time grid,
//! evaluated by either engine and exported as CSV.

mod config;
mod presets;
mod table;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::SweepConfig;
pub use presets::{preset, preset_with, run_figure, GridOverrides, PRESET_NAMES};
pub use table::{format_float, ResultTable, Row};

use crate::entanglement::{concurrence, population_inversion};
use crate::error::{Error, Result};
use crate::evolution::{simulate, TimeGrid, UnitaryOptions};
use crate::exec::Exec;
use crate::hilbert::cutoff_for;
use crate::lindblad::{integrate_reduced, DissipationParams, FullDensity, FullSpace, IntegratorOptions, Liouvillian};
use crate::model::ModelParams;
use crate::states::AtomicInitialState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Unitary,
    Lindblad,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unitary" => Ok(Self::Unitary),
            "lindblad" => Ok(Self::Lindblad),
            other => Err(Error::InvalidSweep(format!("unknown engine `{other}`"))),
        }
    }
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// `J/g`
    Hopping,
    /// `δ/g`
    Detuning,
    /// `n̄` of both fields (and of the reservoirs)
    MeanPhotons,
    /// `C_κγ = g²/(κγ)` at fixed `γ/κ`
    Cooperativity,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            Self::Hopping => "J_over_g",
            Self::Detuning => "delta_over_g",
            Self::MeanPhotons => "n_bar",
            Self::Cooperativity => "cooperativity",
        }
    }

    pub fn from_column(s: &str) -> Result<Self> {
        [Self::Hopping, Self::Detuning, Self::MeanPhotons, Self::Cooperativity]
            .into_iter()
            .find(|a| a.column() == s.trim())
            .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep axis `{s}`")))
    }
}

/// Parameters held fixed across a sweep (the swept one is overridden).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub delta: f64,
    pub hopping: f64,
    pub n_bar: f64,
    pub g1: f64,
    pub g2: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Required by the cooperativity axis.
    pub gamma_over_kappa: Option<f64>,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            delta: 0.0,
            hopping: 0.0,
            n_bar: 0.0,
            g1: 1.0,
            g2: 1.0,
            kappa: 0.0,
            gamma: 0.0,
            gamma_over_kappa: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub name: String,
    pub initial_state: AtomicInitialState,
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub times: TimeGrid,
    pub fixed: FixedParams,
    /// Sets `g₁ = J` at every grid point.
    #[serde(default)]
    pub g1_tracks_hopping: bool,
    pub engine: Engine,
    #[serde(default)]
    pub cutoff_override: Option<u32>,
    /// Runs whose retained thermal mass falls below this fail.
    pub min_retained_mass: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub notes: Vec<String>,
}

pub const DEFAULT_MIN_RETAINED_MASS: f64 = 0.95;

/// Everything needed to evaluate one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub axis_value: f64,
    pub model: ModelParams,
    pub dissipation: Option<DissipationParams>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if self.axis_values.is_empty() {
            return bad("axis grid is empty".into());
        }
        if self.axis_values.iter().any(|v| !v.is_finite()) {
            return bad("axis grid has non-finite values".into());
        }
        if self.axis_values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("axis grid must be strictly increasing".into());
        }
        let dissipative = self.fixed.kappa > 0.0 || self.fixed.gamma > 0.0 || self.axis == SweepAxis::Cooperativity;
        if dissipative && self.engine != Engine::Lindblad {
            return bad("decay rates require the lindblad engine".into());
        }
        if self.axis == SweepAxis::Cooperativity && self.fixed.gamma_over_kappa.is_none() {
            return bad("cooperativity axis needs gamma_over_kappa".into());
        }
        if !(0.0..=1.0).contains(&self.min_retained_mass) {
            return bad("min_retained_mass must lie in [0, 1]".into());
        }
        for v in &self.axis_values {
            let p = self.point(*v)?;
            p.model.validate()?;
            if let Some(d) = p.dissipation {
                d.validate()?;
            }
        }
        Ok(())
    }

    /// Model (and dissipation) parameters at axis value `value`.
    pub fn point(&self, value: f64) -> Result<PointParams> {
        let f = &self.fixed;
        let mut m = ModelParams {
            g1: f.g1,
            g2: f.g2,
            delta1: f.delta,
            delta2: f.delta,
            hopping: f.hopping,
            n_bar1: f.n_bar,
            n_bar2: f.n_bar,
        };
        let mut n_bar = f.n_bar;
        match self.axis {
            SweepAxis::Hopping => m.hopping = value,
            SweepAxis::Detuning => {
                m.delta1 = value;
                m.delta2 = value;
            }
            SweepAxis::MeanPhotons => {
                m.n_bar1 = value;
                m.n_bar2 = value;
                n_bar = value;
            }
            SweepAxis::Cooperativity => {}
        }
        if self.g1_tracks_hopping {
            m.g1 = m.hopping;
        }
        let dissipation = match (self.engine, self.axis) {
            (Engine::Unitary, _) => None,
            (Engine::Lindblad, SweepAxis::Cooperativity) => {
                let ratio = f.gamma_over_kappa.unwrap_or(1.0);
                Some(DissipationParams::from_cooperativity(value, ratio, n_bar)?)
            }
            (Engine::Lindblad, _) => Some(DissipationParams::new(f.kappa, f.gamma, n_bar)?),
        };
        Ok(PointParams {
            axis_value: value,
            model: m,
            dissipation,
        })
    }
}

/// Truncation used at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub axis_value: f64,
    /// Excitation cutoff (unitary) or per-mode photon cap (lindblad).
    pub cutoff: u32,
    pub retained_mass: f64,
}

fn check_mass(retained: f64, minimum: f64) -> Result<()> {
    if retained < minimum {
        return Err(Error::TruncationMass { retained, minimum });
    }
    Ok(())
}

/// Rows of one grid point, in time order.
pub fn run_point(spec: &SweepSpec, value: f64, exec: Exec) -> Result<(Vec<Row>, PointSummary)> {
    let p = spec.point(value)?;
    let n_bar = p.model.n_bar1.max(p.model.n_bar2);
    let grid = &spec.times;
    match p.dissipation {
        None => {
            let opts = UnitaryOptions {
                cutoff: spec.cutoff_override,
                exec,
            };
            let run = simulate(&p.model, spec.initial_state, grid, &opts)?;
            check_mass(run.retained_mass, spec.min_retained_mass)?;
            let rows = run
                .snapshots
                .iter()
                .map(|s| {
                    Ok(Row {
                        axis: value,
                        gt: s.time,
                        concurrence: concurrence(&s.rho)?,
                        inversion: population_inversion(&s.rho),
                        mean_photon_1: s.mean_photon[0],
                        mean_photon_2: s.mean_photon[1],
                        retained_thermal_mass: run.retained_mass,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = PointSummary {
                axis_value: value,
                cutoff: run.cutoff,
                retained_mass: run.retained_mass,
            };
            Ok((rows, summary))
        }
        Some(diss) => {
            let n_max = match spec.cutoff_override {
                Some(c) => c,
                None => cutoff_for(n_bar)?,
            };
            let space = FullSpace::new(n_max);
            let (rho0, mass) =
                FullDensity::thermal_product(space.clone(), spec.initial_state, p.model.n_bar1, p.model.n_bar2)?;
            check_mass(mass, spec.min_retained_mass)?;
            let l = Liouvillian::new(&p.model, &diss, space)?;
            let states = integrate_reduced(&l, &rho0, grid, &IntegratorOptions::default())?;
            let rows = grid
                .samples()
                .iter()
                .zip(&states)
                .map(|(&t, (rho, photons))| {
                    Ok(Row {
                        axis: value,
                        gt: t,
                        concurrence: concurrence(rho)?,
                        inversion: population_inversion(rho),
                        mean_photon_1: photons[0],
                        mean_photon_2: photons[1],
                        retained_thermal_mass: mass,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summary = PointSummary {
                axis_value: value,
                cutoff: n_max,
                retained_mass: mass,
            };
            Ok((rows, summary))
        }
    }
}

/// Evaluates every grid point. Rows are ordered by axis index, then time,
/// regardless of the execution policy.
pub fn run_sweep(spec: &SweepSpec, exec: Exec) -> Result<ResultTable> {
    spec.validate()?;
    let results = exec.map(&spec.axis_values, |&v| run_point(spec, v, exec));
    let mut rows = Vec::with_capacity(spec.axis_values.len() * spec.times.len());
    let mut points = Vec::with_capacity(spec.axis_values.len());
    for r in results {
        let (mut r, s) = r?;
        rows.append(&mut r);
        points.push(s);
    }
    Ok(ResultTable {
        axis: spec.axis,
        rows,
        points,
    })
}

/// Runs `spec` and writes the CSV and metadata sidecar next to each other.
/// Returns the CSV path.
pub fn run_sweep_to(spec: &SweepSpec, csv_path: &Path, exec: Exec) -> Result<ResultTable> {
    let table = run_sweep(spec, exec)?;
    table.write_csv(csv_path)?;
    table::write_metadata(spec, &table, &table::sidecar_path(csv_path))?;
    Ok(table)
}
