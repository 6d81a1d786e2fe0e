use std::path::{Path, PathBuf};

use super::{run_sweep_to, Engine, FixedParams, SweepAxis, SweepSpec, DEFAULT_MIN_RETAINED_MASS};
use crate::error::{Error, Result};
use crate::evolution::TimeGrid;
use crate::exec::Exec;
use crate::states::AtomicInitialState as S;

/// Names accepted by [`preset`]. Bare figure names expand to all panels.
pub const PRESET_NAMES: [&str; 17] = [
    "fig2", "fig3", "fig4", "fig4a", "fig4b", "fig4c", "fig5", "fig6", "fig7", "fig7a", "fig7b", "fig8", "fig8a",
    "fig8b", "fig8c", "fig8d", "all",
];

/// Grid resolution used by the presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOverrides {
    pub t_max: f64,
    pub t_samples: usize,
    pub axis_samples: usize,
    pub cooperativity_samples: usize,
}

impl Default for GridOverrides {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            t_samples: 500,
            axis_samples: 120,
            cooperativity_samples: 40,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn base(name: &str, state: S, axis: SweepAxis, values: Vec<f64>, g: &GridOverrides) -> Result<SweepSpec> {
    Ok(SweepSpec {
        name: name.to_owned(),
        initial_state: state,
        axis,
        axis_values: values,
        times: TimeGrid::linspace(g.t_max, g.t_samples)?,
        fixed: FixedParams::default(),
        g1_tracks_hopping: false,
        engine: Engine::Unitary,
        cutoff_override: None,
        min_retained_mass: DEFAULT_MIN_RETAINED_MASS,
        output: None,
        notes: vec![],
    })
}

fn hopping_map(name: &str, state: S, delta: f64, n_bar: f64, g: &GridOverrides) -> Result<SweepSpec> {
    let mut s = base(name, state, SweepAxis::Hopping, linspace(0.0, 30.0, g.axis_samples), g)?;
    s.fixed.delta = delta;
    s.fixed.n_bar = n_bar;
    Ok(s)
}

fn cooperativity_map(
    name: &str,
    state: S,
    delta: f64,
    hopping: f64,
    ratio: f64,
    g: &GridOverrides,
) -> Result<SweepSpec> {
    let values = linspace(1.0, 100.0, g.cooperativity_samples);
    let mut s = base(name, state, SweepAxis::Cooperativity, values, g)?;
    s.engine = Engine::Lindblad;
    s.fixed.delta = delta;
    s.fixed.hopping = hopping;
    s.fixed.n_bar = 0.1;
    s.fixed.gamma_over_kappa = Some(ratio);
    s.notes.push(format!(
        "kappa and gamma solved from C = g^2/(kappa gamma) at gamma/kappa = {ratio}; reservoir n_bar equals the initial n_bar"
    ));
    Ok(s)
}

fn temperature_curves(name: &str, state: S, g: &GridOverrides) -> Result<SweepSpec> {
    let mut s = base(name, state, SweepAxis::MeanPhotons, vec![0.1, 1.0, 5.0], g)?;
    s.fixed.hopping = 10.0;
    s.notes.push("representative n_bar curves 0.1, 1, 5".into());
    Ok(s)
}

/// Sweep specifications for a preset at the default resolution.
pub fn preset(name: &str) -> Result<Vec<SweepSpec>> {
    preset_with(name, &GridOverrides::default())
}

pub fn preset_with(name: &str, g: &GridOverrides) -> Result<Vec<SweepSpec>> {
    let specs = match name {
        "fig2" => vec![hopping_map("fig2", S::E1G2, 10.0, 1.0, g)?],
        "fig3" => {
            let values = linspace(0.0, 50.0, g.axis_samples);
            let mut s = base("fig3", S::E1G2, SweepAxis::Detuning, values, g)?;
            s.fixed.hopping = 25.0;
            s.fixed.n_bar = 1.0;
            s.notes.push("detuning axis 0..50 g at fixed J = 25 g".into());
            vec![s]
        }
        "fig4a" => {
            let mut s = hopping_map("fig4a", S::E1E2, 18.5, 0.1, g)?;
            s.notes
                .push("detuning 18.5 g, shared with the fig5 parameter set".into());
            vec![s]
        }
        "fig4b" => {
            let mut s = hopping_map("fig4b", S::G1G2, 18.5, 0.1, g)?;
            s.notes
                .push("detuning 18.5 g, shared with the fig5 parameter set".into());
            vec![s]
        }
        "fig4c" => {
            let mut s = hopping_map("fig4c", S::E1E2, 0.0, 0.1, g)?;
            s.g1_tracks_hopping = true;
            s.notes.push("g1 tracks J at every grid point, g2 = g".into());
            vec![s]
        }
        "fig5" => {
            let mut s = base("fig5", S::E1E2, SweepAxis::Hopping, vec![20.0], g)?;
            s.fixed.delta = 18.5;
            s.fixed.n_bar = 0.1;
            vec![s]
        }
        "fig6" => vec![hopping_map("fig6", S::BellPlus, 0.0, 0.1, g)?],
        "fig7a" => vec![temperature_curves("fig7a", S::E1G2, g)?],
        "fig7b" => vec![temperature_curves("fig7b", S::BellPlus, g)?],
        "fig8a" => vec![cooperativity_map("fig8a", S::E1G2, 0.0, 10.0, 0.1, g)?],
        "fig8b" => vec![cooperativity_map("fig8b", S::E1G2, 0.0, 10.0, 1.0, g)?],
        "fig8c" => vec![cooperativity_map("fig8c", S::BellPlus, 15.0, 5.0, 0.1, g)?],
        "fig8d" => vec![cooperativity_map("fig8d", S::BellPlus, 15.0, 5.0, 1.0, g)?],
        "fig4" | "fig7" | "fig8" => {
            let panels: &[&str] = match name {
                "fig4" => &["a", "b", "c"],
                "fig7" => &["a", "b"],
                _ => &["a", "b", "c", "d"],
            };
            let mut out = Vec::new();
            for p in panels {
                out.extend(preset_with(&format!("{name}{p}"), g)?);
            }
            out
        }
        "all" => {
            let mut out = Vec::new();
            for n in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"] {
                out.extend(preset_with(n, g)?);
            }
            out
        }
        other => return Err(Error::UnknownPreset(other.to_owned())),
    };
    Ok(specs)
}

/// Runs every panel of a preset, writing `<panel>.csv` and
/// `<panel>.meta.json` into `out_dir`. Returns the CSV paths.
pub fn run_figure(name: &str, out_dir: &Path, g: &GridOverrides, exec: Exec) -> Result<Vec<PathBuf>> {
    let specs = preset_with(name, g)?;
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::with_capacity(specs.len());
    for spec in &specs {
        let path = out_dir.join(format!("{}.csv", spec.name));
        log::info!("running {} ({} points)", spec.name, spec.axis_values.len());
        run_sweep_to(spec, &path, exec)?;
        paths.push(path);
    }
    Ok(paths)
}
