use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Engine, FixedParams, SweepAxis, SweepSpec, DEFAULT_MIN_RETAINED_MASS};
use crate::error::{Error, Result};
use crate::evolution::TimeGrid;
use crate::states::AtomicInitialState;

/// Flat TOML description of a sweep. Without `sweep_axis` the file
/// describes a single parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub initial_state: AtomicInitialState,
    #[serde(default)]
    pub delta_over_g: f64,
    #[serde(default, rename = "J_over_g")]
    pub j_over_g: f64,
    #[serde(default)]
    pub n_bar: f64,
    #[serde(default = "one")]
    pub g1_over_g: f64,
    #[serde(default = "one")]
    pub g2_over_g: f64,
    #[serde(default)]
    pub kappa_over_g: f64,
    #[serde(default)]
    pub gamma_over_g: f64,
    #[serde(default)]
    pub cutoff_override: Option<u32>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_t_samples")]
    pub t_samples: usize,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default)]
    pub output: Option<PathBuf>,

    /// One of `J_over_g`, `delta_over_g`, `n_bar`, `cooperativity`.
    #[serde(default)]
    pub sweep_axis: Option<String>,
    #[serde(default)]
    pub axis_min: Option<f64>,
    #[serde(default)]
    pub axis_max: Option<f64>,
    #[serde(default)]
    pub axis_samples: Option<usize>,
    #[serde(default)]
    pub gamma_over_kappa: Option<f64>,
    #[serde(default, rename = "g1_tracks_J")]
    pub g1_tracks_j: bool,
    #[serde(default)]
    pub min_retained_mass: Option<f64>,
    #[serde(default)]
    pub name: Option<String>,
}

fn one() -> f64 {
    1.0
}

fn default_t_max() -> f64 {
    50.0
}

fn default_t_samples() -> usize {
    500
}

fn default_engine() -> Engine {
    Engine::Unitary
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn into_spec(self) -> Result<SweepSpec> {
        let axis = match &self.sweep_axis {
            Some(a) => SweepAxis::from_column(a)?,
            None => SweepAxis::Hopping,
        };
        let axis_values = match self.sweep_axis {
            None => {
                if self.axis_min.is_some() || self.axis_max.is_some() || self.axis_samples.is_some() {
                    return Err(Error::Config("axis bounds given without sweep_axis".into()));
                }
                vec![self.j_over_g]
            }
            Some(_) => {
                let lo = self.axis_min.ok_or_else(|| Error::Config("missing axis_min".into()))?;
                let hi = self.axis_max.ok_or_else(|| Error::Config("missing axis_max".into()))?;
                let n = self
                    .axis_samples
                    .ok_or_else(|| Error::Config("missing axis_samples".into()))?;
                match n {
                    0 => return Err(Error::Config("axis_samples must be positive".into())),
                    1 => vec![lo],
                    _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
                }
            }
        };
        let spec = SweepSpec {
            name: self.name.unwrap_or_else(|| "sweep".into()),
            initial_state: self.initial_state,
            axis,
            axis_values,
            times: TimeGrid::linspace(self.t_max, self.t_samples)?,
            fixed: FixedParams {
                delta: self.delta_over_g,
                hopping: self.j_over_g,
                n_bar: self.n_bar,
                g1: self.g1_over_g,
                g2: self.g2_over_g,
                kappa: self.kappa_over_g,
                gamma: self.gamma_over_g,
                gamma_over_kappa: self.gamma_over_kappa,
            },
            g1_tracks_hopping: self.g1_tracks_j,
            engine: self.engine,
            cutoff_override: self.cutoff_override,
            min_retained_mass: self.min_retained_mass.unwrap_or(DEFAULT_MIN_RETAINED_MASS),
            output: self.output,
            notes: vec![],
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_config() {
        let cfg = SweepConfig::from_toml(
            r#"
initial_state = "e1g2"
delta_over_g = 0.0
J_over_g = 25.0
n_bar = 0.1
t_max = 10.0
t_samples = 11
"#,
        )
        .unwrap();
        let spec = cfg.into_spec().unwrap();
        assert_eq!(spec.axis_values, vec![25.0]);
        assert_eq!(spec.times.len(), 11);
        assert_eq!(spec.engine, Engine::Unitary);
        assert_eq!(spec.fixed.g1, 1.0);
    }

    #[test]
    fn axis_config() {
        let cfg = SweepConfig::from_toml(
            r#"
initial_state = "bell_plus"
engine = "lindblad"
sweep_axis = "cooperativity"
axis_min = 1.0
axis_max = 10.0
axis_samples = 4
gamma_over_kappa = 0.1
J_over_g = 10.0
"#,
        )
        .unwrap();
        let spec = cfg.into_spec().unwrap();
        assert_eq!(spec.axis, SweepAxis::Cooperativity);
        assert_eq!(spec.axis_values, vec![1.0, 4.0, 7.0, 10.0]);
    }

    #[test]
    fn malformed_configs() {
        assert!(SweepConfig::from_toml("initial_state = \"e1g2\"\nbogus = 1").is_err());
        assert!(SweepConfig::from_toml("initial_state = \"nope\"").is_err());
        let cfg = SweepConfig::from_toml("initial_state = \"e1g2\"\nkappa_over_g = 0.5").unwrap();
        assert!(cfg.into_spec().is_err());
        let cfg = SweepConfig::from_toml("initial_state = \"e1g2\"\nsweep_axis = \"n_bar\"").unwrap();
        assert!(matches!(cfg.into_spec(), Err(Error::Config(_))));
    }
}
