use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{PointSummary, SweepAxis, SweepSpec};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub axis: f64,
    pub gt: f64,
    pub concurrence: f64,
    pub inversion: f64,
    pub mean_photon_1: f64,
    pub mean_photon_2: f64,
    pub retained_thermal_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub axis: SweepAxis,
    pub rows: Vec<Row>,
    pub points: Vec<PointSummary>,
}

/// 12 significant digits in scientific notation; `-0` prints as `0`.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

impl ResultTable {
    pub fn header(&self) -> String {
        format!(
            "{},gt,concurrence,inversion,mean_photon_1,mean_photon_2,retained_thermal_mass",
            self.axis.column()
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 120);
        out.push_str(&self.header());
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.axis,
                r.gt,
                r.concurrence,
                r.inversion,
                r.mean_photon_1,
                r.mean_photon_2,
                r.retained_thermal_mass,
            ];
            for (i, v) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", format_float(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub(crate) fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

#[derive(Serialize)]
struct Metadata<'a> {
    generator: &'static str,
    version: &'static str,
    spec: &'a SweepSpec,
    points: &'a [PointSummary],
    columns: Vec<String>,
}

pub(crate) fn write_metadata(spec: &SweepSpec, table: &ResultTable, path: &Path) -> Result<()> {
    let header = table.header();
    let meta = Metadata {
        generator: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec,
        points: &table.points,
        columns: header.split(',').map(str::to_owned).collect(),
    };
    let mut text = serde_json::to_string_pretty(&meta).map_err(|e| crate::error::Error::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
