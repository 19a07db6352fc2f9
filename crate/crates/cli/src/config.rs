//! Run configuration: an optional defaults file, an optional config file, then
//! command-line flags, each overriding the previous layer.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use modeweaver::circuit::Circuit;
use modeweaver::experiments::{linear_grid, HomDipConfig, HomPeakConfig, NoonConfig};
use modeweaver::wgmodes::{ModeId, CORE_HEIGHT_NM, MULTIMODE_WIDTH_NM};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const DEFAULTS_ENV: &str = "MODEWEAVER_DEFAULTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Either `start:stop:step` (inclusive) or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range(String),
    List(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let values = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(s) => parse_grid_text(s)?,
        };
        if values.is_empty() {
            return Err(format!("empty sweep `{}`", self.label()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite value in `{}`", self.label()));
        }
        Ok(values)
    }

    fn label(&self) -> String {
        match self {
            Grid::Range(s) => s.clone(),
            Grid::List(v) => format!("{v:?}"),
        }
    }
}

fn parse_grid_text(s: &str) -> Result<Vec<f64>, String> {
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) {
                return Err(format!("step of `{s}` must be positive"));
            }
            Ok(linear_grid(start, stop, step))
        }
        [list] => list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(number)
            .collect(),
        _ => Err(format!("`{s}` is neither start:stop:step nor a comma list")),
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_grid_text(s)?;
        Ok(Grid::Range(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    /// nm, held fixed during a height sweep
    pub width: f64,
    /// nm, held fixed during a width sweep
    pub height: f64,
    /// nm
    pub widths: Option<Grid>,
    /// nm
    pub heights: Option<Grid>,
    pub modes: Vec<ModeId>,
    pub n_core: Option<f64>,
    pub n_clad: Option<f64>,
    /// nm
    pub wavelength: Option<f64>,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            width: MULTIMODE_WIDTH_NM,
            height: CORE_HEIGHT_NM,
            widths: None,
            heights: None,
            modes: vec![ModeId::te(0), ModeId::te(1), ModeId::te(2)],
            n_core: None,
            n_clad: None,
            wavelength: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GratingConfig {
    /// nm
    pub width: f64,
    /// nm
    pub height: f64,
    pub modes: (ModeId, ModeId),
    /// nm
    pub depth: f64,
    pub periods: u32,
    /// rad per period; scaled from depth when absent
    pub kappa: Option<f64>,
    pub n_core: Option<f64>,
    pub n_clad: Option<f64>,
    /// nm
    pub wavelength: Option<f64>,
}

impl Default for GratingConfig {
    fn default() -> Self {
        Self {
            width: MULTIMODE_WIDTH_NM,
            height: CORE_HEIGHT_NM,
            modes: (ModeId::te(0), ModeId::te(2)),
            depth: modeweaver::coupling::REFERENCE_DEPTH_NM,
            periods: modeweaver::coupling::DEFAULT_PERIODS,
            kappa: None,
            n_core: None,
            n_clad: None,
            wavelength: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingConfig {
    /// rad per period
    pub kappa: f64,
    pub periods: Grid,
    pub overlap: f64,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        Self {
            kappa: modeweaver::coupling::DEFAULT_KAPPA_PER_PERIOD,
            periods: Grid::Range("0:40:1".into()),
            overlap: 0.92,
        }
    }
}

/// Complex matrix as separate real and imaginary row lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub unitary: Option<MatrixSpec>,
    pub circuit: Option<Circuit>,
    /// W, applied to heater phase shifters when compiling `circuit`
    pub heater_power: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub poisson: bool,
    pub format: Option<Format>,
    pub dispersion: DispersionConfig,
    pub design_grating: GratingConfig,
    pub splitting: SplittingConfig,
    pub hom_scan: HomDipConfig,
    pub hom_peak: HomPeakConfig,
    pub noon_scan: NoonConfig,
    pub decompose: DecomposeConfig,
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(base), Value::Object(over)) => {
            for (key, value) in over {
                match base.get_mut(&key) {
                    Some(slot) => merge(slot, value),
                    None => {
                        base.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

/// Layers built-in defaults, then the defaults file (if any), then the config file (if any).
pub fn load(defaults: Option<&Path>, config: Option<&Path>) -> Result<RunConfig, CliError> {
    let mut tree =
        serde_json::to_value(RunConfig::default()).map_err(|e| CliError::Config(e.to_string()))?;
    for path in [defaults, config].into_iter().flatten() {
        merge(&mut tree, read_json(path)?);
    }
    serde_json::from_value(tree).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            Grid::Range("0:1:0.5".into()).values().unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(Grid::Range("3,1".into()).values().unwrap(), vec![3.0, 1.0]);
        assert!(Grid::Range("2000:400:25".into())
            .values()
            .unwrap_err()
            .contains("empty sweep"));
        assert!("1:2".parse::<Grid>().is_err());
        assert!("a:2:1".parse::<Grid>().is_err());
    }

    #[test]
    fn later_layers_win() {
        let mut base = serde_json::json!({"hom_scan": {"eta": 0.5, "num_periods": 20}});
        merge(&mut base, serde_json::json!({"hom_scan": {"eta": 0.6}}));
        assert_eq!(
            base,
            serde_json::json!({"hom_scan": {"eta": 0.6, "num_periods": 20}})
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let value = serde_json::json!({"hom_scan": {"etaa": 0.5}});
        assert!(serde_json::from_value::<RunConfig>(value).is_err());
        let value = serde_json::json!({"dispersion": {"widths": "400:800:100", "n_core": 2.0}});
        let cfg: RunConfig = serde_json::from_value(value).unwrap();
        assert_eq!(cfg.dispersion.n_core, Some(2.0));
    }

    #[test]
    fn partial_nested_sections_keep_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"hom_scan": {"source": {"intrinsic_overlap": 0.95}}}"#,
        )
        .unwrap();
        let cfg = load(None, Some(&path)).unwrap();
        let d = RunConfig::default();
        assert_eq!(cfg.hom_scan.source.intrinsic_overlap, 0.95);
        assert_eq!(cfg.hom_scan.source.pair_rate, d.hom_scan.source.pair_rate);
        assert_eq!(cfg.hom_scan.eta, d.hom_scan.eta);
    }
}
