//! Scenario configuration: a TOML document with one table per command plus
//! either a named preset or explicit parameters. Command-line flags override
//! file values; the fully resolved configuration is embedded in every
//! artifact for reproducibility.

use flocstat_core::model::BioParams;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// One of `line1`, `line2`, `line3`, `line5`; mutually exclusive with
    /// explicit `[params]`.
    pub preset: Option<String>,
    pub params: Option<BioParams>,
    pub steady_states: Option<SteadyStatesConfig>,
    pub simulate: Option<SimulateConfig>,
    pub bifurcation: Option<BifurcationConfig>,
    pub operating_diagram: Option<OperatingDiagramConfig>,
    pub special_points: Option<SpecialPointsConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyStatesConfig {
    pub s_in: Option<f64>,
    pub d: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub s_in: Option<f64>,
    pub d: Option<f64>,
    pub init: Option<[f64; 3]>,
    pub t_end: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationConfig {
    pub d: Option<f64>,
    pub s_in: Option<[f64; 2]>,
    pub cycles: Option<bool>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingDiagramConfig {
    pub s_in: Option<[f64; 2]>,
    pub d: Option<[f64; 2]>,
    pub grid: Option<[usize; 2]>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialPointsConfig {
    pub d: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub pairs: Option<Vec<[f64; 2]>>,
    pub s_in: Option<[f64; 2]>,
    pub d: Option<[f64; 2]>,
    pub grid: Option<[usize; 2]>,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| format!("malformed configuration: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.preset.is_some() && self.params.is_some() {
            return Err("preset and [params] are mutually exclusive".into());
        }
        if let Some(name) = &self.preset {
            if BioParams::preset(name).is_none() {
                return Err(format!(
                    "unknown preset {name:?}; expected one of {:?}",
                    BioParams::PRESET_NAMES
                ));
            }
        }
        if let Some(p) = &self.params {
            p.validate().map_err(|e| e.to_string())?;
        }
        if let Some(sim) = &self.simulate {
            for (label, value) in [("abs_tol", sim.abs_tol), ("rel_tol", sim.rel_tol)] {
                if let Some(v) = value {
                    if !(v > 0.0) {
                        return Err(format!("simulate.{label} must be positive, got {v}"));
                    }
                }
            }
            if let Some(t) = sim.t_end {
                if !(t > 0.0) {
                    return Err(format!("simulate.t_end must be positive, got {t}"));
                }
            }
        }
        let ranges = [
            ("bifurcation.s_in", self.bifurcation.as_ref().and_then(|c| c.s_in)),
            (
                "operating_diagram.s_in",
                self.operating_diagram.as_ref().and_then(|c| c.s_in),
            ),
            (
                "operating_diagram.d",
                self.operating_diagram.as_ref().and_then(|c| c.d),
            ),
            ("special_points.d", self.special_points.as_ref().and_then(|c| c.d)),
            ("sweep.s_in", self.sweep.as_ref().and_then(|c| c.s_in)),
            ("sweep.d", self.sweep.as_ref().and_then(|c| c.d)),
        ];
        for (label, range) in ranges {
            if let Some([lo, hi]) = range {
                if !(hi > lo) {
                    return Err(format!("{label} range must have lo < hi, got [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }

    /// Expands the preset (or explicit parameters) into concrete values.
    pub fn resolve_params(&self) -> Result<BioParams, String> {
        match (&self.preset, &self.params) {
            (Some(name), None) => Ok(BioParams::preset(name).expect("validated preset")),
            (None, Some(p)) => Ok(*p),
            (None, None) => Err("either a preset or [params] is required".into()),
            (Some(_), Some(_)) => Err("preset and [params] are mutually exclusive".into()),
        }
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
