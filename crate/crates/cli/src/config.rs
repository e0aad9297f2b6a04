//! Experiment configuration: JSON file, command-line overrides, validation.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use num_complex::Complex64;
use qwalk_core::spectral::PhiGrid;
use qwalk_core::walk::{InitialWalker, WalkSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::parse::{parse_coin_spec, parse_unitary_spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Initial walker state as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialConfig {
    /// `[site, re, im]` amplitudes.
    Pure(Vec<(i64, f64, f64)>),
    /// `[site, probability]` weights.
    Mixed(Vec<(i64, f64)>),
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Pure(vec![(0, 1.0, 0.0)])
    }
}

impl InitialConfig {
    pub fn to_walker(&self) -> InitialWalker {
        match self {
            InitialConfig::Pure(v) => InitialWalker::Pure(v.iter().map(|&(s, re, im)| (s, Complex64::new(re, im))).collect()),
            InitialConfig::Mixed(v) => InitialWalker::Mixed(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub k: u32,
    pub steps: usize,
    pub unitary: String,
    pub coin: String,
    pub initial: InitialConfig,
    pub margin: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            k: 2,
            steps: 10,
            unitary: format!("ry:{FRAC_PI_4}"),
            coin: "plus".into(),
            initial: InitialConfig::default(),
            margin: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: String,
    pub walk: WalkConfig,
    pub r: u32,
    pub tau: f64,
    pub chi: f64,
    pub gamma: f64,
    pub grid: usize,
    pub out: PathBuf,
    pub format: Format,
    pub suite: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: "simulate".into(),
            walk: WalkConfig::default(),
            r: 0,
            tau: FRAC_PI_4,
            chi: 0.0,
            gamma: 0.5,
            grid: qwalk_core::spectral::DEFAULT_GRID,
            out: PathBuf::from("qwalk_out"),
            format: Format::Csv,
            suite: "all".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Schema checks that do not depend on the selected mode's registry.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.walk.k == 0 || self.walk.k > 30 {
            return bad(format!("walk.k must be in 1..=30, got {}", self.walk.k));
        }
        if PhiGrid::new(self.grid).is_err() {
            return bad(format!("grid must be a power of two >= 64, got {}", self.grid));
        }
        for (name, v) in [("tau", self.tau), ("chi", self.chi), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.tau < 0.0 {
            return bad(format!("tau must be non-negative, got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must be in [0, 1], got {}", self.gamma));
        }
        parse_unitary_spec(&self.walk.unitary)?;
        parse_coin_spec(&self.walk.coin)?;
        self.walk.initial.to_walker().validate(1e-12).map_err(|e| CliError::Config(format!("walk.initial: {e}")))?;
        Ok(())
    }

    pub fn walk_spec(&self) -> Result<WalkSpec, CliError> {
        Ok(WalkSpec::new(self.walk.k, parse_unitary_spec(&self.walk.unitary)?, parse_coin_spec(&self.walk.coin)?)
            .with_initial(self.walk.initial.to_walker())
            .with_steps(self.walk.steps)
            .with_margin(self.walk.margin))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = c.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c = ExperimentConfig::from_json(r#"{"mode": "asymptotic", "walk": {"k": 3}}"#).unwrap();
        assert_eq!(c.walk.k, 3);
        assert_eq!(c.walk.coin, "plus");
        assert_eq!(c.grid, 4096);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"mode": "simulate", "colour": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"walk": {"kk": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"format": "xml"}"#).is_err());
    }

    #[test]
    fn initial_state_forms() {
        let c = ExperimentConfig::from_json(r#"{"walk": {"initial": {"mixed": [[-1, 0.5], [1, 0.5]]}}}"#).unwrap();
        assert_eq!(c.walk.initial, InitialConfig::Mixed(vec![(-1, 0.5), (1, 0.5)]));
        c.validate().unwrap();
        let bad = ExperimentConfig::from_json(r#"{"walk": {"initial": {"pure": [[0, 0.5, 0]]}}}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn validation() {
        let c = ExperimentConfig { grid: 100, ..Default::default() };
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.walk.unitary = "matrix:[[1,0],[1,0],[0,0],[1,0]]".into();
        assert!(c.validate().is_err());
        let c = ExperimentConfig { gamma: 2.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
