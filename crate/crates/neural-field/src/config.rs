//! Run configuration: one JSON document drives the command-line tool, the
//! examples, and the end-to-end reproduction pipeline.
//!
//! Every section has defaults matching the worked single-term parameter set
//! (`alpha = 1, tau0 = 1, gamma = 4, a = b = 1, xi = 2, c_hat = -3.27`), so an
//! empty object `{}` is a complete, runnable configuration.

use crate::hopf::{HopfSettings, LyapunovSettings};
use crate::model::{ModelError, ModelParams, Point2};
use crate::sim::{HistoryInit, SimConfig};
use crate::spectrum::{ScanSettings, Window};
use crate::characteristic::Parity;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    /// `serde_json` messages already carry line/column context.
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

/// Quadrature node counts per axis: `n_apply` for operator application and
/// scans, `n_check` for residual checks that must dominate every other error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub n_apply: usize,
    pub n_check: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_apply: 32,
            n_check: 64,
        }
    }
}

/// Window-scan section of the configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumSection {
    pub window: Window,
    pub settings: ScanSettings,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            window: Window {
                re_min: -2.0,
                re_max: 0.5,
                im_min: -4.0,
                im_max: 4.0,
            },
            settings: ScanSettings::default(),
        }
    }
}

/// Bifurcation-search section: the strength range to sweep and the branch
/// seed at the strong end.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct HopfSection {
    pub c_hat_lo: f64,
    pub c_hat_hi: f64,
    pub seed_z: Complex64,
    pub seed_rho: Complex64,
    pub seed_nu: Complex64,
    pub parity_x: Parity,
    pub parity_y: Parity,
    pub settings: HopfSettings,
}

impl Default for HopfSection {
    fn default() -> Self {
        HopfSection {
            c_hat_lo: -4.0,
            c_hat_hi: -2.5,
            seed_z: Complex64::new(0.0, 1.3),
            seed_rho: Complex64::new(-0.2, 1.1),
            seed_nu: Complex64::new(-0.2, 1.1),
            parity_x: Parity::Even,
            parity_y: Parity::Even,
            settings: HopfSettings::default(),
        }
    }
}

fn default_sim() -> SimConfig {
    SimConfig {
        n_grid: 8,
        dt: 0.1,
        t_end: 80.0,
        history: HistoryInit::Eigenmode {
            amplitude: 0.01,
            rho: Complex64::new(-0.17, 1.15),
            nu: Complex64::new(-0.17, 1.15),
        },
        probes: vec![Point2::new(0.0, 0.0)],
        snapshot_stride: 0,
        max_amplitude: None,
    }
}

fn default_output_dir() -> String {
    "out".into()
}

/// Complete run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub model: ModelParams,
    pub quadrature: QuadratureConfig,
    pub spectrum: SpectrumSection,
    pub hopf: HopfSection,
    pub lyapunov: LyapunovSettings,
    pub simulate: SimConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: crate::model::reference_params(-3.27),
            quadrature: QuadratureConfig::default(),
            spectrum: SpectrumSection::default(),
            hopf: HopfSection::default(),
            lyapunov: LyapunovSettings::default(),
            simulate: default_sim(),
            output_dir: default_output_dir(),
        }
    }
}

impl RunConfig {
    /// Parses a JSON document and validates the model section.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.model.validate(true)?;
        Ok(config)
    }

    /// Reads and parses a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_yields_the_reference_setup() {
        let config = RunConfig::from_json("{}").unwrap();
        assert_eq!(config.model.alpha, 1.0);
        assert_eq!(config.model.terms[0].c_hat, Complex64::new(-3.27, 0.0));
        assert_eq!(config.quadrature.n_apply, 32);
        assert_eq!(config.lyapunov.epsilon, 0.01);
        assert_eq!(config.lyapunov.n_z, 32);
        assert_eq!(config.lyapunov.n_x, 3);
        assert_eq!(config.hopf.c_hat_lo, -4.0);
        assert_eq!(config.simulate.n_grid, 8);
    }

    #[test]
    fn round_trips_bit_identically_through_json() {
        let config = RunConfig::default();
        let text = config.to_json_pretty();
        let reparsed = RunConfig::from_json(&text).unwrap();
        assert_eq!(text, reparsed.to_json_pretty());
        // And as a value tree, not just as text.
        let v1: serde_json::Value = serde_json::from_str(&text).unwrap();
        let v2: serde_json::Value = serde_json::from_str(&reparsed.to_json_pretty()).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn partial_sections_override_only_their_fields() {
        let config = RunConfig::from_json(
            r#"{"lyapunov": {"epsilon": 0.005, "n_z": 64, "n_x": 3, "n_y": 3},
                "hopf": {"c_hat_lo": -3.9}}"#,
        )
        .unwrap();
        assert_eq!(config.lyapunov.epsilon, 0.005);
        assert_eq!(config.lyapunov.n_z, 64);
        assert_eq!(config.hopf.c_hat_lo, -3.9);
        assert_eq!(config.hopf.c_hat_hi, -2.5, "untouched field keeps default");
    }

    #[test]
    fn parse_errors_carry_line_context_and_bad_models_are_rejected() {
        let err = RunConfig::from_json("{\n  \"model\": ,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "got: {err}");
        let err = RunConfig::from_json(r#"{"model": {"alpha": -1.0}}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_) | ConfigError::Model(_)));
    }
}
