//! Scenario configuration: one TOML document with a section per module.

use analog_sqed::calibrate::{AncillaSpec, GaugeTarget};
use analog_sqed::charge::FockConfig;
use analog_sqed::CondensateSpec;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Dispersion,
    Kernels,
    Fock,
    Calibrate,
    Fit,
    FullReport,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Dispersion => "dispersion",
            ScenarioKind::Kernels => "kernels",
            ScenarioKind::Fock => "fock",
            ScenarioKind::Calibrate => "calibrate",
            ScenarioKind::Fit => "fit",
            ScenarioKind::FullReport => "full-report",
        }
    }
}

/// Sampling grids. Momenta are in units of `m c_s`, F/G wavevectors in units of
/// `m_V c_sV`, scan couplings in units of the first mode energy and locality
/// bandwidths in units of `m c_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub momentum_points: usize,
    pub momentum_min: f64,
    pub momentum_max: f64,
    pub alphas: Vec<f64>,
    pub fg_wavevectors: Vec<f64>,
    pub scan_lambdas: Vec<f64>,
    pub locality_bandwidths: Vec<f64>,
    /// Relative multiplicative noise applied to kernel samples in the jitter refits.
    pub jitter: f64,
    pub jitter_trials: usize,
}

impl Grids {
    /// Log-spaced momenta in units of `m c_s`.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.momentum_points;
        if n == 1 {
            return vec![self.momentum_min];
        }
        let (lo, hi) = (self.momentum_min.ln(), self.momentum_max.ln());
        (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Scenario run by `analog-sqed run`.
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub condensate: CondensateSpec,
    pub ancilla: AncillaSpec,
    pub gauge: GaugeTarget,
    pub fock: FockConfig,
    pub grids: Grids,
    pub output: OutputConfig,
}

/// The configuration shipped as `configs/default.toml`.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::from_toml(text, &e))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped default config parses")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}", render_parse(.line, .column, .field, .message))]
    Parse {
        line: Option<usize>,
        column: Option<usize>,
        /// Field named by the error, when the parser reports one.
        field: Option<String>,
        message: String,
    },
}

fn render_parse(
    line: &Option<usize>,
    column: &Option<usize>,
    field: &Option<String>,
    message: &str,
) -> String {
    let mut out = String::from("parse error");
    if let (Some(l), Some(c)) = (line, column) {
        out.push_str(&format!(" at line {l}, column {c}"));
    }
    if let Some(f) = field {
        out.push_str(&format!(" (field `{f}`)"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl ConfigError {
    fn from_toml(text: &str, e: &toml::de::Error) -> Self {
        let (line, column) = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                (Some(line), Some(column))
            }
            None => (None, None),
        };
        let message = e.message().trim().to_string();
        ConfigError::Parse {
            line,
            column,
            field: backticked(&message),
            message,
        }
    }
}

/// First backtick-quoted name in a serde message such as "missing field `density`".
fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ScenarioConfig::default_config();
        assert_eq!(ScenarioConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn missing_field_is_named() {
        let text = DEFAULT_CONFIG.replacen("density = 1.0\n", "", 1);
        match ScenarioConfig::parse(&text).unwrap_err() {
            ConfigError::Parse { field, line, .. } => {
                assert_eq!(field.as_deref(), Some("density"));
                assert!(line.is_some());
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let text = DEFAULT_CONFIG.replacen("density = 1.0\n", "density = 1.0\ndensty = 2.0\n", 1);
        let err = ScenarioConfig::parse(&text).unwrap_err();
        match &err {
            ConfigError::Parse { field, line, .. } => {
                assert_eq!(field.as_deref(), Some("densty"));
                let want = text.lines().position(|l| l.starts_with("densty")).unwrap() + 1;
                assert_eq!(*line, Some(want));
            }
            e => panic!("{e}"),
        }
        assert!(err.to_string().contains("line"));
    }
}
