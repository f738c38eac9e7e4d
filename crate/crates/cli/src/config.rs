//! Run configuration files.
//!
//! A config is a flat JSON object; every key is optional and mirrors a command
//! line flag. Values resolve as command line, then file, then built-in default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Option<String>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub omega: Option<f64>,
    pub omega0: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub t2: Option<f64>,
    pub offset: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,

    pub oracle: Option<String>,
    pub truncate_at: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n_points: Option<usize>,
    pub dt: Option<f64>,
    pub dump: Option<PathBuf>,

    pub n_omega2: Option<usize>,
    pub n_t2: Option<usize>,
    pub gnuplot: Option<PathBuf>,

    pub points: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,

    pub mass: Option<f64>,
    pub mass_unit: Option<String>,
    pub freq: Option<f64>,
    pub freq_unit: Option<String>,
    pub angular: Option<bool>,
    pub distance: Option<f64>,
    pub distance_unit: Option<String>,
    pub target_d: Option<f64>,

    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub quiet: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("bad config: {e}")))
    }
}

/// First present value of command line then file, else the default.
pub fn pick<T>(cli: Option<T>, file: Option<T>, default: T) -> T {
    cli.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c = RunConfig::parse(r#"{"kind": "bbb", "D": 6, "R": 4.5, "n_omega2": 10}"#).unwrap();
        assert_eq!(c.kind.as_deref(), Some("bbb"));
        assert_eq!((c.d, c.r, c.n_omega2), (Some(6.0), Some(4.5), Some(10)));
    }

    #[test]
    fn rejects_unknown_and_mistyped_keys() {
        assert!(RunConfig::parse(r#"{"radius": 3}"#).is_err());
        assert!(RunConfig::parse(r#"{"D": "six"}"#).is_err());
        assert!(RunConfig::parse("not json").is_err());
    }

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
    }
}
