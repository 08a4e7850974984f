//! Sweep configuration.
//!
//! A config file is flat `key = value` text (a TOML subset), one key per
//! line, `#` starts a comment:
//!
//! ```text
//! theorem = 5          # 1..=5
//! k_start = 40
//! k_end = 40           # defaults to k_start
//! k_step = 2
//! levels = [2, 3, 5, 6]
//! m_max = 20           # theorems 3 and 4 only
//! epsilon = 0.25       # theorems 3 and 4 only
//! window_slack = 4     # theorems 3 and 4 only
//! precision = 128
//! max_precision = 1024
//! target_radius = 1e-30
//! max_truncation = 5000  # cap on the c-sum, default from a work budget
//! out = "report.csv"
//! format = "csv"       # csv | json, defaults from the `out` extension
//! ```
//!
//! Command-line flags are parsed into the same [`ConfigFile`] shape and
//! override file values key by key.

use std::fmt;
use std::path::{Path, PathBuf};

use poincare_core::poincare::{
    Theorem, DEFAULT_MAX_PRECISION, DEFAULT_PRECISION, DEFAULT_TARGET_RADIUS, DEFAULT_WINDOW_SLACK,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Every key optional; both the file and the flags parse into this.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub theorem: Option<u8>,
    pub k_start: Option<u32>,
    pub k_end: Option<u32>,
    pub k_step: Option<u32>,
    pub levels: Option<Vec<u64>>,
    pub m_max: Option<u64>,
    pub epsilon: Option<f64>,
    pub window_slack: Option<u64>,
    pub precision: Option<u32>,
    pub max_precision: Option<u32>,
    pub target_radius: Option<f64>,
    pub max_truncation: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Keys set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: ConfigFile) -> ConfigFile {
        ConfigFile {
            theorem: overrides.theorem.or(self.theorem),
            k_start: overrides.k_start.or(self.k_start),
            k_end: overrides.k_end.or(self.k_end),
            k_step: overrides.k_step.or(self.k_step),
            levels: overrides.levels.or(self.levels),
            m_max: overrides.m_max.or(self.m_max),
            epsilon: overrides.epsilon.or(self.epsilon),
            window_slack: overrides.window_slack.or(self.window_slack),
            precision: overrides.precision.or(self.precision),
            max_precision: overrides.max_precision.or(self.max_precision),
            target_radius: overrides.target_radius.or(self.target_radius),
            max_truncation: overrides.max_truncation.or(self.max_truncation),
            out: overrides.out.or(self.out),
            format: overrides.format.or(self.format),
        }
    }

    pub fn resolve(self) -> Result<SweepConfig, ConfigError> {
        let theorem_id = self.theorem.ok_or_else(|| field("theorem", "missing"))?;
        let theorem = Theorem::from_id(theorem_id).map_err(|e| field("theorem", e.to_string()))?;

        let k_start = self.k_start.ok_or_else(|| field("k_start", "missing"))?;
        let k_end = self.k_end.unwrap_or(k_start);
        let k_step = self.k_step.unwrap_or(2);
        if k_start < 4 || k_start % 2 != 0 {
            return Err(field(
                "k_start",
                format!("{k_start} is not an even weight >= 4"),
            ));
        }
        if k_end < k_start || k_end % 2 != 0 {
            return Err(field(
                "k_end",
                format!("{k_end} must be even and >= k_start"),
            ));
        }
        if k_step == 0 || k_step % 2 != 0 {
            return Err(field(
                "k_step",
                format!("{k_step} must be even and positive"),
            ));
        }

        let levels = match (self.levels, theorem) {
            (Some(l), _) => l,
            (None, Theorem::LevelOne) => vec![1],
            (None, _) => return Err(field("levels", "missing")),
        };
        if levels.is_empty() {
            return Err(field("levels", "empty list"));
        }
        for &n in &levels {
            theorem
                .check_level(n)
                .map_err(|e| field("levels", e.to_string()))?;
        }

        let bound_theorem = !theorem.has_explicit_range();
        let epsilon = self.epsilon;
        let m_max = self.m_max;
        let window_slack = self.window_slack.unwrap_or(DEFAULT_WINDOW_SLACK);
        if bound_theorem {
            match epsilon {
                Some(e) if e > 0.0 && e.is_finite() => {}
                Some(e) => return Err(field("epsilon", format!("{e} must be positive"))),
                None => return Err(field("epsilon", "required for theorems 3 and 4")),
            }
            if m_max == Some(0) {
                return Err(field("m_max", "must be >= 1"));
            }
            if window_slack == 0 {
                return Err(field("window_slack", "must be >= 1"));
            }
        }

        let precision = self.precision.unwrap_or(DEFAULT_PRECISION);
        let max_precision = self
            .max_precision
            .unwrap_or(DEFAULT_MAX_PRECISION.max(precision));
        if precision < 53 {
            return Err(field("precision", format!("{precision} bits is below 53")));
        }
        if max_precision < precision {
            return Err(field("max_precision", "must be >= precision"));
        }
        let target_radius = self.target_radius.unwrap_or(DEFAULT_TARGET_RADIUS);
        if !(target_radius > 0.0 && target_radius.is_finite()) {
            return Err(field("target_radius", "must be a positive number"));
        }

        if self.max_truncation == Some(0) {
            return Err(field("max_truncation", "must be >= 1"));
        }

        let format = self
            .format
            .or_else(|| self.out.as_deref().and_then(Format::from_path))
            .unwrap_or(Format::Csv);

        Ok(SweepConfig {
            theorem: theorem_id,
            k_start,
            k_end,
            k_step,
            levels,
            m_max: if bound_theorem {
                Some(m_max.unwrap_or(1))
            } else {
                None
            },
            epsilon: if bound_theorem { epsilon } else { None },
            window_slack: if bound_theorem {
                Some(window_slack)
            } else {
                None
            },
            precision,
            max_precision,
            target_radius,
            max_truncation: self.max_truncation,
            out: self.out,
            format,
        })
    }
}

/// A validated sweep over weights, levels and admissible `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub theorem: u8,
    pub k_start: u32,
    pub k_end: u32,
    pub k_step: u32,
    pub levels: Vec<u64>,
    pub m_max: Option<u64>,
    pub epsilon: Option<f64>,
    pub window_slack: Option<u64>,
    pub precision: u32,
    pub max_precision: u32,
    pub target_radius: f64,
    pub max_truncation: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn theorem(&self) -> Theorem {
        Theorem::from_id(self.theorem).expect("validated on construction")
    }

    pub fn weights(&self) -> impl Iterator<Item = u32> {
        (self.k_start..=self.k_end).step_by(self.k_step as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let text = "theorem = 5\nk_start = 40\nlevels = [2, 3] # two levels\nout = \"r.json\"\n";
        let cfg = ConfigFile::parse(text).unwrap().resolve().unwrap();
        assert_eq!(cfg.theorem, 5);
        assert_eq!(cfg.k_end, 40);
        assert_eq!(cfg.levels, vec![2, 3]);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.precision, 128);
        assert_eq!(cfg.m_max, None);
    }

    #[test]
    fn flags_override_file() {
        let file =
            ConfigFile::parse("theorem = 1\nk_start = 16\nk_end = 60\nprecision = 96\n").unwrap();
        let flags = ConfigFile {
            k_end: Some(20),
            format: Some(Format::Json),
            ..Default::default()
        };
        let cfg = file.merge(flags).resolve().unwrap();
        assert_eq!(cfg.weights().collect::<Vec<_>>(), vec![16, 18, 20]);
        assert_eq!(cfg.precision, 96);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.levels, vec![1]);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let err = ConfigFile::parse("theorem = 1\nk_strat = 16\n").unwrap_err();
        assert!(err.to_string().contains("k_strat"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");

        let bad = |text: &str, name: &str| {
            let err = ConfigFile::parse(text).unwrap().resolve().unwrap_err();
            assert!(
                matches!(err, ConfigError::Field { field, .. } if field == name),
                "{err}"
            );
        };
        bad("k_start = 16", "theorem");
        bad("theorem = 7\nk_start = 16", "theorem");
        bad("theorem = 1\nk_start = 15", "k_start");
        bad("theorem = 1\nk_start = 16\nk_step = 3", "k_step");
        bad("theorem = 2\nk_start = 16\nlevels = [4]", "levels");
        bad("theorem = 5\nk_start = 16", "levels");
        bad("theorem = 3\nk_start = 16\nlevels = [5]", "epsilon");
        bad("theorem = 1\nk_start = 16\nprecision = 8", "precision");
    }
}
