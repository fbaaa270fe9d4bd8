//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. All
//! physical values are SI; the unit is part of the key name.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    source: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Every key the tool understands. Anything else is reported as a warning.
pub const KNOWN_KEYS: &[&str] = &[
    "membrane.radius_m",
    "membrane.thickness_m",
    "membrane.density_kg_m3",
    "membrane.stress_pa",
    "slab.n_real",
    "slab.n_imag",
    "slab.thickness_m",
    "slab.roughness_m",
    "cavity.length_m",
    "cavity.wavelength_m",
    "cavity.empty_finesse",
    "thermal.temperature_k",
    "readout.width_m",
    "psd.floor_m2_per_hz",
    "ringdown.frequency_hz",
    "fit.max_iterations",
    "fit.gradient_tol",
    "fit.step_tol",
    "fit.initial_damping",
    "fit.n_imag_guess",
    "fit.roughness_guess_m",
    "fit.parameterisation",
];

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{source}:{line}: expected key=value, got '{content}'"
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(CliError::Config(format!(
                    "{source}:{line}: invalid key '{key}'"
                )));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!(
                    "{source}:{line}: key '{key}' has no value"
                )));
            }
            let entry = Entry {
                value: value.to_string(),
                line,
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(CliError::Config(format!(
                    "{source}:{line}: key '{key}' already set on line {}",
                    prev.line
                )));
            }
        }
        Ok(Config {
            entries,
            source: source.to_string(),
        })
    }

    pub fn unknown_keys(&self) -> Vec<String> {
        self.entries
            .keys()
            .filter(|k| !KNOWN_KEYS.contains(&k.as_str()))
            .cloned()
            .collect()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        match entry.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(CliError::Config(format!(
                "{}:{}: key '{key}': '{}' is not a finite number",
                self.source, entry.line, entry.value
            ))),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.get_f64(key)?.ok_or_else(|| {
            CliError::Config(format!("{}: missing required key '{key}'", self.source))
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(default);
        };
        entry.value.parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "{}:{}: key '{key}': '{}' is not a non-negative integer",
                self.source, entry.line, entry.value
            ))
        })
    }

    /// Location of a key for diagnostics, e.g. `run.cfg:4`.
    pub fn locate(&self, key: &str) -> String {
        match self.entries.get(key) {
            Some(e) => format!("{}:{}", self.source, e.line),
            None => self.source.clone(),
        }
    }

    /// All entries, for echoing into reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect()
    }
}
