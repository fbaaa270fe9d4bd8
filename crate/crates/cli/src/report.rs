//! JSON run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    /// `"1"` for dimensionless values.
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, Quantity>,
    /// Non-numeric results such as flags and file names.
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            notes: BTreeMap::new(),
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    pub fn inputs_from(&mut self, entries: BTreeMap<String, String>) {
        self.inputs.extend(entries);
    }

    pub fn output(&mut self, key: &str, value: f64, unit: &str) {
        self.outputs.insert(
            key.to_string(),
            Quantity {
                value,
                unit: unit.to_string(),
                sigma: None,
            },
        );
    }

    pub fn output_with_sigma(&mut self, key: &str, value: f64, sigma: f64, unit: &str) {
        self.outputs.insert(
            key.to_string(),
            Quantity {
                value,
                unit: unit.to_string(),
                sigma: Some(sigma),
            },
        );
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.insert(key.to_string(), value.to_string());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// JSON text. Non-finite outputs cannot be represented and are refused.
    pub fn to_json(&self) -> Result<String, CliError> {
        for (k, q) in &self.outputs {
            if !q.value.is_finite() || q.sigma.is_some_and(|s| !s.is_finite()) {
                return Err(CliError::Numerical(format!("output '{k}' is not finite")));
            }
        }
        serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Numerical(format!("cannot serialise report: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_json() {
        let mut r = RunReport::new("finesse-fit");
        r.input("data", "scan.csv");
        r.output_with_sigma("n_imag", 1.970_000_000_000_1e-6, 3.3e-10, "1");
        r.output("roughness", 2.87e-10, "m");
        r.note("weighted", false);
        r.warn("something");
        let text = r.to_json().unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn refuses_non_finite_outputs() {
        let mut r = RunReport::new("x");
        r.output("bad", f64::NAN, "1");
        assert!(r.to_json().is_err());
    }
}
