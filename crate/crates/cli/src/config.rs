use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Overrides `output_dir` from the config file.
pub const OUTPUT_DIR_ENV: &str = "QPULSE_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    /// Parameters are already in the simulator's units (`ħ = 1`, angular rates).
    #[serde(rename = "dimensionless")]
    Dimensionless,
    /// Frequencies in MHz, times in ns.
    #[serde(rename = "MHz-ns")]
    MhzNs,
}

impl std::fmt::Display for Units {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Units::Dimensionless => "dimensionless",
            Units::MhzNs => "MHz-ns",
        })
    }
}

impl Units {
    /// Angular rate in simulator units: MHz becomes `2π·f·10⁻³` rad/ns.
    pub fn angular(self, value: f64) -> f64 {
        match self {
            Units::Dimensionless => value,
            Units::MhzNs => 2.0 * PI * value * 1e-3,
        }
    }

    /// Linear frequency (cycles per time unit): MHz becomes `f·10⁻³` per ns.
    pub fn linear(self, value: f64) -> f64 {
        match self {
            Units::Dimensionless => value,
            Units::MhzNs => value * 1e-3,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Units::Dimensionless => "hbar = 1; rates in rad per time unit; spectral frequencies in cycles per time unit",
            Units::MhzNs => "frequencies in MHz, times in ns; angular rates use omega[rad/ns] = 2*pi*f[MHz]*1e-3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub units: Units,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| serde_error("config", &e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    /// `$QPULSE_OUTPUT_DIR`, else `output_dir`, else `qpulse-out/<experiment>`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("qpulse-out").join(&self.experiment)),
        }
    }

    /// Strictly parses `parameters` into an experiment's parameter struct.
    pub fn parameters<P: DeserializeOwned>(&self) -> CliResult<P> {
        serde_json::from_value(Value::Object(self.parameters.clone()))
            .map_err(|e| serde_error("parameters", &e))
    }
}

fn serde_error(context: &str, e: &serde_json::Error) -> CliError {
    let text = e.to_string();
    // serde names the offending field between backticks
    let key = text
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| context.to_string());
    CliError::Config {
        key: Some(key),
        message: text,
    }
}

pub(crate) fn require(ok: bool, key: &str, message: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::config(key, message))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversion() {
        assert_eq!(Units::Dimensionless.angular(0.5), 0.5);
        assert!((Units::MhzNs.angular(-450.0) + 2.0 * PI * 0.45).abs() < 1e-15);
        assert!((Units::MhzNs.linear(1000.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strict_parsing() {
        let ok = RunConfig::from_json(
            r#"{"experiment":"fig2","units":"MHz-ns","parameters":{"delta":1}}"#,
        )
        .unwrap();
        assert_eq!(ok.units, Units::MhzNs);
        let bad =
            RunConfig::from_json(r#"{"experiment":"fig2","units":"dimensionless","colour":1}"#)
                .unwrap_err();
        assert!(matches!(bad, CliError::Config { key: Some(ref k), .. } if k == "colour"));
        let units = RunConfig::from_json(r#"{"experiment":"fig2","units":"GHz"}"#).unwrap_err();
        assert_eq!(units.exit_code(), 2);
    }
}
