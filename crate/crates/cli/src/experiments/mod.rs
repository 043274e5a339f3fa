//! Registered experiments. Each one parses its own parameters strictly, converts them to
//! simulator units and returns named CSV artifacts plus a JSON summary for the manifest.

use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::CliResult;

pub mod cr;
pub mod dynamics;
pub mod signal;
pub mod spectra;

/// CSV artifacts (file name, contents) and scalar results of a run.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub artifacts: Vec<(String, String)>,
    pub summary: Map<String, Value>,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    pub fn artifact(&mut self, name: &str, csv: String) {
        self.artifacts.push((name.to_string(), csv));
    }

    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

pub type Runner = fn(&RunConfig) -> CliResult<ExperimentOutput>;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    /// `(key, default and meaning)`; every key is optional.
    pub parameters: &'static [(&'static str, &'static str)],
    pub run: Runner,
}

pub fn registry() -> Vec<Experiment> {
    vec![
        dynamics::FIG2,
        spectra::FIG4,
        spectra::FIG5,
        dynamics::FIG6,
        spectra::FIG7,
        spectra::FIG9,
        spectra::NYQUIST,
        signal::LO_DEPHASING,
        signal::IQ_SKEW_LEAKAGE,
        cr::CR_ECHO,
        cr::CR_ACTIVE_CANCEL,
        cr::CR_MULTIDERIVATIVE,
        cr::ZZ_IDLE_ECHO,
        cr::CNOT,
    ]
}

pub fn find(name: &str) -> Option<Experiment> {
    registry().into_iter().find(|e| e.name == name)
}

/// Evenly spaced `points` values on `[lo, hi]`.
pub(crate) fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}
