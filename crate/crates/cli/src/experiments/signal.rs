use std::f64::consts::SQRT_2;

use qpulse_core::envelope::{drag_quadrature, make_default_gaussian, make_zero};
use qpulse_core::hamiltonian::three_level_rwa;
use qpulse_core::hardware::{lo_dephasing_run, sample_and_hold, skewed_envelope, DephasingCurve};
use qpulse_core::io::CsvTable;
use qpulse_core::propagate::{leakage, propagate, InitialState};
use serde::Deserialize;
use serde_json::json;

use super::dynamics::{FIG6_A0, FIG6_ANHARMONICITY, FIG6_SIGMA};
use super::{linspace, Experiment, ExperimentOutput};
use crate::config::{require, RunConfig};
use crate::error::CliResult;

pub const LO_DEPHASING: Experiment = Experiment {
    name: "lo-dephasing",
    description:
        "Ensemble coherence of an idle qubit under white LO frequency noise vs exp(-sigma^2 t/2)",
    parameters: &[
        ("sigma", "noise strength in rad per sqrt(time unit), 0.5"),
        ("duration", "evolution time, 8"),
        ("steps", "time steps, 256"),
        (
            "ensemble",
            "noise realisations, 4000 (member k seeded with seed + k)",
        ),
    ],
    run: run_lo_dephasing,
};

pub const IQ_SKEW_LEAKAGE: Experiment = Experiment {
    name: "iq-skew-leakage",
    description: "Leakage of a sampled Gaussian-DRAG pulse vs IQ mixer quadrature skew",
    parameters: &[
        ("anharmonicity", "Delta, -2*pi*0.45 rad/ns (MHz-ns: -450)"),
        ("a0", "peak amplitude, 2*pi*0.2 rad/ns (MHz-ns: 200)"),
        ("sigma", "Gaussian width, 6.5"),
        ("lambda", "1-2 coupling ratio, sqrt(2)"),
        ("fs", "AWG sample rate, 1 per time unit (MHz-ns: 1000)"),
        ("skews", "quadrature skews in rad, 13 values on [0, 0.3]"),
        ("gain", "Q-arm gain, 1"),
    ],
    run: run_iq_skew,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DephasingParams {
    sigma: Option<f64>,
    duration: Option<f64>,
    steps: Option<usize>,
    ensemble: Option<usize>,
}

/// Measured vs expected coherence at the grid time closest to each `σ²t` target.
pub fn dephasing_checkpoints(
    curve: &DephasingCurve,
    sigma: f64,
    targets: &[f64],
) -> Vec<(f64, f64, f64)> {
    targets
        .iter()
        .map(|s| {
            let t = s / (sigma * sigma);
            let k = curve
                .times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(k, _)| k)
                .unwrap_or(0);
            (curve.times[k], curve.coherence[k], curve.expected[k])
        })
        .collect()
}

fn run_lo_dephasing(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: DephasingParams = cfg.parameters()?;
    let sigma = p.sigma.unwrap_or(0.5);
    let duration = p.duration.unwrap_or(8.0);
    let steps = p.steps.unwrap_or(256);
    let ensemble = p.ensemble.unwrap_or(4000);
    require(sigma >= 0.0, "sigma", "must be non-negative")?;
    require(duration > 0.0, "duration", "must be positive")?;
    require(steps >= 8, "steps", "need at least 8")?;
    require(ensemble >= 1, "ensemble", "need at least 1")?;

    let curve = lo_dephasing_run(
        &make_zero(duration)?,
        sigma,
        cfg.seed,
        duration,
        steps,
        ensemble,
    )?;
    let mut out = ExperimentOutput::default();
    out.artifact("lo_dephasing.csv", curve.to_table().to_csv_string());
    if sigma > 0.0 {
        let checks: Vec<_> = dephasing_checkpoints(&curve, sigma, &[0.5, 1.0, 2.0])
            .into_iter()
            .map(|(t, c, e)| json!({"t": t, "coherence": c, "expected": e, "relative_error": (c - e).abs() / e}))
            .collect();
        out.record("checkpoints", checks);
    }
    out.record("seed", cfg.seed);
    out.record("ensemble", ensemble);
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkewParams {
    anharmonicity: Option<f64>,
    a0: Option<f64>,
    sigma: Option<f64>,
    lambda: Option<f64>,
    fs: Option<f64>,
    skews: Option<Vec<f64>>,
    gain: Option<f64>,
}

fn run_iq_skew(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: SkewParams = cfg.parameters()?;
    let anharm = p
        .anharmonicity
        .map_or(FIG6_ANHARMONICITY, |v| cfg.units.angular(v));
    let a0 = p.a0.map_or(FIG6_A0, |v| cfg.units.angular(v));
    let sigma = p.sigma.unwrap_or(FIG6_SIGMA);
    let lambda = p.lambda.unwrap_or(SQRT_2);
    let fs = p.fs.map_or(1.0, |v| cfg.units.linear(v));
    let skews = p.skews.unwrap_or_else(|| linspace(0.0, 0.3, 13));
    let gain = p.gain.unwrap_or(1.0);
    require(anharm != 0.0, "anharmonicity", "must be non-zero")?;
    require(sigma > 0.0, "sigma", "must be positive")?;
    require(fs > 0.0, "fs", "must be positive")?;
    require(!skews.is_empty(), "skews", "must be non-empty")?;
    require(gain > 0.0, "gain", "must be positive")?;

    let pulse = drag_quadrature(&make_default_gaussian(a0, sigma)?, anharm)?.as_complex();
    let mut out = ExperimentOutput::default();
    if let Some(w) = sample_and_hold(&pulse, fs)?.warning {
        out.note(w);
    }
    let mut table = CsvTable::new(["phi", "leakage", "p1"]);
    for &phi in &skews {
        let env = skewed_envelope(&pulse, fs, phi, gain)?;
        let model = three_level_rwa(anharm, lambda, &env)?;
        let r = propagate(&model, env.duration(), None, &InitialState::Basis(0))?;
        table.push(vec![phi, leakage(&r, 2)?, r.final_populations()[1]]);
    }
    let leak = table.column("leakage").unwrap_or_default();
    out.record("leakage_at_first_skew", leak[0]);
    out.record("leakage_max", leak.iter().copied().fold(0.0, f64::max));
    out.artifact("iq_skew_leakage.csv", table.to_csv_string());
    Ok(out)
}
