use std::f64::consts::{PI, SQRT_2};

use qpulse_core::envelope::{
    drag_quadrature, make_default_gaussian, make_square, make_triangular, Envelope,
};
use qpulse_core::hamiltonian::{three_level_rwa, two_level_rwa};
use qpulse_core::io::CsvTable;
use qpulse_core::magnus::{magnus_numeric, p01_square_closed};
use qpulse_core::propagate::{
    leakage, propagate, propagate_unitary, transition_probability, InitialState, PropagationResult,
};
use serde::Deserialize;

use super::{linspace, Experiment, ExperimentOutput};
use crate::config::{require, RunConfig, Units};
use crate::error::CliResult;

pub const FIG2: Experiment = Experiment {
    name: "fig2",
    description: "Rabi transition probability vs pulse duration: second-order Magnus vs exact, square and triangular pulses",
    parameters: &[
        ("delta", "detuning, 0.5"),
        ("a0", "peak amplitude, pi"),
        ("t_max", "longest pulse duration, 4"),
        ("points", "durations sampled, 201"),
        ("panels", "Gauss-Legendre panels for the Magnus integrals, 64"),
    ],
    run: run_fig2,
};

pub const FIG6: Experiment = Experiment {
    name: "fig6",
    description: "Three-level populations under a Gaussian and a Gaussian-DRAG pulse",
    parameters: &[
        ("anharmonicity", "Delta, -2*pi*0.45 rad/ns (MHz-ns: -450)"),
        ("a0", "peak amplitude, 2*pi*0.2 rad/ns (MHz-ns: 200, see amplitude_convention)"),
        ("amplitude_convention", "MHz-ns only: \"linear\" reads a0 as A0/2pi in MHz (A0 = 2*pi*a0*1e-3 rad/ns); \"angular\" reads a0 as A0 in Mrad/s (A0 = a0*1e-3); linear"),
        ("sigma", "Gaussian width, 6.5 (duration 4 sigma)"),
        ("lambda", "1-2 coupling ratio, sqrt(2)"),
        ("steps", "propagator steps, 4096"),
    ],
    run: run_fig6,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig2Params {
    delta: Option<f64>,
    a0: Option<f64>,
    t_max: Option<f64>,
    points: Option<usize>,
    panels: Option<usize>,
}

/// Transition-probability curves over pulse duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Curves {
    pub durations: Vec<f64>,
    pub square_exact: Vec<f64>,
    pub square_magnus: Vec<f64>,
    pub triangular_exact: Vec<f64>,
    pub triangular_magnus: Vec<f64>,
}

fn p01_pair(delta: f64, env: &Envelope, panels: usize) -> CliResult<(f64, f64)> {
    let t = env.duration();
    let model = two_level_rwa(delta, env)?;
    let exact = transition_probability(&propagate_unitary(&model, 0.0, t, None)?, 0, 1)?;
    let magnus =
        transition_probability(&magnus_numeric(&model, t, panels)?.truncated_unitary, 0, 1)?;
    Ok((exact, magnus))
}

/// `P₀→₁` for durations `linspace(0, t_max, points)`; the zero-length pulse gives 0.
pub fn fig2_curves(
    delta: f64,
    a0: f64,
    t_max: f64,
    points: usize,
    panels: usize,
) -> CliResult<Fig2Curves> {
    let durations = linspace(0.0, t_max, points);
    let mut c = Fig2Curves {
        durations: durations.clone(),
        square_exact: Vec::with_capacity(points),
        square_magnus: Vec::with_capacity(points),
        triangular_exact: Vec::with_capacity(points),
        triangular_magnus: Vec::with_capacity(points),
    };
    for &t in &durations {
        if t == 0.0 {
            for v in [
                &mut c.square_exact,
                &mut c.square_magnus,
                &mut c.triangular_exact,
                &mut c.triangular_magnus,
            ] {
                v.push(0.0);
            }
            continue;
        }
        let (e, m) = p01_pair(delta, &make_square(a0, t)?, panels)?;
        c.square_exact.push(e);
        c.square_magnus.push(m);
        let (e, m) = p01_pair(delta, &make_triangular(a0, t)?, panels)?;
        c.triangular_exact.push(e);
        c.triangular_magnus.push(m);
    }
    Ok(c)
}

fn curve_csv(t: &[f64], p: &[f64]) -> String {
    let mut table = CsvTable::new(["T", "P01"]);
    for (a, b) in t.iter().zip(p) {
        table.push(vec![*a, *b]);
    }
    table.to_csv_string()
}

fn run_fig2(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: Fig2Params = cfg.parameters()?;
    let delta = p.delta.map_or(0.5, |v| cfg.units.angular(v));
    let a0 = p.a0.map_or(PI, |v| cfg.units.angular(v));
    let t_max = p.t_max.unwrap_or(4.0);
    let points = p.points.unwrap_or(201);
    let panels = p.panels.unwrap_or(64);
    require(
        t_max > 0.0 && t_max.is_finite(),
        "t_max",
        "must be positive",
    )?;
    require(points >= 2, "points", "need at least 2")?;
    require(panels >= 1, "panels", "need at least 1")?;
    require(delta.is_finite(), "delta", "must be finite")?;
    require(a0.is_finite(), "a0", "must be finite")?;

    let c = fig2_curves(delta, a0, t_max, points, panels)?;
    let mut out = ExperimentOutput::default();
    out.artifact(
        "fig2_square_magnus.csv",
        curve_csv(&c.durations, &c.square_magnus),
    );
    out.artifact(
        "fig2_square_exact.csv",
        curve_csv(&c.durations, &c.square_exact),
    );
    out.artifact(
        "fig2_triangular_magnus.csv",
        curve_csv(&c.durations, &c.triangular_magnus),
    );
    out.artifact(
        "fig2_triangular_exact.csv",
        curve_csv(&c.durations, &c.triangular_exact),
    );

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let max_gap = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    out.record("delta", delta);
    out.record("a0", a0);
    out.record("square_exact_peak", max(&c.square_exact));
    out.record(
        "square_peak_closed_form",
        a0 * a0 / (a0 * a0 + delta * delta),
    );
    out.record(
        "square_magnus_vs_exact_max_gap",
        max_gap(&c.square_exact, &c.square_magnus),
    );
    out.record(
        "triangular_magnus_vs_exact_max_gap",
        max_gap(&c.triangular_exact, &c.triangular_magnus),
    );
    out.record(
        "square_closed_form_vs_exact_max_gap",
        c.durations
            .iter()
            .zip(&c.square_exact)
            .map(|(t, e)| (p01_square_closed(delta, a0, *t) - e).abs())
            .fold(0.0, f64::max),
    );
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig6Params {
    anharmonicity: Option<f64>,
    a0: Option<f64>,
    amplitude_convention: Option<String>,
    sigma: Option<f64>,
    lambda: Option<f64>,
    steps: Option<usize>,
}

/// Three-level trajectories for the plain and DRAG Gaussian.
#[derive(Debug, Clone)]
pub struct Fig6Result {
    pub plain: PropagationResult,
    pub drag: PropagationResult,
    pub pulse: Envelope,
    pub drag_pulse: Envelope,
}

impl Fig6Result {
    pub fn leakage(&self) -> (f64, f64) {
        (
            leakage(&self.plain, 2).unwrap_or(f64::NAN),
            leakage(&self.drag, 2).unwrap_or(f64::NAN),
        )
    }

    pub fn p1(&self) -> (f64, f64) {
        (
            self.plain.final_populations()[1],
            self.drag.final_populations()[1],
        )
    }
}

/// Default amplitude in rad/ns: `A₀/2π = 200 MHz`.
pub const FIG6_A0: f64 = 2.0 * PI * 0.2;
pub const FIG6_ANHARMONICITY: f64 = -2.0 * PI * 0.45;
pub const FIG6_SIGMA: f64 = 6.5;

pub fn fig6_run(
    anharm: f64,
    a0: f64,
    sigma: f64,
    lambda: f64,
    steps: usize,
) -> CliResult<Fig6Result> {
    let pulse = make_default_gaussian(a0, sigma)?;
    let drag_pulse = drag_quadrature(&pulse, anharm)?;
    let t = pulse.duration();
    let plain = propagate(
        &three_level_rwa(anharm, lambda, &pulse.as_complex())?,
        t,
        Some(steps),
        &InitialState::Basis(0),
    )?;
    let drag = propagate(
        &three_level_rwa(anharm, lambda, &drag_pulse.as_complex())?,
        t,
        Some(steps),
        &InitialState::Basis(0),
    )?;
    Ok(Fig6Result {
        plain,
        drag,
        pulse,
        drag_pulse,
    })
}

fn run_fig6(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: Fig6Params = cfg.parameters()?;
    let convention = p.amplitude_convention.as_deref().unwrap_or("linear");
    require(
        matches!(convention, "linear" | "angular"),
        "amplitude_convention",
        "must be \"linear\" or \"angular\"",
    )?;
    let anharm = p
        .anharmonicity
        .map_or(FIG6_ANHARMONICITY, |v| cfg.units.angular(v));
    let a0 = match (p.a0, convention, cfg.units) {
        (None, _, _) => FIG6_A0,
        (Some(v), "angular", Units::MhzNs) => v * 1e-3,
        (Some(v), _, units) => units.angular(v),
    };
    let sigma = p.sigma.unwrap_or(FIG6_SIGMA);
    let lambda = p.lambda.unwrap_or(SQRT_2);
    let steps = p.steps.unwrap_or(4096);
    require(
        anharm != 0.0 && anharm.is_finite(),
        "anharmonicity",
        "must be finite and non-zero",
    )?;
    require(sigma > 0.0, "sigma", "must be positive")?;
    require(steps >= 8, "steps", "need at least 8")?;

    let r = fig6_run(anharm, a0, sigma, lambda, steps)?;
    let mut out = ExperimentOutput::default();
    out.artifact("fig6_gaussian.csv", r.plain.to_table().to_csv_string());
    out.artifact("fig6_gaussian_drag.csv", r.drag.to_table().to_csv_string());
    out.artifact(
        "fig6_pulses.csv",
        r.drag_pulse.to_table(401).to_csv_string(),
    );
    let (leak_plain, leak_drag) = r.leakage();
    let (p1_plain, p1_drag) = r.p1();
    out.record("anharmonicity_rad_per_time", anharm);
    out.record("a0_rad_per_time", a0);
    out.record("sigma", sigma);
    out.record("duration", r.pulse.duration());
    out.record("pulse_area", r.pulse.area());
    out.record("leakage_gaussian", leak_plain);
    out.record("leakage_drag", leak_drag);
    out.record("leakage_ratio", leak_drag / leak_plain);
    out.record("p1_gaussian", p1_plain);
    out.record("p1_drag", p1_drag);
    out.record("amplitude_convention", convention);
    if cfg.units == Units::MhzNs {
        out.note(match convention {
            "angular" => "a0 read as an angular rate in Mrad/s: A0 = a0*1e-3 rad/ns (200 gives 0.2 rad/ns, close to a pi pulse at sigma 6.5 ns)",
            _ => "a0 read as A0/2pi in MHz: A0 = 2*pi*a0*1e-3 rad/ns (200 gives 1.2566 rad/ns, a pulse area of about 5.6 pi at sigma 6.5 ns)",
        });
    }
    Ok(out)
}
