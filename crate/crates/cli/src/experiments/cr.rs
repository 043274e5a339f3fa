use std::f64::consts::PI;

use qpulse_core::calibrate::{
    cancellation_objective, cancellation_search, default_grids, tomography_from_unitary, Tomography,
};
use qpulse_core::crgate::{
    active_cancellation_schedule, cnot_from_cr, echo_sequence, flat_top_cr_schedule, idle_zz_echo,
    multiderivative_cr_schedule, zz_evolution, zz_probe_states, CancelPulse, CrDriveMapping,
    GateSchedule, PiPulse,
};
use qpulse_core::envelope::{
    drag_quadrature, make_default_gaussian, make_flat_top_gaussian_with, recursive_drag_cr,
};
use qpulse_core::hamiltonian::CrCoefficients;
use qpulse_core::io::CsvTable;
use qpulse_core::numkit::{pauli_product, Complex64, ComplexMatrix, Pauli, PauliCoefficients};
use qpulse_core::propagate::average_gate_fidelity;
use serde::Deserialize;
use serde_json::json;

use super::{linspace, Experiment, ExperimentOutput};
use crate::config::{require, RunConfig, Units};
use crate::error::{CliError, CliResult};

pub const CR_ECHO: Experiment = Experiment {
    name: "cr-echo",
    description: "Echoed cross-resonance: timeline, generator of the echo and ZX angle vs tau",
    parameters: &[
        (
            "rates",
            "object with w_ix w_iy w_iz w_zi w_zx w_zy w_zz, rad/time unit (MHz-ns: MHz)",
        ),
        ("tau", "duration of each CR half, default pi/(4 w_zx)"),
        (
            "pi_pulse",
            "\"ideal\" or \"shaped\" (Gaussian DRAG on the control), ideal",
        ),
        ("pi_sigma", "Gaussian width of a shaped pi pulse, 4"),
        (
            "pi_anharmonicity",
            "DRAG detuning of a shaped pi pulse, -2*pi*0.33",
        ),
        ("sweep_points", "tau values in the angle sweep, 21"),
        ("timeline_samples", "samples per segment and line, 64"),
    ],
    run: run_cr_echo,
};

pub const CR_ACTIVE_CANCEL: Experiment = Experiment {
    name: "cr-active-cancel",
    description:
        "Grid plus golden-section search for the target cancellation tone removing IX and IY",
    parameters: &[
        ("rates", "object with w_ix w_iy w_iz w_zi w_zx w_zy w_zz"),
        ("tau", "duration of each CR half, default pi/(4 w_zx)"),
        (
            "amp_points",
            "amplitude grid points on [0, 2|w_ix + i w_iy|], 21",
        ),
        ("phase_points", "phase grid points on [0, 2pi), 24"),
        ("refine_iters", "alternating golden-section rounds, 4"),
        ("timeline_samples", "samples per segment and line, 64"),
    ],
    run: run_active_cancel,
};

pub const CR_MULTIDERIVATIVE: Experiment = Experiment {
    name: "cr-multiderivative",
    description:
        "Recursive DRAG CR drive on a short flat-top vs the plain flat-top with long ramps",
    parameters: &[
        ("amplitude", "plateau amplitude of the CR drive, 0.1"),
        ("ramp", "ramp length of the shaped drive, 10"),
        ("reference_ramp", "ramp length of the plain flat-top, 28"),
        ("hold", "plateau length, 100"),
        (
            "sigma_per_ramp",
            "Gaussian width as a fraction of the ramp, 1/8",
        ),
        (
            "detunings",
            "[d10, d21, d20] in rad/time unit, [-0.6, -2.7, -3.3]",
        ),
        ("rates", "CR rates at the reference amplitude"),
        (
            "reference_amplitude",
            "drive amplitude at which the rates hold, 0.1",
        ),
        ("cancel_amp", "target tone amplitude, |w_ix + i w_iy|"),
        ("cancel_phase", "target tone phase, pi + arg(w_ix + i w_iy)"),
        (
            "cancel_drag_delta",
            "DRAG detuning of the target tone, -2*pi*0.33",
        ),
        ("cr_detuning", "CR drive detuning removing IZ, 0"),
        ("samples", "drive samples, 801"),
        ("timeline_samples", "samples per segment and line, 256"),
    ],
    run: run_multiderivative,
};

pub const ZZ_IDLE_ECHO: Experiment = Experiment {
    name: "zz-idle-echo",
    description: "Idle ZZ phase accumulation with and without a pair of control pi pulses",
    parameters: &[
        ("j", "ZZ rate J in H = J Z⊗Z, 0.002 (MHz-ns: MHz)"),
        ("tau_max", "longest idle half, 500"),
        ("points", "tau values, 51"),
    ],
    run: run_zz_idle,
};

pub const CNOT: Experiment = Experiment {
    name: "cnot",
    description: "CNOT from CR_{-pi/2} and single-qubit rotations, with the global phase",
    parameters: &[],
    run: run_cnot,
};

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Rates {
    w_ix: Option<f64>,
    w_iy: Option<f64>,
    w_iz: Option<f64>,
    w_zi: Option<f64>,
    w_zx: Option<f64>,
    w_zy: Option<f64>,
    w_zz: Option<f64>,
}

/// Synthetic CR model used when a config gives no rates, in rad/ns.
pub const DEFAULT_RATES: CrCoefficients = CrCoefficients {
    w_ix: 0.02,
    w_iy: 0.008,
    w_iz: 0.003,
    w_zi: 0.03,
    w_zx: 0.012,
    w_zy: 0.0,
    w_zz: 0.001,
};

fn resolve_rates(units: Units, r: Option<Rates>) -> CliResult<CrCoefficients> {
    let r = r.unwrap_or_default();
    let pick = |v: Option<f64>, d: f64| v.map_or(d, |x| units.angular(x));
    let d = DEFAULT_RATES;
    let c = CrCoefficients {
        w_ix: pick(r.w_ix, d.w_ix),
        w_iy: pick(r.w_iy, d.w_iy),
        w_iz: pick(r.w_iz, d.w_iz),
        w_zi: pick(r.w_zi, d.w_zi),
        w_zx: pick(r.w_zx, d.w_zx),
        w_zy: pick(r.w_zy, d.w_zy),
        w_zz: pick(r.w_zz, d.w_zz),
    };
    for (a, b, w) in c.terms() {
        require(
            w.is_finite(),
            &format!("rates.w_{}{}", a.symbol(), b.symbol()).to_lowercase(),
            "must be finite",
        )?;
    }
    Ok(c)
}

fn default_tau(c: &CrCoefficients, tau: Option<f64>) -> CliResult<f64> {
    let tau = match tau {
        Some(t) => t,
        None => {
            require(c.w_zx != 0.0, "tau", "no default when w_zx = 0")?;
            PI / (4.0 * c.w_zx.abs())
        }
    };
    require(tau > 0.0 && tau.is_finite(), "tau", "must be positive")?;
    Ok(tau)
}

fn pauli_header(leading: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            h.push(format!("{}{}", a.symbol(), b.symbol()));
        }
    }
    h
}

fn pauli_row(leading: &[f64], p: &PauliCoefficients) -> Vec<f64> {
    leading
        .iter()
        .copied()
        .chain(p.iter().map(|(_, _, c)| c))
        .collect()
}

/// Generator `G` of `U = exp(−iG)`, split into Pauli components.
fn generator(u: &ComplexMatrix) -> CliResult<Tomography> {
    Ok(tomography_from_unitary(u, 1.0)?)
}

const ECHO_SPAN: [(Pauli, Pauli); 4] = [
    (Pauli::I, Pauli::I),
    (Pauli::I, Pauli::Y),
    (Pauli::I, Pauli::Z),
    (Pauli::Z, Pauli::X),
];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EchoParams {
    rates: Option<Rates>,
    tau: Option<f64>,
    pi_pulse: Option<String>,
    pi_sigma: Option<f64>,
    pi_anharmonicity: Option<f64>,
    sweep_points: Option<usize>,
    timeline_samples: Option<usize>,
}

fn run_cr_echo(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: EchoParams = cfg.parameters()?;
    let c = resolve_rates(cfg.units, p.rates)?;
    let tau = default_tau(&c, p.tau)?;
    let points = p.sweep_points.unwrap_or(21);
    let samples = p.timeline_samples.unwrap_or(64);
    require(points >= 2, "sweep_points", "need at least 2")?;
    require(samples >= 2, "timeline_samples", "need at least 2")?;
    let pulse = match p.pi_pulse.as_deref().unwrap_or("ideal") {
        "ideal" => PiPulse::Ideal,
        "shaped" => {
            let sigma = p.pi_sigma.unwrap_or(4.0);
            require(sigma > 0.0, "pi_sigma", "must be positive")?;
            let anharm = p
                .pi_anharmonicity
                .map_or(-2.0 * PI * 0.33, |v| cfg.units.angular(v));
            require(anharm != 0.0, "pi_anharmonicity", "must be non-zero")?;
            PiPulse::Shaped(drag_quadrature(
                &make_default_gaussian(1.0, sigma)?,
                anharm,
            )?)
        }
        _ => {
            return Err(CliError::config(
                "pi_pulse",
                "must be \"ideal\" or \"shaped\"",
            ))
        }
    };

    let schedule = echo_sequence(&c, tau, &pulse)?;
    let g = generator(&schedule.total_unitary()?)?;
    let mut out = ExperimentOutput::default();
    out.artifact("cr_echo_timeline.csv", schedule.timeline_csv(samples));
    let mut gen = CsvTable::new(pauli_header(&["tau"]));
    gen.push(pauli_row(&[tau], &g.paulis));
    out.artifact("cr_echo_generator.csv", gen.to_csv_string());

    let mut sweep = CsvTable::new(["tau", "zx_angle", "zx_angle_ideal", "outside_residual"]);
    for t in linspace(tau / points as f64, tau, points) {
        let gt = generator(&echo_sequence(&c, t, &pulse)?.total_unitary()?)?;
        sweep.push(vec![
            t,
            2.0 * gt.paulis.get(Pauli::Z, Pauli::X),
            2.0 * t * c.w_zx,
            gt.paulis.max_outside(&ECHO_SPAN),
        ]);
    }
    out.artifact("cr_echo_tau_sweep.csv", sweep.to_csv_string());

    out.record("tau", tau);
    out.record("duration", schedule.duration());
    out.record("zx_angle", 2.0 * g.paulis.get(Pauli::Z, Pauli::X));
    out.record("zx_angle_ideal", 2.0 * tau * c.w_zx);
    out.record("ix_component", g.paulis.get(Pauli::I, Pauli::X));
    out.record("zi_component", g.paulis.get(Pauli::Z, Pauli::I));
    out.record("outside_residual", g.paulis.max_outside(&ECHO_SPAN));
    out.record("wzz_tau_squared", (c.w_zz * tau).powi(2));
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CancelParams {
    rates: Option<Rates>,
    tau: Option<f64>,
    amp_points: Option<usize>,
    phase_points: Option<usize>,
    refine_iters: Option<usize>,
    timeline_samples: Option<usize>,
}

fn run_active_cancel(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: CancelParams = cfg.parameters()?;
    let c = resolve_rates(cfg.units, p.rates)?;
    let tau = default_tau(&c, p.tau)?;
    let refine = p.refine_iters.unwrap_or(4);
    let samples = p.timeline_samples.unwrap_or(64);
    require(samples >= 2, "timeline_samples", "need at least 2")?;
    let (mut amps, mut phases) = default_grids(&c);
    if let Some(n) = p.amp_points {
        require(n >= 2, "amp_points", "need at least 2")?;
        let hi = amps.last().copied().unwrap_or(0.0);
        amps = linspace(0.0, hi, n);
    }
    if let Some(n) = p.phase_points {
        require(n >= 1, "phase_points", "need at least 1")?;
        phases = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    }

    let mut grid = CsvTable::new(["amp", "phase", "objective"]);
    for &a in &amps {
        for &ph in &phases {
            grid.push(vec![a, ph, cancellation_objective(&c, a, ph)?]);
        }
    }
    let r = cancellation_search(&c, &amps, &phases, refine)?;
    let before = cancellation_objective(&c, 0.0, 0.0)?;

    let echo_ix_iy = |s: &GateSchedule| -> CliResult<(f64, f64)> {
        let g = generator(&s.total_unitary()?)?;
        Ok((
            g.paulis.get(Pauli::I, Pauli::X),
            g.paulis.get(Pauli::I, Pauli::Y),
        ))
    };
    let plain = active_cancellation_schedule(&c, 0.0, 0.0, tau)?;
    let tuned = active_cancellation_schedule(&c, r.amp, r.phase, tau)?;
    let (ix0, iy0) = echo_ix_iy(&plain)?;
    let (ix1, iy1) = echo_ix_iy(&tuned)?;

    let mut out = ExperimentOutput::default();
    out.artifact("cr_cancel_grid.csv", grid.to_csv_string());
    out.artifact("cr_cancel_timeline.csv", tuned.timeline_csv(samples));
    out.record("cancel_amp", r.amp);
    out.record("cancel_phase", r.phase);
    out.record("segment_ix_iy_before", before);
    out.record("segment_ix_iy_after", r.residual);
    out.record("reduction", r.residual / before);
    out.record("grid_best", r.grid_best);
    out.record("evaluations", r.evaluations);
    out.record(
        "echo_generator",
        json!({"ix_before": ix0, "iy_before": iy0, "ix_after": ix1, "iy_after": iy1}),
    );
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiParams {
    amplitude: Option<f64>,
    ramp: Option<f64>,
    reference_ramp: Option<f64>,
    hold: Option<f64>,
    sigma_per_ramp: Option<f64>,
    detunings: Option<[f64; 3]>,
    rates: Option<Rates>,
    reference_amplitude: Option<f64>,
    cancel_amp: Option<f64>,
    cancel_phase: Option<f64>,
    cancel_drag_delta: Option<f64>,
    cr_detuning: Option<f64>,
    samples: Option<usize>,
    timeline_samples: Option<usize>,
}

pub const MULTIDERIVATIVE_DETUNINGS: [f64; 3] = [-0.6, -2.7, -3.3];

fn run_multiderivative(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: MultiParams = cfg.parameters()?;
    let u = cfg.units;
    let amplitude = p.amplitude.map_or(0.1, |v| u.angular(v));
    let ramp = p.ramp.unwrap_or(10.0);
    let reference_ramp = p.reference_ramp.unwrap_or(28.0);
    let hold = p.hold.unwrap_or(100.0);
    let frac = p.sigma_per_ramp.unwrap_or(1.0 / 8.0);
    let [d10, d21, d20] = p
        .detunings
        .map_or(MULTIDERIVATIVE_DETUNINGS, |d| d.map(|x| u.angular(x)));
    let c = resolve_rates(u, p.rates)?;
    let reference = p.reference_amplitude.map_or(0.1, |v| u.angular(v));
    let rho = c.w_ix.hypot(c.w_iy);
    let cancel = CancelPulse {
        amp: p.cancel_amp.map_or(rho, |v| u.angular(v)),
        phase: p.cancel_phase.unwrap_or(PI + c.w_iy.atan2(c.w_ix)),
        drag_delta: Some(
            p.cancel_drag_delta
                .map_or(-2.0 * PI * 0.33, |v| u.angular(v)),
        ),
    };
    let cr_detuning = p.cr_detuning.map_or(0.0, |v| u.angular(v));
    let samples = p.samples.unwrap_or(801);
    let timeline = p.timeline_samples.unwrap_or(256);
    require(ramp > 0.0, "ramp", "must be positive")?;
    require(reference_ramp > 0.0, "reference_ramp", "must be positive")?;
    require(hold >= 0.0, "hold", "must be non-negative")?;
    require(frac > 0.0, "sigma_per_ramp", "must be positive")?;
    require(reference > 0.0, "reference_amplitude", "must be positive")?;
    require(samples >= 2, "samples", "need at least 2")?;
    require(timeline >= 2, "timeline_samples", "need at least 2")?;

    let base = make_flat_top_gaussian_with(amplitude, frac * ramp, ramp, hold, false)?;
    let long = make_flat_top_gaussian_with(
        amplitude,
        frac * reference_ramp,
        reference_ramp,
        hold,
        false,
    )?;
    let mapping = CrDriveMapping {
        coefficients: c,
        reference_amplitude: reference,
    };
    let drive = recursive_drag_cr(&base, d10, d21, d20)?;
    let multi =
        multiderivative_cr_schedule(&base, (d10, d21, d20), &mapping, &cancel, cr_detuning)?;
    let short_plain = flat_top_cr_schedule(&base, &mapping, &cancel, cr_detuning)?;
    let long_plain = flat_top_cr_schedule(&long, &mapping, &cancel, cr_detuning)?;

    let mut out = ExperimentOutput::default();
    let mut table = CsvTable::new([
        "t",
        "base",
        "omega2_re",
        "omega2_im",
        "omega1_re",
        "omega1_im",
        "omega_cr_re",
        "omega_cr_im",
    ]);
    let levels = drive
        .recursive()
        .ok_or_else(|| CliError::Numerical("recursive drive lost its levels".into()))?;
    for k in 0..samples {
        let t = base.duration() * k as f64 / (samples - 1) as f64;
        let l = levels.levels(t);
        table.push(vec![
            t,
            l.omega3,
            l.omega2.re,
            l.omega2.im,
            l.omega1.re,
            l.omega1.im,
            l.omega_cr.re,
            l.omega_cr.im,
        ]);
    }
    out.artifact("cr_multiderivative_drive.csv", table.to_csv_string());
    out.artifact(
        "cr_multiderivative_timeline.csv",
        multi.timeline_csv(timeline),
    );

    let mut tomo = CsvTable::new(pauli_header(&["schedule", "duration"]));
    for (k, s) in [&multi, &short_plain, &long_plain].into_iter().enumerate() {
        let g = generator(&s.total_unitary()?)?;
        tomo.push(pauli_row(&[k as f64, s.duration()], &g.paulis));
    }
    out.artifact("cr_multiderivative_generators.csv", tomo.to_csv_string());
    out.note("generator rows: schedule 0 = recursive DRAG short ramps, 1 = plain short ramps, 2 = plain reference ramps");

    let end = base.duration();
    let edge = drive.value(0.0).norm().max(drive.value(end).norm());
    out.record("duration", multi.duration());
    out.record("reference_duration", long_plain.duration());
    out.record("duration_saving", long_plain.duration() - multi.duration());
    out.record("edge_magnitude", edge);
    out.record("plateau_value", drive.value(ramp + hold / 2.0).re);
    out.record("amplitude", amplitude);
    out.record("max_phase_jump_omega2", levels.max_phase_jump(4096));
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZzParams {
    j: Option<f64>,
    tau_max: Option<f64>,
    points: Option<usize>,
}

fn run_zz_idle(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: ZzParams = cfg.parameters()?;
    let j = p.j.map_or(0.002, |v| cfg.units.angular(v));
    let tau_max = p.tau_max.unwrap_or(500.0);
    let points = p.points.unwrap_or(51);
    require(j.is_finite(), "j", "must be finite")?;
    require(tau_max > 0.0, "tau_max", "must be positive")?;
    require(points >= 2, "points", "need at least 2")?;

    let id = ComplexMatrix::identity(4);
    let mut table = CsvTable::new(["tau", "infidelity_free", "infidelity_echo"]);
    let mut worst_echo: f64 = 0.0;
    for tau in linspace(tau_max / points as f64, tau_max, points) {
        let free = 1.0 - average_gate_fidelity(&zz_evolution(j, 2.0 * tau)?, &id, 4)?;
        let echo = 1.0 - average_gate_fidelity(&idle_zz_echo(j, tau)?.total_unitary()?, &id, 4)?;
        worst_echo = worst_echo.max(echo.abs());
        table.push(vec![tau, free, echo]);
    }
    let zz = pauli_product(Pauli::Z, Pauli::Z);
    let (phi_plus, mixed) = zz_probe_states();
    let diff = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let flipped: Vec<_> = mixed
        .iter()
        .enumerate()
        .map(|(k, v)| if k == 1 { -v } else { *v })
        .collect();

    let mut out = ExperimentOutput::default();
    out.artifact("zz_idle_echo.csv", table.to_csv_string());
    out.record("j", j);
    out.record("max_echo_infidelity", worst_echo);
    out.record(
        "zz_phi_plus_deviation",
        diff(&zz.apply(&phi_plus), &phi_plus),
    );
    out.record(
        "zz_mixed_expected_deviation",
        diff(&zz.apply(&mixed), &flipped),
    );
    out.record("zz_mixed_changed", diff(&zz.apply(&mixed), &mixed));
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn run_cnot(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let _: NoParams = cfg.parameters()?;
    let r = cnot_from_cr()?;
    let mut table = CsvTable::new(["row", "col", "re", "im"]);
    let n = r.product.dim();
    for (k, v) in r.product.entries().iter().enumerate() {
        table.push(vec![(k / n) as f64, (k % n) as f64, v.re, v.im]);
    }
    let stated = -PI / 4.0;
    let mut out = ExperimentOutput::default();
    out.artifact("cnot_product.csv", table.to_csv_string());
    out.record("phase_rad", r.phase);
    out.record("phase_over_pi", r.phase / PI);
    out.record("distance", r.distance);
    out.record("stated_phase_rad", stated);
    out.record("matches_stated_phase", (r.phase - stated).abs() < 1e-12);
    Ok(out)
}
