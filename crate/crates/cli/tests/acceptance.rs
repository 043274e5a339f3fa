//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use qpulse::experiments::dynamics::{fig6_run, FIG6_A0, FIG6_ANHARMONICITY, FIG6_SIGMA};
use qpulse::experiments::signal::dephasing_checkpoints;
use qpulse::experiments::spectra::held_tone;
use qpulse::{run_config, RunConfig};
use qpulse_core::calibrate::{
    cancellation_objective, cancellation_search, default_grids, effective_tomography, probe_time,
};
use qpulse_core::crgate::{
    cnot_from_cr, echo_sequence, idle_zz_echo, with_cancellation, zz_probe_states, PiPulse,
};
use qpulse_core::envelope::{
    drag_quadrature, make_default_gaussian, make_flat_top_gaussian_with, make_gaussian,
    make_square, make_triangular, make_zero, recursive_drag_cr,
};
use qpulse_core::hamiltonian::{cr_effective, two_level_rwa, two_level_rwa_iq, CrCoefficients};
use qpulse_core::hardware::{lo_dephasing_run, virtual_z};
use qpulse_core::magnus::{
    channel_decompose_omega2, drag_first_order_check, magnus_numeric, omega2_triangular_closed,
    p01_square_closed,
};
use qpulse_core::numkit::{
    expm_hermitian_generator, ops, pauli_product, Complex64, ComplexMatrix, Pauli,
};
use qpulse_core::propagate::{propagate_unitary, transition_probability};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn out_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
        .join("acceptance")
        .join(name)
}

fn run_experiment(name: &str, units: &str, params: &str) -> Result<(PathBuf, Value), String> {
    let dir = out_dir(name);
    let text = format!(
        r#"{{"experiment": "{name}", "units": "{units}", "parameters": {params}, "output_dir": {:?}}}"#,
        dir.to_string_lossy()
    );
    let cfg = RunConfig::from_json(&text).map_err(fail)?;
    let report = run_config(&cfg).map_err(fail)?;
    let manifest = std::fs::read(report.output_dir.join("manifest.json")).map_err(fail)?;
    Ok((
        report.output_dir,
        serde_json::from_slice(&manifest).map_err(fail)?,
    ))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a0 = rng.random_range(0.2..4.0);
        let delta = rng.random_range(-a0..a0);
        let t = rng.random_range(0.1..8.0);
        let model = two_level_rwa(delta, &make_square(a0, t).map_err(fail)?).map_err(fail)?;
        let exact = transition_probability(
            &propagate_unitary(&model, 0.0, t, None).map_err(fail)?,
            0,
            1,
        )
        .map_err(fail)?;
        worst = worst.max((exact - p01_square_closed(delta, a0, t)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-6 && secs < 5.0,
        format!("max |closed - exact| = {worst:.2e} over 20 draws, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_tri: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for &(delta, a0, t) in &[(0.5, PI, 1.0), (0.5, PI, 2.5), (0.3, 1.2, 4.0)] {
        let tri = magnus_numeric(
            &two_level_rwa(delta, &make_triangular(a0, t).map_err(fail)?).map_err(fail)?,
            t,
            64,
        )
        .map_err(fail)?
        .omega2;
        let closed = omega2_triangular_closed(delta, a0, t);
        worst_tri = worst_tri.max(tri.max_abs_diff(&closed) / closed.max_abs());
        let sq = magnus_numeric(
            &two_level_rwa(delta, &make_square(a0, t).map_err(fail)?).map_err(fail)?,
            t,
            64,
        )
        .map_err(fail)?
        .omega2;
        worst_zero = worst_zero.max(sq.max_abs());
        for env in [
            make_square(a0, t).map_err(fail)?,
            make_triangular(a0, t).map_err(fail)?,
        ] {
            let res = magnus_numeric(&two_level_rwa(0.0, &env).map_err(fail)?, t, 64)
                .map_err(fail)?
                .omega2;
            worst_zero = worst_zero.max(res.max_abs());
        }
    }
    check(
        worst_tri < 1e-8 && worst_zero < 1e-10,
        format!("triangular Omega2 relative gap {worst_tri:.2e} (closed form vs numeric), square/resonant max |Omega2| {worst_zero:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (dir, m) = run_experiment(
        "fig2",
        "dimensionless",
        r#"{"delta": 0.5, "a0": 3.141592653589793}"#,
    )?;
    let secs = start.elapsed().as_secs_f64();
    let files = [
        "fig2_square_magnus.csv",
        "fig2_square_exact.csv",
        "fig2_triangular_magnus.csv",
        "fig2_triangular_exact.csv",
    ];
    let present = files.iter().all(|f| dir.join(f).is_file());
    let s = &m["summary"];
    let peak = s["square_exact_peak"].as_f64().unwrap_or(f64::NAN);
    let closed = PI * PI / (PI * PI + 0.25);
    let gap = s["square_magnus_vs_exact_max_gap"]
        .as_f64()
        .unwrap_or(f64::NAN);
    check(
        present && (peak - closed).abs() < 1e-3 && (peak - 0.9753).abs() < 1e-3 && gap < 1e-8 && secs < 10.0,
        format!("4 CSVs {present}, peak {peak:.5} vs {closed:.5}, square Magnus gap {gap:.2e}, {secs:.2} s"),
    )
}

fn criterion_4() -> Outcome {
    let pulse = make_default_gaussian(FIG6_A0, FIG6_SIGMA).map_err(fail)?;
    let drag = drag_quadrature(&pulse, FIG6_ANHARMONICITY).map_err(fail)?;
    let with = drag_first_order_check(FIG6_ANHARMONICITY, SQRT_2, &drag.as_complex(), 256)
        .map_err(fail)?;
    let without = drag_first_order_check(FIG6_ANHARMONICITY, SQRT_2, &pulse.as_complex(), 256)
        .map_err(fail)?;
    check(
        with.leak_error < 1e-8 && without.leak_error > 1e-3,
        format!(
            "|sigma12| of Omega1: DRAG {:.2e}, plain {:.2e}",
            with.leak_error, without.leak_error
        ),
    )
}

fn criterion_5() -> Outcome {
    let r = fig6_run(FIG6_ANHARMONICITY, FIG6_A0, FIG6_SIGMA, SQRT_2, 4096).map_err(fail)?;
    let (lp, ld) = r.leakage();
    let (pp, pd) = r.p1();
    check(
        ld <= 0.1 * lp && pd > pp,
        format!("leakage DRAG {ld:.3e} vs plain {lp:.3e} (ratio {:.2e}); P1 DRAG {pd:.6} vs plain {pp:.6}", ld / lp),
    )
}

fn criterion_6() -> Outcome {
    let pulse = make_default_gaussian(FIG6_A0, FIG6_SIGMA).map_err(fail)?;
    let drag = drag_quadrature(&pulse, FIG6_ANHARMONICITY).map_err(fail)?;
    let plain = channel_decompose_omega2(FIG6_ANHARMONICITY, SQRT_2, &pulse.as_complex(), 256)
        .map_err(fail)?;
    let corrected = channel_decompose_omega2(FIG6_ANHARMONICITY, SQRT_2, &drag.as_complex(), 256)
        .map_err(fail)?;
    // the second-order inventory describes the DRAG pulse; a purely real drive has no
    // sigma01^z term because [H01(t1), H01(t2)] needs a quadrature component
    let stark = [plain.s01z, plain.s12z, corrected.s01z, corrected.s12z];
    check(
        corrected.s02plus < plain.s02plus && corrected.s01z > 1e-9 && corrected.s12z > 1e-9,
        format!(
            "s02plus DRAG {:.3e} vs plain {:.3e}; Stark s01z/s12z plain {:.3e}/{:.3e}, DRAG {:.3e}/{:.3e}",
            corrected.s02plus, plain.s02plus, stark[0], stark[1], stark[2], stark[3]
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let zx = pauli_product(Pauli::Z, Pauli::X);
    let (mut worst_exact, mut worst_zi): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let c = CrCoefficients {
            w_ix: rng.random_range(-0.5..0.5),
            w_zi: rng.random_range(-0.5..0.5),
            w_zx: rng.random_range(-0.5..0.5),
            ..CrCoefficients::default()
        };
        let tau = rng.random_range(0.1..10.0);
        let u = echo_sequence(&c, tau, &PiPulse::Ideal)
            .map_err(fail)?
            .total_unitary()
            .map_err(fail)?;
        let target = expm_hermitian_generator(&zx.scale_real(c.w_zx), tau).map_err(fail)?;
        worst_exact = worst_exact.max(u.max_abs_diff(&target));
        for w_zi in [0.0, 0.3] {
            let v = echo_sequence(&CrCoefficients { w_zi, ..c }, tau, &PiPulse::Ideal)
                .map_err(fail)?
                .total_unitary()
                .map_err(fail)?;
            worst_zi = worst_zi.max(u.max_abs_diff(&v));
        }
    }
    check(
        worst_exact < 1e-10 && worst_zi < 1e-12,
        format!(
            "max |U_echo - exp(-i tau w_zx ZX)| {worst_exact:.2e}, w_zi sensitivity {worst_zi:.2e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let r = cnot_from_cr().map_err(fail)?;
    let (_, m) = run_experiment("cnot", "dimensionless", "{}")?;
    let phase = m["summary"]["phase_rad"].as_f64();
    let distance = m["summary"]["distance"].as_f64().unwrap_or(f64::NAN);
    check(
        r.distance < 1e-12 && distance < 1e-12 && phase == Some(r.phase),
        format!(
            "distance {distance:.2e}, manifest phase {:?} rad ({:.4} pi)",
            phase,
            r.phase / PI
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut off_bin = 0;
    let mut count = 0;
    for ratio in [0.1, 0.2, 0.3] {
        let h = held_tone(ratio, 1.0, 100, 32, 3).map_err(fail)?;
        for img in &h.images {
            count += 1;
            if (img.located - img.expected).abs() > h.resolution / 2.0 {
                off_bin += 1;
            }
            worst = worst.max((img.magnitude - img.sinc).abs() / img.sinc);
        }
    }
    check(
        off_bin == 0 && worst < 0.02 && count > 0,
        format!(
            "{count} images in zones 1-3, {off_bin} off their bin, max deviation from sinc {:.2}%",
            100.0 * worst
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let sigma = rng.random_range(2.0..6.0);
        let env = drag_quadrature(
            &make_gaussian(rng.random_range(0.05..0.6), sigma, 4.0 * sigma, true).map_err(fail)?,
            rng.random_range(-3.0..-1.0),
        )
        .map_err(fail)?
        .as_complex();
        let theta = rng.random_range(-PI..PI);
        let delta = rng.random_range(-0.3..0.3);
        let t = env.duration();
        let rotated = propagate_unitary(
            &two_level_rwa_iq(delta, &virtual_z(&env, theta)).map_err(fail)?,
            0.0,
            t,
            None,
        )
        .map_err(fail)?;
        let plain = propagate_unitary(&two_level_rwa_iq(delta, &env).map_err(fail)?, 0.0, t, None)
            .map_err(fail)?;
        let w = expm_hermitian_generator(&ops::pauli_z(), -theta / 2.0).map_err(fail)?;
        worst = worst.max(
            rotated
                .phase_distance(&w.matmul(&plain).matmul(&w.adjoint()))
                .0,
        );
    }
    check(
        worst < 1e-9,
        format!("max distance up to phase {worst:.2e} over 10 envelopes"),
    )
}

fn criterion_11() -> Outcome {
    let quiet =
        lo_dephasing_run(&make_zero(8.0).map_err(fail)?, 0.0, 0, 8.0, 256, 4).map_err(fail)?;
    let drift = quiet
        .coherence
        .iter()
        .map(|c| (c - 0.5).abs())
        .fold(0.0, f64::max);
    let sigma = 0.5;
    let noisy = lo_dephasing_run(&make_zero(8.0).map_err(fail)?, sigma, 2024, 8.0, 256, 4000)
        .map_err(fail)?;
    let points = dephasing_checkpoints(&noisy, sigma, &[0.5, 1.0, 2.0]);
    let worst = points
        .iter()
        .map(|(_, c, e)| (c - e).abs() / e)
        .fold(0.0, f64::max);
    check(
        drift < 1e-12 && worst < 0.05,
        format!("zero-noise drift {drift:.2e}; worst relative error vs exp(-sigma^2 t/2) at 3 times {:.2}%", 100.0 * worst),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let j = rng.random_range(-0.1..0.1);
        let tau = rng.random_range(0.1..200.0);
        let u = idle_zz_echo(j, tau)
            .map_err(fail)?
            .total_unitary()
            .map_err(fail)?;
        worst = worst.max(u.phase_distance(&ComplexMatrix::identity(4)).0);
    }
    let zz = pauli_product(Pauli::Z, Pauli::Z);
    let (phi_plus, mixed) = zz_probe_states();
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let zz1 = zz.apply(&phi_plus) == phi_plus;
    let zz2 = zz.apply(&mixed) == vec![s, -s, zero, zero] && zz.apply(&mixed) != mixed;
    check(
        worst < 1e-12 && zz1 && zz2,
        format!("max distance from phase*I {worst:.2e}; ZZ|Phi+> = |Phi+> {zz1}; ZZ(|00>+|01>) = |00>-|01> {zz2}"),
    )
}

fn criterion_13() -> Outcome {
    let c = CrCoefficients {
        w_ix: 0.02,
        w_iy: 0.008,
        w_iz: 0.003,
        w_zi: 0.03,
        w_zx: 0.012,
        w_zy: 0.0,
        w_zz: 0.001,
    };
    let start = Instant::now();
    let (amps, phases) = default_grids(&c);
    let r = cancellation_search(&c, &amps, &phases, 4).map_err(fail)?;
    let secs = start.elapsed().as_secs_f64();
    let before =
        effective_tomography(&cr_effective(&c, 1).map_err(fail)?, probe_time(&c)).map_err(fail)?;
    let tuned = with_cancellation(&c, r.amp, r.phase);
    let after = effective_tomography(&cr_effective(&tuned, 1).map_err(fail)?, probe_time(&tuned))
        .map_err(fail)?;
    let (b, a) = (before.coefficients, after.coefficients);
    let objective_before = cancellation_objective(&c, 0.0, 0.0).map_err(fail)?;
    check(
        a.w_ix.abs() < 1e-3 * b.w_ix.abs() && a.w_iy.abs() < 1e-3 * b.w_iy.abs() && r.residual < 1e-3 * objective_before && secs < 30.0,
        format!(
            "IX {:.2e} -> {:.2e}, IY {:.2e} -> {:.2e}, amp {:.5} phase {:.4}, {} evaluations in {secs:.2} s",
            b.w_ix, a.w_ix, b.w_iy, a.w_iy, r.amp, r.phase, r.evaluations
        ),
    )
}

fn criterion_14() -> Outcome {
    let (ramp, hold, amp) = (10.0, 40.0, 0.1);
    let (d10, d21, d20) = (-0.6, -2.7, -3.3);
    let base = make_flat_top_gaussian_with(amp, ramp / 8.0, ramp, hold, false).map_err(fail)?;
    let drive = recursive_drag_cr(&base, d10, d21, d20).map_err(fail)?;
    let levels = drive
        .recursive()
        .ok_or("drive carries no recursion levels")?;
    let t_end = base.duration();
    let endpoint = drive.value(0.0).norm().max(drive.value(t_end).norm());

    let h = 1e-4;
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    let probes: Vec<f64> = (1..40)
        .map(|k| ramp * k as f64 / 40.0)
        .chain((1..40).map(|k| ramp + hold + ramp * k as f64 / 40.0))
        .collect();
    for &t in &probes {
        let (l, lp, lm) = (levels.levels(t), levels.levels(t + h), levels.levels(t - h));
        let d3 = (lp.omega3 - lm.omega3) / (2.0 * h);
        let d2 = (lp.omega2 - lm.omega2) / (2.0 * h);
        let d1 = (lp.omega1 - lm.omega1) / (2.0 * h);
        let omega2 =
            (Complex64::new(l.omega3 * l.omega3, 0.0) - 2.0 * i * l.omega3 * d3 / d20).sqrt();
        let scale = amp;
        worst = worst
            .max((l.omega2 - omega2).norm() / scale)
            .max((l.omega1 - (l.omega2 - i * d2 / d21)).norm() / scale)
            .max((l.omega_cr - (l.omega1 - i * d1 / d10)).norm() / scale);
    }
    let plateau = [ramp, ramp + hold / 3.0, ramp + hold / 2.0, ramp + hold]
        .iter()
        .all(|&t| drive.value(t) == Complex64::new(amp, 0.0));
    check(
        endpoint < 1e-9 && worst < 1e-6 && plateau,
        format!("endpoints {endpoint:.2e}; max level vs finite difference {worst:.2e}; plateau exactly {amp}: {plateau}"),
    )
}

fn main() -> ExitCode {
    std::env::remove_var(qpulse::OUTPUT_DIR_ENV);
    let criteria: [(u32, fn() -> Outcome); 14] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
        (14, criterion_14),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {n}: PASS - {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL - {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
