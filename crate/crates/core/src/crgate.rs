//! Cross-resonance gate constructions on two qubits (control ⊗ target).

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::envelope::{drag_quadrature, recursive_drag_cr, ComplexEnvelope, Envelope};
use crate::error::{Error, Result};
use crate::hamiltonian::{cr_effective, CrCoefficients, TimeDependentHamiltonian};
use crate::io::format_float;
use crate::numkit::{expm_hermitian_generator, ops, pauli_product, ComplexMatrix, Pauli, I, ZERO};
use crate::propagate::propagate_unitary;

#[derive(Debug, Clone)]
pub enum SegmentKind {
    /// Evolution under `model` over local time `[0, duration]`.
    Evolution {
        model: TimeDependentHamiltonian,
        duration: f64,
        steps: Option<usize>,
    },
    /// Zero-duration gate.
    Instant { unitary: ComplexMatrix },
}

/// A drive waveform attached to a segment, kept for timeline output.
#[derive(Debug, Clone)]
pub struct DriveLine {
    pub name: &'static str,
    pub envelope: ComplexEnvelope,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub label: String,
    pub kind: SegmentKind,
    pub lines: Vec<DriveLine>,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match &self.kind {
            SegmentKind::Evolution { duration, .. } => *duration,
            SegmentKind::Instant { .. } => 0.0,
        }
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        match &self.kind {
            SegmentKind::Evolution {
                model,
                duration,
                steps,
            } => propagate_unitary(model, 0.0, *duration, *steps),
            SegmentKind::Instant { unitary } => Ok(unitary.clone()),
        }
    }
}

/// Segments applied in list order; the total is `U_n ⋯ U_2 U_1`.
#[derive(Debug, Clone, Default)]
pub struct GateSchedule {
    pub segments: Vec<Segment>,
}

impl GateSchedule {
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn total_unitary(&self) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(4);
        for s in &self.segments {
            u = s.unitary()?.matmul(&u);
        }
        Ok(u)
    }

    /// CSV with columns `segment, t_start, duration, line, t, I, Q`; `samples` points per
    /// line per evolution segment, one row per instantaneous gate.
    pub fn write_timeline<W: Write>(&self, w: W, samples: usize) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["segment", "t_start", "duration", "line", "t", "I", "Q"])?;
        let mut t0 = 0.0;
        for (k, s) in self.segments.iter().enumerate() {
            let d = s.duration();
            for line in &s.lines {
                let points: Vec<(f64, Complex64)> = if d > 0.0 {
                    line.envelope.sample(samples)
                } else {
                    vec![(0.0, line.envelope.value(0.0))]
                };
                for (t, z) in points {
                    out.write_record([
                        k.to_string(),
                        format_float(t0),
                        format_float(d),
                        line.name.to_string(),
                        format_float(t0 + t),
                        format_float(z.re),
                        format_float(z.im),
                    ])?;
                }
            }
            t0 += d;
        }
        out.flush()
    }

    pub fn timeline_csv(&self, samples: usize) -> String {
        let mut buf = Vec::new();
        self.write_timeline(&mut buf, samples)
            .expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }
}

fn generator_exp(a: Pauli, b: Pauli, angle: f64) -> ComplexMatrix {
    // exp(−i·angle/2·P) for a Pauli product P (P² = I)
    let p = pauli_product(a, b);
    let mut u = ComplexMatrix::identity(4).scale_real((angle / 2.0).cos());
    u.add_scaled(&p, -I * (angle / 2.0).sin());
    u
}

/// `exp(−iθ/2·Z⊗X)`
pub fn cr_target(theta: f64) -> ComplexMatrix {
    generator_exp(Pauli::Z, Pauli::X, theta)
}

/// `|0⟩⟨0|⊗I + |1⟩⟨1|⊗X`
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnotReport {
    /// `(Z⊗I)_{π/2}·(I⊗X)_{π/2}·CR_{−π/2}`
    pub product: ComplexMatrix,
    /// `φ` with `product = e^{iφ}·CNOT`.
    pub phase: f64,
    /// `min_φ ‖product − e^{iφ}·CNOT‖_max`
    pub distance: f64,
}

/// Multiplies the three rotations and reports the global phase relating them to CNOT.
pub fn cnot_from_cr() -> Result<CnotReport> {
    let product = generator_exp(Pauli::Z, Pauli::I, PI / 2.0)
        .matmul(&generator_exp(Pauli::I, Pauli::X, PI / 2.0))
        .matmul(&cr_target(-PI / 2.0));
    let (distance, phase) = product.phase_distance(&cnot());
    if distance > 1e-10 {
        return Err(Error::Numerical(format!(
            "rotation product is {distance:e} away from CNOT up to phase"
        )));
    }
    Ok(CnotReport {
        product,
        phase,
        distance,
    })
}

/// `R_X(θ)` on the control: `exp(−iθ/2·X⊗I)`.
pub fn control_rx(theta: f64) -> ComplexMatrix {
    generator_exp(Pauli::X, Pauli::I, theta)
}

#[derive(Debug, Clone)]
pub enum PiPulse {
    /// Instantaneous `exp(∓iπ/2·X⊗I)`.
    Ideal,
    /// Finite pulse on the control line, `H = (I(t)·X⊗I + Q(t)·Y⊗I)/2`; rescaled to area `π`.
    Shaped(Envelope),
}

fn pi_segment(pulse: &PiPulse, sign: f64) -> Result<Segment> {
    let label = if sign > 0.0 { "rx(pi)" } else { "rx(-pi)" };
    match pulse {
        PiPulse::Ideal => Ok(Segment {
            label: label.into(),
            kind: SegmentKind::Instant {
                unitary: control_rx(sign * PI),
            },
            lines: vec![DriveLine {
                name: "control",
                envelope: ComplexEnvelope::from_samples(
                    1.0,
                    vec![Complex64::new(sign * PI, 0.0); 2],
                )?,
            }],
        }),
        PiPulse::Shaped(env) => {
            let env = env.scaled_to_area(PI)?.scaled(sign).as_complex();
            let mut h = TimeDependentHamiltonian::new(4);
            // (I·X + Q·Y)/2 = ((I + iQ)/2)·σ⁺ + h.c. on the control
            let e = env.clone();
            h.add_complex(
                ops::transition(2, 0, 1).kron(&ComplexMatrix::identity(2)),
                move |t| e.value(t) / 2.0,
            )?;
            Ok(Segment {
                label: label.into(),
                kind: SegmentKind::Evolution {
                    model: h,
                    duration: env.duration(),
                    steps: None,
                },
                lines: vec![DriveLine {
                    name: "control",
                    envelope: env,
                }],
            })
        }
    }
}

fn constant_line(name: &'static str, value: Complex64, duration: f64) -> Result<DriveLine> {
    Ok(DriveLine {
        name,
        envelope: ComplexEnvelope::from_samples(duration, vec![value; 2])?,
    })
}

fn cr_segment(c: &CrCoefficients, sign: i8, tau: f64, cancel: Complex64) -> Result<Segment> {
    let mut lines = vec![constant_line(
        "control",
        Complex64::new(sign as f64, 0.0),
        tau,
    )?];
    if cancel != ZERO {
        lines.push(constant_line("target", cancel * sign as f64, tau)?);
    }
    Ok(Segment {
        label: if sign > 0 {
            "cr(+)".into()
        } else {
            "cr(-)".into()
        },
        kind: SegmentKind::Evolution {
            model: cr_effective(c, sign)?,
            duration: tau,
            steps: None,
        },
        lines,
    })
}

/// `R_X(−π)·U_CR(−Ω, τ)·R_X(π)·U_CR(Ω, τ)` with `τ` the duration of each CR half.
pub fn echo_sequence(c: &CrCoefficients, tau: f64, pi_pulse: &PiPulse) -> Result<GateSchedule> {
    echo_with_cancel(c, tau, pi_pulse, ZERO)
}

fn echo_with_cancel(
    c: &CrCoefficients,
    tau: f64,
    pi_pulse: &PiPulse,
    cancel: Complex64,
) -> Result<GateSchedule> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", "must be positive"));
    }
    Ok(GateSchedule {
        segments: vec![
            cr_segment(c, 1, tau, cancel)?,
            pi_segment(pi_pulse, 1.0)?,
            cr_segment(c, -1, tau, cancel)?,
            pi_segment(pi_pulse, -1.0)?,
        ],
    })
}

/// Adds a target drive `a·(cos φ·I⊗X + sin φ·I⊗Y)/2` to the CR model.
pub fn with_cancellation(c: &CrCoefficients, cancel_amp: f64, cancel_phase: f64) -> CrCoefficients {
    CrCoefficients {
        w_ix: c.w_ix + cancel_amp * cancel_phase.cos(),
        w_iy: c.w_iy + cancel_amp * cancel_phase.sin(),
        ..*c
    }
}

/// Echo whose CR halves also drive the target with `a·(cos φ·I⊗X + sin φ·I⊗Y)/2`; the
/// cancellation tone follows the sign of the CR drive.
pub fn active_cancellation_schedule(
    c: &CrCoefficients,
    cancel_amp: f64,
    cancel_phase: f64,
    tau: f64,
) -> Result<GateSchedule> {
    echo_with_cancel(
        &with_cancellation(c, cancel_amp, cancel_phase),
        tau,
        &PiPulse::Ideal,
        Complex64::from_polar(cancel_amp, cancel_phase),
    )
}

/// How a time-dependent CR drive `Ω(t)` maps onto the effective Pauli rates.
///
/// With `r = Ω(t)/reference_amplitude`, the linear terms follow `r` as complex
/// amplitudes (`Re(r·(w_ix + i·w_iy))` on `IX`, the imaginary part on `IY`, likewise for
/// `ZX`/`ZY`), `ZI` follows `|r|²`, and `IZ`, `ZZ` are static.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrDriveMapping {
    pub coefficients: CrCoefficients,
    pub reference_amplitude: f64,
}

/// Target-qubit cancellation tone of a CR schedule: `cancel_amp·shape(t)·e^{iφ}`, where
/// the shape is the CR base normalised to unit peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancelPulse {
    pub amp: f64,
    pub phase: f64,
    /// DRAG detuning of the target; `None` for a plain tone.
    pub drag_delta: Option<f64>,
}

fn cr_drive_model(
    drive: &ComplexEnvelope,
    mapping: &CrDriveMapping,
    cancel: &ComplexEnvelope,
    detuning: f64,
) -> Result<TimeDependentHamiltonian> {
    if !(mapping.reference_amplitude > 0.0) {
        return Err(Error::invalid("reference_amplitude", "must be positive"));
    }
    let c = mapping.coefficients;
    let up_t = ComplexMatrix::identity(2).kron(&ops::transition(2, 0, 1));
    let z_up_t = ops::pauli_z().kron(&ops::transition(2, 0, 1));
    let mut h = TimeDependentHamiltonian::new(4);
    let rho_i = Complex64::new(c.w_ix, c.w_iy);
    let rho_z = Complex64::new(c.w_zx, c.w_zy);
    let reference = mapping.reference_amplitude;
    // (Re v·X + Im v·Y)/2 = (v/2)·σ⁺ + h.c.
    let d = drive.clone();
    let k = cancel.clone();
    h.add_complex(up_t, move |t| {
        (d.value(t) / reference * rho_i + k.value(t)) / 2.0
    })?;
    let d = drive.clone();
    h.add_complex(z_up_t, move |t| d.value(t) / reference * rho_z / 2.0)?;
    let d = drive.clone();
    h.add_real(pauli_product(Pauli::Z, Pauli::I), move |t| {
        c.w_zi * (d.value(t) / reference).norm_sqr() / 2.0
    })?;
    if c.w_iz != 0.0 || detuning != 0.0 {
        h.add_constant(pauli_product(Pauli::I, Pauli::Z), (c.w_iz - detuning) / 2.0)?;
    }
    if c.w_zz != 0.0 {
        h.add_constant(pauli_product(Pauli::Z, Pauli::Z), c.w_zz / 2.0)?;
    }
    Ok(h)
}

fn cancel_envelope(base: &Envelope, cancel: &CancelPulse) -> Result<ComplexEnvelope> {
    let peak = base.peak();
    let shape = if peak > 0.0 {
        base.scaled(cancel.amp / peak)
    } else {
        base.clone()
    };
    let shape = match cancel.drag_delta {
        Some(delta) => drag_quadrature(&shape, delta)?,
        None => shape,
    };
    Ok(shape.as_complex().with_added_phase(-cancel.phase))
}

fn single_cr_schedule(
    label: &str,
    drive: ComplexEnvelope,
    mapping: &CrDriveMapping,
    cancel: ComplexEnvelope,
    detuning: f64,
) -> Result<GateSchedule> {
    let model = cr_drive_model(&drive, mapping, &cancel, detuning)?;
    Ok(GateSchedule {
        segments: vec![Segment {
            label: label.into(),
            kind: SegmentKind::Evolution {
                model,
                duration: drive.duration(),
                steps: None,
            },
            lines: vec![
                DriveLine {
                    name: "control",
                    envelope: drive,
                },
                DriveLine {
                    name: "target",
                    envelope: cancel,
                },
            ],
        }],
    })
}

/// CR drive shaped by the recursive DRAG construction on `base`, with a DRAG-corrected
/// cancellation tone on the target and an optional CR-drive detuning (adds `−δ·I⊗Z/2`).
pub fn multiderivative_cr_schedule(
    base: &Envelope,
    detunings: (f64, f64, f64),
    mapping: &CrDriveMapping,
    cancel: &CancelPulse,
    cr_detuning: f64,
) -> Result<GateSchedule> {
    let (d10, d21, d20) = detunings;
    let drive = recursive_drag_cr(base, d10, d21, d20)?;
    single_cr_schedule(
        "cr(multi-derivative)",
        drive,
        mapping,
        cancel_envelope(base, cancel)?,
        cr_detuning,
    )
}

/// The same schedule with the bare flat-top drive and a plain cancellation tone.
pub fn flat_top_cr_schedule(
    base: &Envelope,
    mapping: &CrDriveMapping,
    cancel: &CancelPulse,
    cr_detuning: f64,
) -> Result<GateSchedule> {
    let plain = CancelPulse {
        drag_delta: None,
        ..*cancel
    };
    single_cr_schedule(
        "cr(flat-top)",
        base.as_complex(),
        mapping,
        cancel_envelope(base, &plain)?,
        cr_detuning,
    )
}

/// `[U(τ), X⊗I, U(τ), X⊗I]` under `H = J·Z⊗Z`, with `X⊗I` the ideal control `R_X(π)`.
pub fn idle_zz_echo(j: f64, tau: f64) -> Result<GateSchedule> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", "must be positive"));
    }
    let mut h = TimeDependentHamiltonian::new(4);
    h.add_constant(pauli_product(Pauli::Z, Pauli::Z), j)?;
    let idle = |k: usize| -> Result<Segment> {
        Ok(Segment {
            label: format!("idle {k}"),
            kind: SegmentKind::Evolution {
                model: h.clone(),
                duration: tau,
                steps: None,
            },
            lines: Vec::new(),
        })
    };
    let flip = || Segment {
        label: "rx(pi)".into(),
        kind: SegmentKind::Instant {
            unitary: control_rx(PI),
        },
        lines: Vec::new(),
    };
    Ok(GateSchedule {
        segments: vec![idle(1)?, flip(), idle(2)?, flip()],
    })
}

/// `exp(−i·t·J·Z⊗Z)`
pub fn zz_evolution(j: f64, t: f64) -> Result<ComplexMatrix> {
    expm_hermitian_generator(&pauli_product(Pauli::Z, Pauli::Z).scale_real(j), t)
}

/// `(|00⟩ + |11⟩)/√2` and `(|00⟩ + |01⟩)/√2` in control-major order.
pub fn zz_probe_states() -> (Vec<Complex64>, Vec<Complex64>) {
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    (vec![s, ZERO, ZERO, s], vec![s, s, ZERO, ZERO])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{make_default_gaussian, make_flat_top_gaussian_with};
    use crate::numkit::pauli_decompose;

    #[test]
    fn cr_target_values() {
        assert!(cr_target(0.0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let zx = pauli_product(Pauli::Z, Pauli::X);
        assert!(cr_target(PI).max_abs_diff(&zx.scale(-I)) < 1e-15);
        let oracle = expm_hermitian_generator(&zx.scale_real(0.5), 0.77).unwrap();
        assert!(cr_target(0.77).max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn cnot_product_and_phase() {
        let r = cnot_from_cr().unwrap();
        assert!(r.distance < 1e-12);
        assert!((r.product[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((r.phase + PI / 4.0).abs() < 1e-12, "{}", r.phase);
    }

    #[test]
    fn echo_isolates_zx() {
        let c = CrCoefficients {
            w_ix: 0.13,
            w_zi: -0.4,
            w_zx: 0.07,
            ..CrCoefficients::default()
        };
        let tau = 3.3;
        let u = echo_sequence(&c, tau, &PiPulse::Ideal)
            .unwrap()
            .total_unitary()
            .unwrap();
        let oracle =
            expm_hermitian_generator(&pauli_product(Pauli::Z, Pauli::X).scale_real(c.w_zx), tau)
                .unwrap();
        assert!(u.max_abs_diff(&oracle) < 1e-10);
        let zero = echo_sequence(&CrCoefficients::default(), 1.0, &PiPulse::Ideal).unwrap();
        assert!(
            zero.total_unitary()
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(4))
                < 1e-12
        );
    }

    #[test]
    fn shaped_pi_pulses_approximate_ideal_echo() {
        let c = CrCoefficients::zx(0.05);
        let shaped = PiPulse::Shaped(make_default_gaussian(1.0, 2.0).unwrap());
        let u = echo_sequence(&c, 5.0, &shaped)
            .unwrap()
            .total_unitary()
            .unwrap();
        let ideal = echo_sequence(&c, 5.0, &PiPulse::Ideal)
            .unwrap()
            .total_unitary()
            .unwrap();
        assert!(u.phase_distance(&ideal).0 < 1e-6);
    }

    #[test]
    fn cancellation_nulls_ix_in_each_half() {
        let c = CrCoefficients {
            w_ix: 0.02,
            w_zx: 0.05,
            ..CrCoefficients::default()
        };
        let s = active_cancellation_schedule(&c, 0.02, PI, 2.0).unwrap();
        for seg in [&s.segments[0], &s.segments[2]] {
            if let SegmentKind::Evolution { model, .. } = &seg.kind {
                let p = pauli_decompose(&model.evaluate(0.0)).unwrap();
                assert!(p.get(Pauli::I, Pauli::X).abs() < 1e-15);
            }
        }
        let plain = echo_sequence(&c, 2.0, &PiPulse::Ideal)
            .unwrap()
            .total_unitary()
            .unwrap();
        let zero = active_cancellation_schedule(&c, 0.0, 0.3, 2.0)
            .unwrap()
            .total_unitary()
            .unwrap();
        assert!(plain.max_abs_diff(&zero) < 1e-15);
    }

    fn mapping() -> CrDriveMapping {
        CrDriveMapping {
            coefficients: CrCoefficients {
                w_ix: 0.004,
                w_zx: 0.01,
                w_zi: 0.02,
                ..CrCoefficients::default()
            },
            reference_amplitude: 0.1,
        }
    }

    #[test]
    fn multiderivative_zero_base_is_identity() {
        let base = make_flat_top_gaussian_with(0.0, 4.0, 28.0, 20.0, false).unwrap();
        let cancel = CancelPulse {
            amp: 0.004,
            phase: PI,
            drag_delta: Some(-2.0),
        };
        let s = multiderivative_cr_schedule(&base, (-2.0, -1.7, -3.7), &mapping(), &cancel, 0.0)
            .unwrap();
        assert!(
            s.total_unitary()
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(4))
                < 1e-15
        );
    }

    #[test]
    fn multiderivative_plateau_matches_flat_top() {
        let base = make_flat_top_gaussian_with(0.1, 4.0, 28.0, 40.0, false).unwrap();
        let cancel = CancelPulse {
            amp: 0.004,
            phase: PI,
            drag_delta: Some(-2.0),
        };
        let a = multiderivative_cr_schedule(&base, (-2.0, -1.7, -3.7), &mapping(), &cancel, 0.0)
            .unwrap();
        let b = flat_top_cr_schedule(&base, &mapping(), &cancel, 0.0).unwrap();
        let model = |s: &GateSchedule| match &s.segments[0].kind {
            SegmentKind::Evolution { model, .. } => model.clone(),
            _ => unreachable!(),
        };
        for t in [30.0, 48.0, 66.0] {
            assert!(model(&a).evaluate(t).max_abs_diff(&model(&b).evaluate(t)) < 1e-15);
        }
        let short = make_flat_top_gaussian_with(0.1, 10.0 / 8.0, 10.0, 40.0, false).unwrap();
        let c = multiderivative_cr_schedule(&short, (-2.0, -1.7, -3.7), &mapping(), &cancel, 0.0)
            .unwrap();
        assert!((a.duration() - c.duration() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn idle_echo_is_identity_up_to_phase() {
        let s = idle_zz_echo(0.013, 17.0).unwrap();
        let u = s.total_unitary().unwrap();
        let (dist, phase) = u.phase_distance(&ComplexMatrix::identity(4));
        assert!(dist < 1e-12);
        assert!((phase.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn timeline_has_one_block_per_line() {
        let s = echo_sequence(&CrCoefficients::zx(0.1), 2.0, &PiPulse::Ideal).unwrap();
        let csv = s.timeline_csv(5);
        assert_eq!(csv.lines().count(), 1 + 5 + 1 + 5 + 1);
    }
}
