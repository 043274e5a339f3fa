//! Pulse envelopes: the analytic shapes, DRAG quadratures, and the recursive
//! multi-derivative cross-resonance drive.
//!
//! Amplitudes are angular rates (rad per time unit). Every envelope is supported on
//! `[0, T]` and evaluates to zero outside it.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::io::CsvTable;
use crate::numkit::{quad_integrate, DEFAULT_PANELS, I, ZERO};

/// Value and first three time derivatives.
pub type Jet = [f64; 4];

const ZERO_JET: Jet = [0.0; 4];

/// In-phase shape of an envelope.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Zero,
    Square {
        a0: f64,
    },
    Triangular {
        a0: f64,
    },
    Gaussian {
        a0: f64,
        sigma: f64,
        lifted: bool,
    },
    /// Gaussian rise over `[0, ramp]`, plateau of length `hold`, mirrored fall.
    FlatTop {
        a0: f64,
        sigma: f64,
        ramp: f64,
        hold: f64,
        lifted: bool,
    },
    /// Uniform samples `values[n]` at `t = n·period`, linearly interpolated.
    Sampled {
        period: f64,
        values: Arc<[f64]>,
    },
}

/// Quadrature channel of an envelope.
#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    None,
    /// `Q(t) = −İ(t)/delta`, evaluated from the analytic derivative.
    Drag {
        delta: f64,
    },
    Sampled {
        period: f64,
        values: Arc<[f64]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    duration: f64,
    shape: Shape,
    quadrature: Quadrature,
}

fn check_duration(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "T",
            format!("duration must be positive, got {t}"),
        ))
    }
}

pub fn make_square(a0: f64, duration: f64) -> Result<Envelope> {
    check_duration(duration)?;
    Ok(Envelope::new(duration, Shape::Square { a0 }))
}

pub fn make_triangular(a0: f64, duration: f64) -> Result<Envelope> {
    check_duration(duration)?;
    Ok(Envelope::new(duration, Shape::Triangular { a0 }))
}

/// Gaussian centred at `T/2`. With `lifted`, the edge value is subtracted and the result
/// rescaled so `I(0) = I(T) = 0` and the peak stays `a0`.
pub fn make_gaussian(a0: f64, sigma: f64, duration: f64, lifted: bool) -> Result<Envelope> {
    check_duration(duration)?;
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", "width must be positive"));
    }
    if lifted && 1.0 - gauss(duration / 2.0, sigma) < 1e-12 {
        return Err(Error::invalid(
            "sigma",
            "too wide for the duration: lifting would divide by zero",
        ));
    }
    Ok(Envelope::new(
        duration,
        Shape::Gaussian { a0, sigma, lifted },
    ))
}

/// Lifted Gaussian of the conventional duration `4σ`.
pub fn make_default_gaussian(a0: f64, sigma: f64) -> Result<Envelope> {
    make_gaussian(a0, sigma, 4.0 * sigma, true)
}

/// Flat-top Gaussian with lifted ramps, so the pulse starts and ends at exactly zero.
pub fn make_flat_top_gaussian(a0: f64, sigma: f64, ramp: f64, hold: f64) -> Result<Envelope> {
    make_flat_top_gaussian_with(a0, sigma, ramp, hold, true)
}

/// Flat-top Gaussian; `lifted = false` keeps the bare Gaussian tails, whose edge value is
/// `a0·exp(−ramp²/2σ²)`.
pub fn make_flat_top_gaussian_with(
    a0: f64,
    sigma: f64,
    ramp: f64,
    hold: f64,
    lifted: bool,
) -> Result<Envelope> {
    if !(ramp >= 0.0) || !(hold >= 0.0) {
        return Err(Error::invalid(
            "ramp/hold",
            "durations must be non-negative",
        ));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", "width must be positive"));
    }
    check_duration(2.0 * ramp + hold)?;
    if lifted && ramp > 0.0 && 1.0 - gauss(ramp, sigma) < 1e-12 {
        return Err(Error::invalid(
            "sigma",
            "too wide for the ramp: lifting would divide by zero",
        ));
    }
    Ok(Envelope::new(
        2.0 * ramp + hold,
        Shape::FlatTop {
            a0,
            sigma,
            ramp,
            hold,
            lifted,
        },
    ))
}

/// Envelope from uniform in-phase samples; the duration is `(len − 1)·period`.
pub fn make_sampled(period: f64, values: Vec<f64>) -> Result<Envelope> {
    if !(period > 0.0) {
        return Err(Error::invalid("period", "sample period must be positive"));
    }
    if values.len() < 3 {
        return Err(Error::invalid("values", "need at least three samples"));
    }
    let duration = period * (values.len() - 1) as f64;
    Ok(Envelope::new(
        duration,
        Shape::Sampled {
            period,
            values: values.into(),
        },
    ))
}

pub fn make_zero(duration: f64) -> Result<Envelope> {
    check_duration(duration)?;
    Ok(Envelope::new(duration, Shape::Zero))
}

/// Adds the DRAG quadrature `Q = −İ/delta`.
///
/// Analytic shapes keep an exact derivative; sampled shapes use second-order central
/// differences with one-sided second-order stencils at the ends.
pub fn drag_quadrature(env: &Envelope, delta: f64) -> Result<Envelope> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::invalid(
            "delta",
            "DRAG detuning must be finite and non-zero (division by zero)",
        ));
    }
    if env.quadrature != Quadrature::None {
        return Err(Error::invalid(
            "env",
            "envelope already carries a quadrature",
        ));
    }
    let quadrature = match &env.shape {
        Shape::Sampled { period, values } => {
            let d = central_difference(values, *period);
            Quadrature::Sampled {
                period: *period,
                values: d.into_iter().map(|x| -x / delta).collect(),
            }
        }
        _ => Quadrature::Drag { delta },
    };
    Ok(Envelope {
        quadrature,
        ..env.clone()
    })
}

fn central_difference(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|k| {
            if k == 0 {
                (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h)
            } else {
                (y[k + 1] - y[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

fn gauss(u: f64, sigma: f64) -> f64 {
    (-u * u / (2.0 * sigma * sigma)).exp()
}

/// Jet of `exp(−u²/2σ²)` in `u`.
fn gauss_jet(u: f64, sigma: f64) -> Jet {
    let s2 = sigma * sigma;
    let g = gauss(u, sigma);
    [
        g,
        -u / s2 * g,
        (u * u / (s2 * s2) - 1.0 / s2) * g,
        (-u * u * u / (s2 * s2 * s2) + 3.0 * u / (s2 * s2)) * g,
    ]
}

fn scale_jet(j: Jet, s: f64) -> Jet {
    [j[0] * s, j[1] * s, j[2] * s, j[3] * s]
}

fn interp(values: &[f64], period: f64, t: f64) -> f64 {
    let x = t / period;
    let k = (x.floor() as usize).min(values.len() - 2);
    let frac = x - k as f64;
    values[k] * (1.0 - frac) + values[k + 1] * frac
}

impl Shape {
    fn jet(&self, t: f64, duration: f64) -> Jet {
        match self {
            Shape::Zero => ZERO_JET,
            Shape::Square { a0 } => [*a0, 0.0, 0.0, 0.0],
            Shape::Triangular { a0 } => {
                let slope = 2.0 * a0 / duration;
                if t <= duration / 2.0 {
                    [slope * t, slope, 0.0, 0.0]
                } else {
                    [slope * (duration - t), -slope, 0.0, 0.0]
                }
            }
            Shape::Gaussian { a0, sigma, lifted } => {
                let j = gauss_jet(t - duration / 2.0, *sigma);
                if *lifted {
                    let edge = gauss(duration / 2.0, *sigma);
                    let mut j = scale_jet(j, a0 / (1.0 - edge));
                    j[0] -= a0 * edge / (1.0 - edge);
                    j
                } else {
                    scale_jet(j, *a0)
                }
            }
            Shape::FlatTop {
                a0,
                sigma,
                ramp,
                hold,
                lifted,
            } => {
                let u = if t < *ramp {
                    t - ramp
                } else if t > ramp + hold {
                    t - ramp - hold
                } else {
                    return [*a0, 0.0, 0.0, 0.0];
                };
                let j = gauss_jet(u, *sigma);
                if *lifted {
                    let edge = gauss(*ramp, *sigma);
                    let mut j = scale_jet(j, a0 / (1.0 - edge));
                    j[0] -= a0 * edge / (1.0 - edge);
                    j
                } else {
                    scale_jet(j, *a0)
                }
            }
            Shape::Sampled { period, values } => {
                let x = t / period;
                let k = (x.floor() as usize).min(values.len() - 2);
                let slope = (values[k + 1] - values[k]) / period;
                [interp(values, *period, t), slope, 0.0, 0.0]
            }
        }
    }

    fn is_analytic(&self) -> bool {
        !matches!(self, Shape::Sampled { .. })
    }
}

impl Envelope {
    fn new(duration: f64, shape: Shape) -> Self {
        Self {
            duration,
            shape,
            quadrature: Quadrature::None,
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn has_quadrature(&self) -> bool {
        self.quadrature != Quadrature::None
    }

    fn contains(&self, t: f64) -> bool {
        (0.0..=self.duration).contains(&t)
    }

    /// `I(t)` and its first three derivatives; zero outside `[0, T]`.
    pub fn in_phase_jet(&self, t: f64) -> Jet {
        if self.contains(t) {
            self.shape.jet(t, self.duration)
        } else {
            ZERO_JET
        }
    }

    pub fn in_phase(&self, t: f64) -> f64 {
        self.in_phase_jet(t)[0]
    }

    pub fn in_phase_derivative(&self, t: f64) -> f64 {
        self.in_phase_jet(t)[1]
    }

    pub fn quadrature_at(&self, t: f64) -> f64 {
        if !self.contains(t) {
            return 0.0;
        }
        match &self.quadrature {
            Quadrature::None => 0.0,
            Quadrature::Drag { delta } => -self.shape.jet(t, self.duration)[1] / delta,
            Quadrature::Sampled { period, values } => interp(values, *period, t),
        }
    }

    /// `I(t) + i·Q(t)`
    pub fn value(&self, t: f64) -> Complex64 {
        Complex64::new(self.in_phase(t), self.quadrature_at(t))
    }

    /// Times where the shape is only piecewise smooth (including the ends).
    pub fn breakpoints(&self) -> Vec<f64> {
        let t = self.duration;
        match &self.shape {
            Shape::Triangular { .. } => vec![0.0, t / 2.0, t],
            Shape::FlatTop { ramp, hold, .. } => {
                let mut b = vec![0.0];
                if *ramp > 0.0 {
                    b.push(*ramp);
                }
                if *hold > 0.0 {
                    b.push(ramp + hold);
                }
                b.push(t);
                b
            }
            Shape::Sampled { period, values } => {
                (0..values.len()).map(|k| k as f64 * period).collect()
            }
            _ => vec![0.0, t],
        }
    }

    /// Integrates `f` over `[0, T]`, splitting at the shape's breakpoints.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, panels: usize) -> f64 {
        let b = self.breakpoints();
        // Sampled shapes are piecewise linear: one panel per segment is exact.
        let per_piece = if matches!(self.shape, Shape::Sampled { .. }) {
            1
        } else {
            panels
        };
        b.windows(2)
            .map(|w| quad_integrate(&mut f, w[0], w[1], per_piece).expect("ordered breakpoints"))
            .sum()
    }

    /// `∫ I dt` over the support.
    pub fn area(&self) -> f64 {
        self.integrate(|t| self.in_phase(t), DEFAULT_PANELS)
    }

    /// `∫ Q dt` over the support.
    pub fn quadrature_area(&self) -> f64 {
        self.integrate(|t| self.quadrature_at(t), DEFAULT_PANELS)
    }

    pub fn peak(&self) -> f64 {
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Square { a0 }
            | Shape::Triangular { a0 }
            | Shape::Gaussian { a0, .. }
            | Shape::FlatTop { a0, .. } => a0.abs(),
            Shape::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Same envelope with both channels multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Envelope {
        let shape = match &self.shape {
            Shape::Zero => Shape::Zero,
            Shape::Square { a0 } => Shape::Square { a0: a0 * factor },
            Shape::Triangular { a0 } => Shape::Triangular { a0: a0 * factor },
            Shape::Gaussian { a0, sigma, lifted } => Shape::Gaussian {
                a0: a0 * factor,
                sigma: *sigma,
                lifted: *lifted,
            },
            Shape::FlatTop {
                a0,
                sigma,
                ramp,
                hold,
                lifted,
            } => Shape::FlatTop {
                a0: a0 * factor,
                sigma: *sigma,
                ramp: *ramp,
                hold: *hold,
                lifted: *lifted,
            },
            Shape::Sampled { period, values } => Shape::Sampled {
                period: *period,
                values: values.iter().map(|v| v * factor).collect(),
            },
        };
        let quadrature = match &self.quadrature {
            Quadrature::Sampled { period, values } => Quadrature::Sampled {
                period: *period,
                values: values.iter().map(|v| v * factor).collect(),
            },
            q => q.clone(),
        };
        Envelope {
            duration: self.duration,
            shape,
            quadrature,
        }
    }

    /// Rescales so that `∫ I dt = target` (e.g. `π` for an X gate).
    pub fn scaled_to_area(&self, target: f64) -> Result<Envelope> {
        let a = self.area();
        if a.abs() < 1e-300 {
            return Err(Error::invalid(
                "env",
                "zero-area envelope cannot be rescaled",
            ));
        }
        Ok(self.scaled(target / a))
    }

    /// `n` uniform samples of `(t, I, Q)` spanning `[0, T]` inclusive.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let t = self.duration * k as f64 / (n - 1) as f64;
                (t, self.in_phase(t), self.quadrature_at(t))
            })
            .collect()
    }

    /// Columns `t, I, Q`.
    pub fn to_table(&self, n: usize) -> CsvTable {
        let mut table = CsvTable::new(["t", "I", "Q"]);
        for (t, i, q) in self.sample(n) {
            table.push(vec![t, i, q]);
        }
        table
    }

    pub fn as_complex(&self) -> ComplexEnvelope {
        ComplexEnvelope {
            duration: self.duration,
            source: ComplexSource::Iq(self.clone()),
            phase: 0.0,
        }
    }
}

/// Complex baseband `I(t) + i·Q(t)` with an optional frame phase.
#[derive(Debug, Clone)]
pub struct ComplexEnvelope {
    duration: f64,
    source: ComplexSource,
    /// Frame rotation: the stored value is multiplied by `e^{−i·phase}`.
    phase: f64,
}

#[derive(Debug, Clone)]
enum ComplexSource {
    Iq(Envelope),
    Recursive(RecursiveDrag),
    Sampled {
        period: f64,
        values: Arc<[Complex64]>,
    },
}

impl ComplexEnvelope {
    pub fn from_samples(period: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(period > 0.0) || values.len() < 2 {
            return Err(Error::invalid(
                "values",
                "need a positive period and at least two samples",
            ));
        }
        Ok(Self {
            duration: period * (values.len() - 1) as f64,
            source: ComplexSource::Sampled {
                period,
                values: values.into(),
            },
            phase: 0.0,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn frame_phase(&self) -> f64 {
        self.phase
    }

    pub fn value(&self, t: f64) -> Complex64 {
        if !(0.0..=self.duration).contains(&t) {
            return ZERO;
        }
        let raw = match &self.source {
            ComplexSource::Iq(env) => env.value(t),
            ComplexSource::Recursive(r) => r.levels(t).omega_cr,
            ComplexSource::Sampled { period, values } => {
                let x = t / period;
                let k = (x.floor() as usize).min(values.len() - 2);
                let frac = x - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
        };
        if self.phase == 0.0 {
            raw
        } else {
            raw * Complex64::from_polar(1.0, -self.phase)
        }
    }

    pub fn in_phase(&self, t: f64) -> f64 {
        self.value(t).re
    }

    pub fn quadrature(&self, t: f64) -> f64 {
        self.value(t).im
    }

    /// Same waveform with the frame advanced by `phase` radians.
    pub fn with_added_phase(&self, phase: f64) -> Self {
        Self {
            phase: self.phase + phase,
            ..self.clone()
        }
    }

    /// The recursive DRAG construction behind this envelope, if any.
    pub fn recursive(&self) -> Option<&RecursiveDrag> {
        match &self.source {
            ComplexSource::Recursive(r) => Some(r),
            _ => None,
        }
    }

    pub fn sample(&self, n: usize) -> Vec<(f64, Complex64)> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let t = self.duration * k as f64 / (n - 1) as f64;
                (t, self.value(t))
            })
            .collect()
    }

    pub fn to_table(&self, n: usize) -> CsvTable {
        let mut table = CsvTable::new(["t", "I", "Q"]);
        for (t, z) in self.sample(n) {
            table.push(vec![t, z.re, z.im]);
        }
        table
    }
}

/// The three stages of the recursive drive at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursiveLevels {
    pub omega3: f64,
    pub omega2: Complex64,
    pub omega1: Complex64,
    pub omega_cr: Complex64,
}

/// Multi-derivative DRAG: a two-photon square-root correction (0↔2) followed by two
/// nested derivative corrections (1↔2, then 0↔1).
#[derive(Debug, Clone)]
pub struct RecursiveDrag {
    base: Envelope,
    d10: f64,
    d21: f64,
    d20: f64,
}

type CJet = [Complex64; 4];

impl RecursiveDrag {
    pub fn base(&self) -> &Envelope {
        &self.base
    }

    pub fn detunings(&self) -> (f64, f64, f64) {
        (self.d10, self.d21, self.d20)
    }

    /// `Ω₂ = √(Ω₃² − 2iΩ₃Ω̇₃/Δ₂₀)`, `Ω₁ = Ω₂ − iΩ̇₂/Δ₂₁`, `Ω_CR = Ω₁ − iΩ̇₁/Δ₁₀`,
    /// evaluated with exact derivatives propagated through each stage.
    pub fn levels(&self, t: f64) -> RecursiveLevels {
        let f = self.base.in_phase_jet(t);
        // p = Ω₃² and its derivatives
        let p = [
            f[0] * f[0],
            2.0 * f[0] * f[1],
            2.0 * f[1] * f[1] + 2.0 * f[0] * f[2],
            6.0 * f[1] * f[2] + 2.0 * f[0] * f[3],
        ];
        // radicand R = p − (i/Δ₂₀)·p'
        let k = I / self.d20;
        let r: CJet = [p[0] - k * p[1], p[1] - k * p[2], p[2] - k * p[3], ZERO];
        let h0 = r[0].sqrt();
        if h0 == ZERO {
            return RecursiveLevels {
                omega3: f[0],
                omega2: ZERO,
                omega1: ZERO,
                omega_cr: ZERO,
            };
        }
        let h1 = r[1] / (2.0 * h0);
        let h2 = (r[2] - 2.0 * h1 * h1) / (2.0 * h0);
        let omega1 = h0 - I * h1 / self.d21;
        let omega1_dot = h1 - I * h2 / self.d21;
        RecursiveLevels {
            omega3: f[0],
            omega2: h0,
            omega1,
            omega_cr: omega1 - I * omega1_dot / self.d10,
        }
    }

    /// Largest sample-to-sample phase jump of `Ω₂` over `n` samples.
    pub fn max_phase_jump(&self, n: usize) -> f64 {
        let t_end = self.base.duration();
        let mut worst: f64 = 0.0;
        let mut prev: Option<Complex64> = None;
        for k in 0..n {
            let t = t_end * k as f64 / (n - 1) as f64;
            let w = self.levels(t).omega2;
            if let Some(p) = prev {
                if p.norm() > 0.0 && w.norm() > 0.0 {
                    worst = worst.max((w / p).arg().abs());
                }
            }
            prev = Some(w);
        }
        worst
    }
}

/// Recursive DRAG drive for the CR pulse built on the real envelope `base` (the flat-top
/// `Ω₃`).
///
/// `base` must be analytic, non-negative, and must vanish at both ends together with its
/// first two derivatives: the square-root stage behaves like `√t` next to a simple zero,
/// and the two derivative stages would then diverge at the edges.
pub fn recursive_drag_cr(base: &Envelope, d10: f64, d21: f64, d20: f64) -> Result<ComplexEnvelope> {
    for (name, d) in [("d10", d10), ("d21", d21), ("d20", d20)] {
        if d == 0.0 || !d.is_finite() {
            return Err(Error::invalid(name, "detuning must be finite and non-zero"));
        }
    }
    if !base.shape.is_analytic() || base.has_quadrature() {
        return Err(Error::invalid(
            "base",
            "recursive DRAG needs a real envelope with analytic backing",
        ));
    }
    let t_end = base.duration();
    let peak = base.peak();
    let lowest = (0..=2048)
        .map(|k| base.in_phase(t_end * k as f64 / 2048.0))
        .fold(f64::INFINITY, f64::min);
    if lowest < -1e-12 * peak.max(1.0) {
        return Err(Error::invalid(
            "base",
            format!("envelope must be non-negative, found {lowest}"),
        ));
    }
    for edge in [0.0, t_end] {
        let j = base.in_phase_jet(edge);
        if j[0].abs() > 1e-9 * peak {
            return Err(Error::invalid(
                "base",
                format!("must be zero at t = {edge}, found {}", j[0]),
            ));
        }
        for order in 1..=2 {
            if j[order].abs() * t_end.powi(order as i32) > 1e-6 * peak {
                return Err(Error::invalid(
                    "base",
                    format!(
                        "derivative {order} at t = {edge} is {:e}; the ramp must leave zero smoothly \
                         (use unlifted Gaussian tails several sigma long)",
                        j[order]
                    ),
                ));
            }
        }
    }
    let rec = RecursiveDrag {
        base: base.clone(),
        d10,
        d21,
        d20,
    };
    let jump = rec.max_phase_jump(4096);
    if jump > PI / 2.0 {
        return Err(Error::Numerical(format!(
            "square-root stage jumped by {jump} rad between samples"
        )));
    }
    Ok(ComplexEnvelope {
        duration: t_end,
        source: ComplexSource::Recursive(rec),
        phase: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn square_pulse_values_and_area() {
        let e = make_square(PI, 1.0).unwrap();
        assert_eq!(e.in_phase(0.5), PI);
        assert_eq!(e.in_phase(1.0 + 1e-9), 0.0);
        assert!((e.area() - PI).abs() < 1e-13);
        assert!(make_square(1.0, 0.0).is_err());
    }

    #[test]
    fn triangular_pulse_apex_edges_area() {
        let e = make_triangular(PI, 1.0).unwrap();
        assert!((e.in_phase(0.5) - PI).abs() < 1e-15);
        assert_eq!(e.in_phase(0.0), 0.0);
        assert!(e.in_phase(1.0).abs() < 1e-15);
        assert!((e.area() - PI / 2.0).abs() < 1e-13);
        assert!(make_triangular(1.0, -1.0).is_err());
    }

    #[test]
    fn lifted_gaussian_contract() {
        let e = make_gaussian(0.2, 6.5, 26.0, true).unwrap();
        assert!(e.in_phase(0.0).abs() < 1e-15);
        assert!(e.in_phase(26.0).abs() < 1e-15);
        assert!((e.in_phase(13.0) - 0.2).abs() < 1e-15);
        for x in [0.3, 2.0, 7.7, 12.9] {
            assert!((e.in_phase(13.0 - x) - e.in_phase(13.0 + x)).abs() < 1e-12);
        }
        let d = make_default_gaussian(1.0, 6.5).unwrap();
        assert_eq!(d.duration(), 26.0);
    }

    #[test]
    fn flat_top_contract() {
        let e = make_flat_top_gaussian(0.3, 4.0, 16.0, 40.0).unwrap();
        assert!(e.in_phase(0.0).abs() < 1e-15);
        assert!(e.in_phase(e.duration()).abs() < 1e-15);
        assert_eq!(e.in_phase(16.0 + 20.0), 0.3);
        // continuity at the plateau junctions
        assert!((e.in_phase(16.0 - 1e-9) - 0.3).abs() < 1e-9);
        assert!((e.in_phase(56.0 + 1e-9) - 0.3).abs() < 1e-9);

        let degenerate = make_flat_top_gaussian(0.3, 4.0, 16.0, 0.0).unwrap();
        let g = make_gaussian(0.3, 4.0, 32.0, true).unwrap();
        for k in 0..=64 {
            let t = 0.5 * k as f64;
            assert!((degenerate.in_phase(t) - g.in_phase(t)).abs() < 1e-14);
        }
        let long = make_flat_top_gaussian(0.3, 4.0, 28.0, 100.0).unwrap();
        let short = make_flat_top_gaussian(0.3, 4.0, 10.0, 100.0).unwrap();
        assert!((long.duration() - short.duration() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_gaussian_scaled_to_pi_area() {
        let e = make_default_gaussian(1.0, 6.5)
            .unwrap()
            .scaled_to_area(PI)
            .unwrap();
        // independent check at double the panel count
        let area = e.integrate(|t| e.in_phase(t), 2 * DEFAULT_PANELS);
        assert!((area - PI).abs() < 1e-9);
    }

    #[test]
    fn drag_quadrature_of_gaussian() {
        let e = make_default_gaussian(0.2, 6.5).unwrap();
        let d = drag_quadrature(&e, -2.8).unwrap();
        assert!(d.quadrature_at(13.0).abs() < 1e-15);
        for x in [0.5, 3.0, 9.0] {
            assert!((d.quadrature_at(13.0 - x) + d.quadrature_at(13.0 + x)).abs() < 1e-9);
        }
        let h = 1e-3;
        for k in 1..26 {
            let t = k as f64;
            let q_fd = -fd(|s| e.in_phase(s), t, h) / -2.8;
            assert!((d.quadrature_at(t) - q_fd).abs() < 1e-6);
        }
        assert!(drag_quadrature(&e, 0.0).is_err());
        assert!(drag_quadrature(&d, 1.0).is_err());
    }

    #[test]
    fn drag_quadrature_scales_inversely_with_detuning() {
        let e = make_default_gaussian(0.2, 6.5).unwrap();
        let a = drag_quadrature(&e, 1.5).unwrap();
        let b = drag_quadrature(&e, 3.0).unwrap();
        for k in 0..=26 {
            let t = k as f64;
            assert!((a.quadrature_at(t) - 2.0 * b.quadrature_at(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn sampled_drag_uses_second_order_differences() {
        let h = 0.01;
        let values: Vec<f64> = (0..=1000).map(|k| (k as f64 * h).sin()).collect();
        let e = make_sampled(h, values).unwrap();
        let d = drag_quadrature(&e, 2.0).unwrap();
        for t in [0.0, 3.0, 5.555, 10.0] {
            assert!((d.quadrature_at(t) + t.cos() / 2.0).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn recursive_drag_rejects_bad_bases() {
        let lifted = make_flat_top_gaussian(0.3, 4.0, 16.0, 40.0).unwrap();
        assert!(recursive_drag_cr(&lifted, 1.0, 1.0, 1.0).is_err());
        let smooth = make_flat_top_gaussian_with(0.3, 4.0, 28.0, 40.0, false).unwrap();
        assert!(recursive_drag_cr(&smooth, 0.0, 1.0, 1.0).is_err());
        assert!(recursive_drag_cr(&smooth.scaled(-1.0), 1.0, 1.0, 1.0).is_err());
        assert!(recursive_drag_cr(&smooth, -2.0, 1.5, -0.7).is_ok());
    }

    #[test]
    fn recursive_drag_of_zero_base_is_zero() {
        let z = make_zero(10.0).unwrap();
        let r = recursive_drag_cr(&z, 1.0, 2.0, 3.0).unwrap();
        for k in 0..=10 {
            assert_eq!(r.value(k as f64), ZERO);
        }
    }

    #[test]
    fn recursive_drag_reduces_to_plain_drag_for_far_levels() {
        let base = make_flat_top_gaussian_with(0.3, 4.0, 28.0, 20.0, false).unwrap();
        let d10 = -1.7;
        let r = recursive_drag_cr(&base, d10, 1e12, 1e12).unwrap();
        for k in 0..=76 {
            let t = k as f64;
            let expect = Complex64::new(base.in_phase(t), -base.in_phase_derivative(t) / d10);
            assert!((r.value(t) - expect).norm() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn complex_envelope_phase_rotation() {
        let e = make_square(1.0, 1.0).unwrap().as_complex();
        let r = e.with_added_phase(PI / 2.0);
        assert!((r.value(0.5) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }
}
