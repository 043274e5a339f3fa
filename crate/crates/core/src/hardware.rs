//! Signal chain between an ideal envelope and the qubit: DAC sampling and hold, IQ mixer
//! skew, up-conversion, frame (virtual Z) updates and local-oscillator frequency noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::envelope::{ComplexEnvelope, Envelope};
use crate::error::{Error, Result};
use crate::hamiltonian::lo_noise_qubit;
use crate::io::CsvTable;
use crate::propagate::{propagate, InitialState};
use crate::spectral::{dft_spectrum, spectral_fwhm, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpconversionPath {
    /// Baseband held by the DAC, then mixed in an analog IQ mixer.
    AnalogIq,
    /// Baseband interpolated and mixed digitally before a single fast DAC.
    Duc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalChainConfig {
    pub fs: f64,
    /// Angular LO frequency.
    pub lo_freq: f64,
    pub iq_skew: f64,
    pub gain_imbalance: f64,
    /// White frequency-noise strength (rad per √time).
    pub lo_noise_sigma: f64,
    pub seed: u64,
    pub path: UpconversionPath,
}

impl Default for SignalChainConfig {
    fn default() -> Self {
        Self {
            fs: 1.0,
            lo_freq: 0.0,
            iq_skew: 0.0,
            gain_imbalance: 1.0,
            lo_noise_sigma: 0.0,
            seed: 0,
            path: UpconversionPath::AnalogIq,
        }
    }
}

impl SignalChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0) {
            return Err(Error::invalid("fs", "sample rate must be positive"));
        }
        if !(self.gain_imbalance > 0.0) {
            return Err(Error::invalid("gain_imbalance", "must be positive"));
        }
        if !(self.lo_noise_sigma >= 0.0) {
            return Err(Error::invalid("lo_noise_sigma", "must be non-negative"));
        }
        Ok(())
    }
}

/// Uniform samples `values[n]` at `t = n·period`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub period: f64,
    pub values: Vec<f64>,
}

impl SampledWaveform {
    pub fn new(period: f64, values: Vec<f64>) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::invalid("period", "must be positive"));
        }
        Ok(Self { period, values })
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Columns `n, t, value`.
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["n", "t", "value"]);
        for (n, v) in self.values.iter().enumerate() {
            t.push(vec![n as f64, n as f64 * self.period, *v]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledIq {
    pub i: SampledWaveform,
    pub q: SampledWaveform,
    /// Set when the rate is below twice the envelope's spectral width.
    pub warning: Option<String>,
}

/// Two-sided FWHM of a real sample sequence, or `None` when no clean peak exists.
fn baseband_fwhm(values: &[f64], fs: f64) -> Option<f64> {
    let opts = SpectrumOptions {
        zero_pad: 16,
        ..SpectrumOptions::centered()
    };
    dft_spectrum(values, fs, &opts)
        .ok()
        .and_then(|s| spectral_fwhm(&s).ok())
}

/// Samples `I` and `Q` at `t_n = n/fs` over `[0, T]`.
pub fn sample_and_hold(env: &ComplexEnvelope, fs: f64) -> Result<SampledIq> {
    if !(fs > 0.0) {
        return Err(Error::invalid("fs", "sample rate must be positive"));
    }
    let n = (env.duration() * fs).floor() as usize + 1;
    if n < 8 {
        return Err(Error::invalid(
            "fs",
            format!("only {n} samples over the pulse; need at least 8"),
        ));
    }
    let (i, q): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|k| {
            let z = env.value(k as f64 / fs);
            (z.re, z.im)
        })
        .unzip();

    // Reference width from a dense resampling of the envelope.
    let dense_rate = (fs * 8.0).max(256.0 / env.duration());
    let dense: Vec<f64> = (0..=((env.duration() * dense_rate) as usize))
        .map(|k| env.value(k as f64 / dense_rate).re)
        .collect();
    let warning = baseband_fwhm(&dense, dense_rate).and_then(|w| {
        (fs < 2.0 * w).then(|| {
            format!(
                "sample rate {fs} is below twice the envelope's spectral width {w}: the samples \
                 no longer determine the waveform (Nyquist)"
            )
        })
    });
    Ok(SampledIq {
        i: SampledWaveform::new(1.0 / fs, i)?,
        q: SampledWaveform::new(1.0 / fs, q)?,
        warning,
    })
}

fn check_same_grid(a: &SampledWaveform, b: &SampledWaveform) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if (a.period - b.period).abs() > 1e-12 * a.period {
        return Err(Error::invalid(
            "period",
            "I and Q must share a sample period",
        ));
    }
    Ok(())
}

/// Mixer with quadrature skew `phi` and gain mismatch on the Q arm:
/// `I' = I − g·Q·sin φ`, `Q' = g·Q·cos φ`.
pub fn apply_iq_skew(
    i: &SampledWaveform,
    q: &SampledWaveform,
    phi: f64,
    gain: f64,
) -> Result<(SampledWaveform, SampledWaveform)> {
    check_same_grid(i, q)?;
    if phi == 0.0 && gain == 1.0 {
        return Ok((i.clone(), q.clone()));
    }
    let (s, c) = phi.sin_cos();
    let ie = i
        .values
        .iter()
        .zip(&q.values)
        .map(|(a, b)| a - gain * b * s)
        .collect();
    let qe = q.values.iter().map(|b| gain * b * c).collect();
    Ok((
        SampledWaveform::new(i.period, ie)?,
        SampledWaveform::new(q.period, qe)?,
    ))
}

/// The envelope the qubit sees after sampling at `fs` and a skewed mixer, linearly
/// interpolated between samples.
pub fn skewed_envelope(
    env: &ComplexEnvelope,
    fs: f64,
    phi: f64,
    gain: f64,
) -> Result<ComplexEnvelope> {
    let s = sample_and_hold(env, fs)?;
    let (i, q) = apply_iq_skew(&s.i, &s.q, phi, gain)?;
    let values = i
        .values
        .iter()
        .zip(&q.values)
        .map(|(a, b)| Complex64::new(*a, *b))
        .collect();
    ComplexEnvelope::from_samples(1.0 / fs, values)
}

/// Staircase rendering of a DAC output: each sample repeated `oversample` times.
pub fn zero_order_hold(wave: &SampledWaveform, oversample: usize) -> Result<SampledWaveform> {
    if oversample == 0 {
        return Err(Error::invalid("oversample", "must be at least 1"));
    }
    let values = wave
        .values
        .iter()
        .flat_map(|v| std::iter::repeat_n(*v, oversample))
        .collect();
    SampledWaveform::new(wave.period / oversample as f64, values)
}

/// Magnitude response of an `L`-fold sample repeat at frequency `f`:
/// `|sin(πf/fs) / (L·sin(πf/(L·fs)))|`, which tends to `sinc(πf/fs)` as `L` grows.
pub fn hold_response(f: f64, fs: f64, oversample: usize) -> f64 {
    let l = oversample as f64;
    let den = l * (PI * f / (l * fs)).sin();
    if den.abs() < 1e-300 {
        1.0
    } else {
        ((PI * f / fs).sin() / den).abs()
    }
}

/// Band-limited (periodic sinc) interpolation by an integer factor.
fn fft_resample(values: &[f64], factor: usize) -> Vec<f64> {
    let n = values.len();
    let m = n * factor;
    let mut planner = FftPlanner::new();
    let mut spec: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut wide = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..n {
        if n % 2 == 0 && k == half {
            // Split the Nyquist bin between the two ends to keep the output real.
            wide[half] += spec[k] * 0.5;
            wide[m - half] += spec[k] * 0.5;
        } else if k < half || (n % 2 == 1 && k == half) {
            wide[k] = spec[k];
        } else {
            wide[m - (n - k)] = spec[k];
        }
    }
    planner.plan_fft_inverse(m).process(&mut wide);
    wide.iter().map(|z| z.re / n as f64).collect()
}

/// `S(t) = I(t)·cos(ω_LO t) − Q(t)·sin(ω_LO t)` on a grid at `fs_rf`, an integer multiple
/// of the baseband rate. The analog path holds each baseband sample; the DUC path
/// interpolates it band-limited.
pub fn upconvert(
    i: &SampledWaveform,
    q: &SampledWaveform,
    lo_freq: f64,
    fs_rf: f64,
    path: UpconversionPath,
) -> Result<SampledWaveform> {
    check_same_grid(i, q)?;
    let ratio = fs_rf * i.period;
    let factor = ratio.round() as usize;
    if factor < 1 || (ratio - factor as f64).abs() > 1e-9 * ratio {
        return Err(Error::invalid(
            "fs_rf",
            format!("output rate must be an integer multiple of the baseband rate, ratio {ratio}"),
        ));
    }
    let fs_in = i.rate();
    let bandwidth = baseband_fwhm(&i.values, fs_in)
        .into_iter()
        .chain(baseband_fwhm(&q.values, fs_in))
        .fold(0.0, f64::max);
    let needed = 2.0 * (lo_freq.abs() / (2.0 * PI) + bandwidth);
    if fs_rf <= needed {
        return Err(Error::Nyquist {
            detail: format!(
                "output rate {fs_rf} must exceed {needed} for the carrier plus baseband"
            ),
        });
    }
    let (ib, qb) = match path {
        UpconversionPath::AnalogIq => (
            zero_order_hold(i, factor)?.values,
            zero_order_hold(q, factor)?.values,
        ),
        UpconversionPath::Duc => (
            fft_resample(&i.values, factor),
            fft_resample(&q.values, factor),
        ),
    };
    let h = 1.0 / fs_rf;
    let values = ib
        .iter()
        .zip(&qb)
        .enumerate()
        .map(|(n, (a, b))| {
            let (s, c) = (lo_freq * n as f64 * h).sin_cos();
            a * c - b * s
        })
        .collect();
    SampledWaveform::new(h, values)
}

/// Frame update: `value′(t) = value(t)·e^{−i·phase}`.
pub fn virtual_z(env: &ComplexEnvelope, phase: f64) -> ComplexEnvelope {
    env.with_added_phase(phase)
}

/// Ensemble-averaged coherence under white LO frequency noise.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingCurve {
    pub times: Vec<f64>,
    /// `|⟨ρ₀₁(t)⟩|` over the ensemble.
    pub coherence: Vec<f64>,
    /// `½·exp(−σ²t/2)`
    pub expected: Vec<f64>,
}

impl DephasingCurve {
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["t", "coherence", "expected"]);
        for k in 0..self.times.len() {
            t.push(vec![self.times[k], self.coherence[k], self.expected[k]]);
        }
        t
    }
}

/// Propagates `|+⟩` under `lo_noise_qubit` with `φ̇_N` drawn as i.i.d. normals of standard
/// deviation `σ/√h` per step. Member `k` uses a generator seeded with `seed + k`; members
/// run in parallel and are summed in index order, so the result does not depend on
/// scheduling.
pub fn lo_dephasing_run(
    env: &Envelope,
    noise_sigma: f64,
    seed: u64,
    duration: f64,
    steps: usize,
    ensemble: usize,
) -> Result<DephasingCurve> {
    if ensemble < 1 {
        return Err(Error::invalid("ensemble", "need at least one member"));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", "must be non-negative"));
    }
    let h = duration / steps as f64;
    let plus = InitialState::Vector(vec![Complex64::new(0.5f64.sqrt(), 0.0); 2]);
    let member = |k: usize| -> Result<(Vec<f64>, Vec<Complex64>)> {
        let noise: Vec<f64> = if noise_sigma == 0.0 {
            vec![0.0; steps]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let normal = Normal::new(0.0, noise_sigma / h.sqrt())
                .map_err(|e| Error::invalid("noise_sigma", e.to_string()))?;
            (0..steps).map(|_| normal.sample(&mut rng)).collect()
        };
        let model = lo_noise_qubit(
            env,
            |_| 0.0,
            move |t| noise[((t / h) as usize).min(steps - 1)],
            |_| 0.0,
        )?;
        let r = propagate(&model, duration, Some(steps), &plus)?;
        Ok((r.times, r.coherence01))
    };
    let runs: Vec<(Vec<f64>, Vec<Complex64>)> = (0..ensemble)
        .into_par_iter()
        .map(member)
        .collect::<Result<_>>()?;
    let times = runs[0].0.clone();
    let mut sum = vec![Complex64::new(0.0, 0.0); times.len()];
    for (_, c) in &runs {
        for (s, v) in sum.iter_mut().zip(c) {
            *s += v;
        }
    }
    let coherence = sum.iter().map(|s| s.norm() / ensemble as f64).collect();
    let expected = times
        .iter()
        .map(|t| 0.5 * (-noise_sigma * noise_sigma * t / 2.0).exp())
        .collect();
    Ok(DephasingCurve {
        times,
        coherence,
        expected,
    })
}
