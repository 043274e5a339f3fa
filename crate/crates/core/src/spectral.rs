//! Magnitude spectra of envelopes and sampled signals, Nyquist images and DAC roll-off.
//!
//! Frequencies here are ordinary (cycles per time unit), not angular.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::io::CsvTable;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub resolution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Total length is `zero_pad × samples`.
    pub zero_pad: usize,
    /// Number of sampling zones `[k·fs, (k+1)·fs)` to report. Ignored when `centered`.
    pub zones: usize,
    pub window: Window,
    /// Report the two-sided band `[−fs/2, fs/2)` instead of `[0, zones·fs)`.
    pub centered: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            zero_pad: 8,
            zones: 1,
            window: Window::Rectangular,
            centered: false,
        }
    }
}

impl SpectrumOptions {
    pub fn unpadded() -> Self {
        Self {
            zero_pad: 1,
            ..Self::default()
        }
    }

    pub fn centered() -> Self {
        Self {
            centered: true,
            ..Self::default()
        }
    }
}

fn raw_dft(samples: &[f64], opts: &SpectrumOptions) -> Vec<Complex64> {
    let n = samples.len();
    let m = n * opts.zero_pad;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, x) in samples.iter().enumerate() {
        let w = match opts.window {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()),
        };
        buf[k] = Complex64::new(x * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf
}

/// `|X_d(f)|` with `X_d(f) = Σ x[n]·e^{−2πi·n·f/fs}` on the zero-padded grid.
pub fn dft_spectrum(samples: &[f64], fs: f64, opts: &SpectrumOptions) -> Result<Spectrum> {
    if samples.len() < 2 {
        return Err(Error::invalid("samples", "need at least two samples"));
    }
    if !(fs > 0.0) {
        return Err(Error::invalid("fs", "sample rate must be positive"));
    }
    if opts.zero_pad < 1 || (!opts.centered && opts.zones < 1) {
        return Err(Error::invalid(
            "options",
            "zero_pad and zones must be at least 1",
        ));
    }
    let x = raw_dft(samples, opts);
    let m = x.len();
    let df = fs / m as f64;
    let (freqs, magnitude) = if opts.centered {
        let half = m / 2;
        (0..m)
            .map(|j| {
                let k = (j + m - half) % m;
                ((j as f64 - half as f64) * df, x[k].norm())
            })
            .unzip()
    } else {
        (0..m * opts.zones)
            .map(|j| (j as f64 * df, x[j % m].norm()))
            .unzip()
    };
    Ok(Spectrum {
        freqs,
        magnitude,
        resolution: df,
    })
}

/// Spectrum of an envelope's in-phase channel sampled at `fs` over `[0, T]`, scaled by the
/// sample period so it approximates the continuous transform `|∫ I(t) e^{−2πift} dt|`.
pub fn envelope_spectrum(env: &Envelope, fs: f64, opts: &SpectrumOptions) -> Result<Spectrum> {
    if !(fs > 0.0) {
        return Err(Error::invalid("fs", "sample rate must be positive"));
    }
    let n = (env.duration() * fs).round() as usize + 1;
    let samples: Vec<f64> = (0..n).map(|k| env.in_phase(k as f64 / fs)).collect();
    let mut spec = dft_spectrum(&samples, fs, opts)?;
    for m in &mut spec.magnitude {
        *m /= fs;
    }
    Ok(spec)
}

/// Sorted distinct values of `|C·fs ± f0|` for `C = 0..=max_zone`.
pub fn image_frequencies(f0: f64, fs: f64, max_zone: usize) -> Result<Vec<f64>> {
    if !(fs > 0.0) {
        return Err(Error::invalid("fs", "sample rate must be positive"));
    }
    if !(f0 > 0.0 && f0 < fs / 2.0) {
        return Err(Error::Nyquist {
            detail: format!("tone at {f0} is outside the first zone (0, {})", fs / 2.0),
        });
    }
    if max_zone < 1 {
        return Err(Error::invalid("max_zone", "must be at least 1"));
    }
    let mut out: Vec<f64> = (0..=max_zone)
        .flat_map(|c| {
            let base = c as f64 * fs;
            [(base - f0).abs(), base + f0]
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * fs);
    Ok(out)
}

/// Zero-order-hold response `|sin(πf/fs)/(πf/fs)|`.
pub fn sinc_rolloff(f: f64, fs: f64) -> f64 {
    let x = PI * f / fs;
    if x == 0.0 {
        1.0
    } else {
        (x.sin() / x).abs()
    }
}

impl Spectrum {
    /// Magnitude at `f`, linearly interpolated between bins.
    pub fn magnitude_at(&self, f: f64) -> Option<f64> {
        let first = *self.freqs.first()?;
        let last = *self.freqs.last()?;
        if !(first..=last).contains(&f) {
            return None;
        }
        let x = (f - first) / self.resolution;
        let k = (x.floor() as usize).min(self.freqs.len() - 2);
        let frac = x - k as f64;
        Some(self.magnitude[k] * (1.0 - frac) + self.magnitude[k + 1] * frac)
    }

    /// Index and value of the largest bin.
    pub fn peak(&self) -> (usize, f64) {
        self.magnitude
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| {
                if v > best.1 {
                    (k, v)
                } else {
                    best
                }
            })
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["freq", "magnitude"]);
        for (f, m) in self.freqs.iter().zip(&self.magnitude) {
            t.push(vec![*f, *m]);
        }
        t
    }
}

/// Full width at half maximum of the lobe around the global peak.
pub fn spectral_fwhm(spec: &Spectrum) -> Result<f64> {
    let n = spec.magnitude.len();
    if n < 3 {
        return Err(Error::Peak("spectrum too short".into()));
    }
    let (k, peak) = spec.peak();
    if !(peak > 0.0) {
        return Err(Error::Peak("spectrum is identically zero".into()));
    }
    if k == 0 || k == n - 1 {
        return Err(Error::Peak(format!("maximum sits on the boundary bin {k}")));
    }
    let ties = spec
        .magnitude
        .iter()
        .enumerate()
        .filter(|(j, v)| *j != k && **v >= peak * (1.0 - 1e-12))
        .count();
    if ties > 0 {
        return Err(Error::Peak("global maximum is not unique".into()));
    }
    let half = peak / 2.0;
    let m = &spec.magnitude;
    let f = &spec.freqs;
    let mut lo = k;
    while m[lo] >= half {
        if lo == 0 {
            return Err(Error::Peak(
                "half-maximum region touches the lower boundary".into(),
            ));
        }
        lo -= 1;
    }
    let mut hi = k;
    while m[hi] >= half {
        if hi == n - 1 {
            return Err(Error::Peak(
                "half-maximum region touches the upper boundary".into(),
            ));
        }
        hi += 1;
    }
    let cross = |a: usize, b: usize| f[a] + (half - m[a]) / (m[b] - m[a]) * (f[b] - f[a]);
    Ok(cross(hi - 1, hi) - cross(lo, lo + 1))
}
