use std::f64::consts::PI;

use qpulse_core::envelope::{make_default_gaussian, make_gaussian, make_square};
use qpulse_core::hardware::{hold_response, zero_order_hold, SampledWaveform};
use qpulse_core::io::CsvTable;
use qpulse_core::spectral::{
    dft_spectrum, envelope_spectrum, image_frequencies, sinc_rolloff, spectral_fwhm, Spectrum,
    SpectrumOptions,
};
use serde::Deserialize;

use super::{linspace, Experiment, ExperimentOutput};
use crate::config::{require, RunConfig};
use crate::error::{CliError, CliResult};

pub const FIG4: Experiment = Experiment {
    name: "fig4",
    description: "Square vs Gaussian envelope and their baseband spectra",
    parameters: &[
        ("a0", "peak amplitude, 1"),
        ("duration", "pulse length, 40"),
        ("sigma", "Gaussian width, duration/4"),
        ("fs", "sample rate of the spectral analysis, 4"),
        ("zero_pad", "DFT padding factor, 16"),
    ],
    run: run_fig4,
};

pub const FIG5: Experiment = Experiment {
    name: "fig5",
    description: "Gaussian pulse duration vs spectral FWHM",
    parameters: &[
        (
            "sigmas",
            "Gaussian widths, [8, 4, 2] (duration 4 sigma each)",
        ),
        ("fs", "sample rate of the spectral analysis, 4"),
        ("zero_pad", "DFT padding factor, 16"),
    ],
    run: run_fig5,
};

pub const FIG7: Experiment = Experiment {
    name: "fig7",
    description: "Aliasing: a tone above fs/2 and its alias below give the same samples' spectrum",
    parameters: &[
        ("f0", "tone frequency, 0.7"),
        ("fs", "sample rate, 1"),
        ("samples", "number of samples, 64"),
        ("zones", "sampling zones in the output, 2"),
    ],
    run: run_fig7,
};

pub const FIG9: Experiment = Experiment {
    name: "fig9",
    description: "Sinc roll-off of a zero-order-held tone across Nyquist zones",
    parameters: &[
        ("f0_over_fs", "tone frequency over sample rate, 0.1"),
        ("fs", "sample rate, 1"),
        (
            "samples",
            "samples per record, 100 (f0_over_fs*samples must be an integer)",
        ),
        ("oversample", "hold factor of the staircase, 32"),
        ("zones", "zones shown, 4"),
    ],
    run: run_fig9,
};

pub const NYQUIST: Experiment = Experiment {
    name: "nyquist",
    description: "Image peaks of a sampled tone at |C*fs +- f0| with their sinc weights",
    parameters: &[
        ("f0_over_fs", "tone frequency over sample rate, 0.2"),
        ("fs", "sample rate, 1"),
        (
            "samples",
            "samples per record, 100 (f0_over_fs*samples must be an integer)",
        ),
        ("oversample", "hold factor of the staircase, 32"),
        ("zones", "zones searched for images, 3"),
    ],
    run: run_nyquist,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig4Params {
    a0: Option<f64>,
    duration: Option<f64>,
    sigma: Option<f64>,
    fs: Option<f64>,
    zero_pad: Option<usize>,
}

fn relative_magnitude(s: &Spectrum, f: f64) -> f64 {
    s.magnitude_at(f).unwrap_or(f64::NAN) / s.peak().1
}

fn run_fig4(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: Fig4Params = cfg.parameters()?;
    let a0 = p.a0.map_or(1.0, |v| cfg.units.angular(v));
    let duration = p.duration.unwrap_or(40.0);
    let sigma = p.sigma.unwrap_or(duration / 4.0);
    let fs = p.fs.map_or(4.0, |v| cfg.units.linear(v));
    let zero_pad = p.zero_pad.unwrap_or(16);
    require(duration > 0.0, "duration", "must be positive")?;
    require(fs > 0.0, "fs", "must be positive")?;
    require(zero_pad >= 1, "zero_pad", "must be at least 1")?;

    let square = make_square(a0, duration)?;
    let gauss = make_gaussian(a0, sigma, duration, true)?;
    let mut pulses = CsvTable::new(["t", "square", "gaussian"]);
    for t in linspace(-0.1 * duration, 1.1 * duration, 481) {
        pulses.push(vec![t, square.in_phase(t), gauss.in_phase(t)]);
    }
    let opts = SpectrumOptions {
        zero_pad,
        ..SpectrumOptions::centered()
    };
    let s_sq = envelope_spectrum(&square, fs, &opts)?;
    let s_g = envelope_spectrum(&gauss, fs, &opts)?;
    let mut spectra = CsvTable::new(["freq", "square", "gaussian"]);
    for (k, f) in s_sq.freqs.iter().enumerate() {
        spectra.push(vec![
            *f,
            s_sq.magnitude[k],
            s_g.magnitude_at(*f).unwrap_or(f64::NAN),
        ]);
    }
    let mut out = ExperimentOutput::default();
    out.artifact("fig4_pulses.csv", pulses.to_csv_string());
    out.artifact("fig4_spectra.csv", spectra.to_csv_string());
    out.record("fwhm_square", spectral_fwhm(&s_sq)?);
    out.record("fwhm_gaussian", spectral_fwhm(&s_g)?);
    let probe = 1.5 / duration;
    out.record("sidelobe_probe_freq", probe);
    out.record(
        "square_relative_magnitude_at_probe",
        relative_magnitude(&s_sq, probe),
    );
    out.record(
        "gaussian_relative_magnitude_at_probe",
        relative_magnitude(&s_g, probe),
    );
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig5Params {
    sigmas: Option<Vec<f64>>,
    fs: Option<f64>,
    zero_pad: Option<usize>,
}

fn run_fig5(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: Fig5Params = cfg.parameters()?;
    let sigmas = p.sigmas.unwrap_or_else(|| vec![8.0, 4.0, 2.0]);
    let fs = p.fs.map_or(4.0, |v| cfg.units.linear(v));
    let zero_pad = p.zero_pad.unwrap_or(16);
    require(!sigmas.is_empty(), "sigmas", "must be non-empty")?;
    require(
        sigmas.iter().all(|s| *s > 0.0),
        "sigmas",
        "widths must be positive",
    )?;
    require(fs > 0.0, "fs", "must be positive")?;

    let opts = SpectrumOptions {
        zero_pad,
        ..SpectrumOptions::centered()
    };
    let mut fwhm = CsvTable::new(["sigma", "duration", "fwhm", "fwhm_times_duration"]);
    let mut spectra = Vec::new();
    for &sigma in &sigmas {
        let env = make_default_gaussian(1.0, sigma)?;
        let s = envelope_spectrum(&env, fs, &opts)?;
        let w = spectral_fwhm(&s)?;
        fwhm.push(vec![sigma, env.duration(), w, w * env.duration()]);
        spectra.push(s);
    }
    let mut header = vec!["freq".to_string()];
    header.extend(sigmas.iter().map(|s| format!("sigma_{s}")));
    let mut table = CsvTable::new(header);
    for f in linspace(-fs / 2.0, fs / 2.0, 1025) {
        let mut row = vec![f];
        row.extend(
            spectra
                .iter()
                .map(|s| s.magnitude_at(f).unwrap_or(f64::NAN)),
        );
        table.push(row);
    }
    let mut out = ExperimentOutput::default();
    out.artifact("fig5_fwhm.csv", fwhm.to_csv_string());
    out.artifact("fig5_spectra.csv", table.to_csv_string());
    let widths = fwhm.column("fwhm").unwrap_or_default();
    out.record("fwhm", widths.clone());
    out.record(
        "fwhm_increases_as_duration_shrinks",
        sigmas
            .windows(2)
            .zip(widths.windows(2))
            .all(|(s, w)| (s[1] < s[0]) == (w[1] > w[0])),
    );
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig7Params {
    f0: Option<f64>,
    fs: Option<f64>,
    samples: Option<usize>,
    zones: Option<usize>,
}

fn sampled_sine(f0: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (2.0 * PI * f0 * k as f64 / fs).sin())
        .collect()
}

fn run_fig7(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let p: Fig7Params = cfg.parameters()?;
    let fs = p.fs.map_or(1.0, |v| cfg.units.linear(v));
    let f0 = p.f0.map_or(0.7 * fs, |v| cfg.units.linear(v));
    let n = p.samples.unwrap_or(64);
    let zones = p.zones.unwrap_or(2);
    require(fs > 0.0, "fs", "must be positive")?;
    require(
        f0 > fs / 2.0 && f0 < fs,
        "f0",
        "must lie between fs/2 and fs to alias into the first zone",
    )?;
    require(n >= 2, "samples", "need at least 2")?;
    require(zones >= 1, "zones", "need at least 1")?;

    let alias = fs - f0;
    let opts = SpectrumOptions {
        zones,
        ..SpectrumOptions::default()
    };
    let tone = dft_spectrum(&sampled_sine(f0, fs, n), fs, &opts)?;
    let low = dft_spectrum(&sampled_sine(alias, fs, n), fs, &opts)?;
    let mut table = CsvTable::new(["freq", "tone", "alias"]);
    for k in 0..tone.freqs.len() {
        table.push(vec![tone.freqs[k], tone.magnitude[k], low.magnitude[k]]);
    }
    let mut out = ExperimentOutput::default();
    out.artifact("fig7_aliasing.csv", table.to_csv_string());
    out.record("f0", f0);
    out.record("alias", alias);
    out.record(
        "max_bin_difference",
        tone.magnitude
            .iter()
            .zip(&low.magnitude)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
    );
    Ok(out)
}

/// One image of a held tone.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePeak {
    pub expected: f64,
    /// Frequency of the largest bin within two bins of `expected`.
    pub located: f64,
    /// Amplitude relative to a unit sine.
    pub magnitude: f64,
    pub sinc: f64,
    pub hold: f64,
}

/// Spectrum of a unit sine sampled at `fs` and held `oversample` times, normalised so a
/// line of amplitude `a` reads `a`.
#[derive(Debug, Clone)]
pub struct HeldTone {
    pub spectrum: Spectrum,
    pub images: Vec<ImagePeak>,
    pub resolution: f64,
    pub oversample: usize,
}

pub fn held_tone(
    f0_over_fs: f64,
    fs: f64,
    samples: usize,
    oversample: usize,
    zones: usize,
) -> CliResult<HeldTone> {
    let cycles = f0_over_fs * samples as f64;
    require(
        (cycles - cycles.round()).abs() < 1e-9,
        "f0_over_fs",
        "f0_over_fs * samples must be an integer so every image falls on a bin",
    )?;
    require(oversample >= 1, "oversample", "must be at least 1")?;
    require(
        zones >= 1 && zones < oversample.max(2),
        "zones",
        "must be at least 1 and below oversample",
    )?;
    let f0 = f0_over_fs * fs;
    let wave = SampledWaveform::new(1.0 / fs, sampled_sine(f0, fs, samples))?;
    let held = zero_order_hold(&wave, oversample)?;
    let mut spectrum = dft_spectrum(
        &held.values,
        oversample as f64 * fs,
        &SpectrumOptions::default(),
    )?;
    let scale = 2.0 / held.values.len() as f64;
    spectrum.magnitude.iter_mut().for_each(|m| *m *= scale);
    let resolution = spectrum.resolution;
    let images = image_frequencies(f0, fs, zones)?
        .into_iter()
        .filter(|f| *f < zones as f64 * fs)
        .map(|expected| {
            let centre = (expected / resolution).round() as usize;
            let (k, m) = (centre.saturating_sub(2)..=centre + 2)
                .filter(|k| *k < spectrum.magnitude.len())
                .map(|k| (k, spectrum.magnitude[k]))
                .fold(
                    (centre, f64::NEG_INFINITY),
                    |b, c| if c.1 > b.1 { c } else { b },
                );
            ImagePeak {
                expected,
                located: spectrum.freqs[k],
                magnitude: m,
                sinc: sinc_rolloff(expected, fs),
                hold: hold_response(expected, fs, oversample),
            }
        })
        .collect();
    let keep = spectrum
        .freqs
        .iter()
        .take_while(|f| **f <= zones as f64 * fs)
        .count();
    spectrum.freqs.truncate(keep);
    spectrum.magnitude.truncate(keep);
    Ok(HeldTone {
        spectrum,
        images,
        resolution,
        oversample,
    })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeldParams {
    f0_over_fs: Option<f64>,
    fs: Option<f64>,
    samples: Option<usize>,
    oversample: Option<usize>,
    zones: Option<usize>,
}

fn held_from_config(
    cfg: &RunConfig,
    f0_default: f64,
    zones_default: usize,
) -> CliResult<(HeldTone, f64)> {
    let p: HeldParams = cfg.parameters()?;
    let fs = p.fs.map_or(1.0, |v| cfg.units.linear(v));
    require(fs > 0.0, "fs", "must be positive")?;
    let ratio = p.f0_over_fs.unwrap_or(f0_default);
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(CliError::config("f0_over_fs", "must lie in (0, 0.5)"));
    }
    let h = held_tone(
        ratio,
        fs,
        p.samples.unwrap_or(100),
        p.oversample.unwrap_or(32),
        p.zones.unwrap_or(zones_default),
    )?;
    Ok((h, fs))
}

fn run_fig9(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let (h, fs) = held_from_config(cfg, 0.1, 4)?;
    let mut table = CsvTable::new(["freq", "magnitude", "sinc", "hold"]);
    for (f, m) in h.spectrum.freqs.iter().zip(&h.spectrum.magnitude) {
        table.push(vec![
            *f,
            *m,
            sinc_rolloff(*f, fs),
            hold_response(*f, fs, h.oversample),
        ]);
    }
    let mut out = ExperimentOutput::default();
    out.artifact("fig9_rolloff.csv", table.to_csv_string());
    out.artifact("fig9_images.csv", images_table(&h).to_csv_string());
    record_images(&mut out, &h);
    Ok(out)
}

fn run_nyquist(cfg: &RunConfig) -> CliResult<ExperimentOutput> {
    let (h, _) = held_from_config(cfg, 0.2, 3)?;
    let mut out = ExperimentOutput::default();
    out.artifact(
        "nyquist_spectrum.csv",
        h.spectrum.to_table().to_csv_string(),
    );
    out.artifact("nyquist_images.csv", images_table(&h).to_csv_string());
    record_images(&mut out, &h);
    Ok(out)
}

fn images_table(h: &HeldTone) -> CsvTable {
    let mut t = CsvTable::new([
        "expected",
        "located",
        "magnitude",
        "sinc_weight",
        "hold_weight",
        "ratio_to_sinc",
    ]);
    for i in &h.images {
        t.push(vec![
            i.expected,
            i.located,
            i.magnitude,
            i.sinc,
            i.hold,
            i.magnitude / i.sinc,
        ]);
    }
    t
}

fn record_images(out: &mut ExperimentOutput, h: &HeldTone) {
    let worst = h
        .images
        .iter()
        .map(|i| (i.magnitude / i.sinc - 1.0).abs())
        .fold(0.0, f64::max);
    let misplaced = h
        .images
        .iter()
        .filter(|i| (i.located - i.expected).abs() > h.resolution / 2.0)
        .count();
    out.record("images", h.images.len());
    out.record("max_relative_deviation_from_sinc", worst);
    out.record("images_off_bin", misplaced);
    out.record("resolution", h.resolution);
}
