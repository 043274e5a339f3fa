use std::f64::consts::PI;

use proptest::prelude::*;
use qpulse_core::spectral::{dft_spectrum, SpectrumOptions};

fn sine(f0: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (2.0 * PI * f0 * k as f64 / fs).sin())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_periodic_across_zones(values in prop::collection::vec(-1.0f64..1.0, 8..128), fs in 0.5f64..4.0) {
        let opts = SpectrumOptions { zones: 3, ..SpectrumOptions::default() };
        let s = dft_spectrum(&values, fs, &opts).unwrap();
        let per_zone = s.freqs.len() / 3;
        for k in 0..per_zone {
            prop_assert!((s.magnitude[k] - s.magnitude[k + per_zone]).abs() < 1e-10);
            prop_assert!((s.magnitude[k] - s.magnitude[k + 2 * per_zone]).abs() < 1e-10);
        }
    }

    #[test]
    fn tone_above_nyquist_aliases(f0 in 0.51f64..0.99, n in 16usize..256) {
        let fs = 1.0;
        let high = dft_spectrum(&sine(f0, fs, n), fs, &SpectrumOptions::default()).unwrap();
        // sin(2π(fs − f)t_k) = −sin(2πf t_k) on the sample grid
        let low = dft_spectrum(&sine(fs - f0, fs, n), fs, &SpectrumOptions::default()).unwrap();
        for (a, b) in high.magnitude.iter().zip(&low.magnitude) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn parseval(values in prop::collection::vec(-1.0f64..1.0, 2..256)) {
        let s = dft_spectrum(&values, 1.0, &SpectrumOptions::unpadded()).unwrap();
        let time: f64 = values.iter().map(|v| v * v).sum();
        let freq: f64 = s.magnitude.iter().map(|m| m * m).sum::<f64>() / values.len() as f64;
        prop_assert!((time - freq).abs() < 1e-9 * time.max(1.0));
    }
}
