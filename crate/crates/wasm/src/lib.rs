//! Browser bindings for the demo page: pulse spectra, Rabi curves (second-order Magnus vs
//! exact) and three-level populations with and without DRAG.
//!
//! The `*_series` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use qpulse_core::envelope::{
    drag_quadrature, make_default_gaussian, make_gaussian, make_square, make_triangular, Envelope,
};
use qpulse_core::hamiltonian::{three_level_rwa, two_level_rwa};
use qpulse_core::magnus::magnus_numeric;
use qpulse_core::propagate::{propagate, propagate_unitary, transition_probability, InitialState};
use qpulse_core::spectral::{envelope_spectrum, SpectrumOptions};
use wasm_bindgen::prelude::*;

/// An x axis with any number of y columns of the same length.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    x: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

#[wasm_bindgen]
impl Series {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.columns.get(k).cloned().unwrap_or_default()
    }

    #[wasm_bindgen(js_name = columnCount)]
    pub fn column_count(&self) -> usize {
        self.columns.len()
    }
}

type DemoResult<T> = Result<T, String>;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pulse(shape: &str, a0: f64, duration: f64) -> DemoResult<Envelope> {
    match shape {
        "square" => make_square(a0, duration).map_err(text),
        "triangular" => make_triangular(a0, duration).map_err(text),
        // σ = T/4, the conventional 4σ window
        "gaussian" => make_gaussian(a0, duration / 4.0, duration, true).map_err(text),
        other => Err(format!("unknown shape {other:?}")),
    }
}

/// Centered magnitude spectrum of a pulse, normalised to its peak. Column 0 is the magnitude.
pub fn spectrum_series(shape: &str, duration: f64, fs: f64) -> DemoResult<Series> {
    let env = pulse(shape, 1.0, duration)?;
    let s = envelope_spectrum(
        &env,
        fs,
        &SpectrumOptions {
            zero_pad: 16,
            ..SpectrumOptions::centered()
        },
    )
    .map_err(text)?;
    let peak = s.magnitude.iter().copied().fold(0.0, f64::max);
    let y = s
        .magnitude
        .iter()
        .map(|m| if peak > 0.0 { m / peak } else { 0.0 })
        .collect();
    Ok(Series {
        x: s.freqs,
        columns: vec![y],
    })
}

/// `P₀→₁` against pulse duration: column 0 exact, column 1 second-order Magnus.
pub fn rabi_series(
    shape: &str,
    delta: f64,
    a0: f64,
    t_max: f64,
    points: usize,
) -> DemoResult<Series> {
    if points < 2 || !(t_max > 0.0) {
        return Err("need t_max > 0 and at least 2 points".into());
    }
    let mut x = Vec::with_capacity(points);
    let (mut exact, mut magnus) = (Vec::with_capacity(points), Vec::with_capacity(points));
    for k in 0..points {
        let t = t_max * k as f64 / (points - 1) as f64;
        x.push(t);
        if t == 0.0 {
            exact.push(0.0);
            magnus.push(0.0);
            continue;
        }
        let model = two_level_rwa(delta, &pulse(shape, a0, t)?).map_err(text)?;
        let u = propagate_unitary(&model, 0.0, t, None).map_err(text)?;
        exact.push(transition_probability(&u, 0, 1).map_err(text)?);
        let m = magnus_numeric(&model, t, 32).map_err(text)?;
        magnus.push(transition_probability(&m.truncated_unitary, 0, 1).map_err(text)?);
    }
    Ok(Series {
        x,
        columns: vec![exact, magnus],
    })
}

/// Three-level populations `P0, P1, P2` during a Gaussian (optionally DRAG) pulse of
/// duration `4σ`, sampled at `samples` points.
pub fn drag_series(
    anharm: f64,
    a0: f64,
    sigma: f64,
    drag: bool,
    samples: usize,
) -> DemoResult<Series> {
    let mut env = make_default_gaussian(a0, sigma).map_err(text)?;
    if drag {
        env = drag_quadrature(&env, anharm).map_err(text)?;
    }
    let model =
        three_level_rwa(anharm, std::f64::consts::SQRT_2, &env.as_complex()).map_err(text)?;
    let r = propagate(&model, env.duration(), None, &InitialState::Basis(0)).map_err(text)?;
    let stride = (r.times.len() / samples.max(2)).max(1);
    let keep = |v: &[f64]| -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().step_by(stride).copied().collect();
        if (v.len() - 1) % stride != 0 {
            out.push(*v.last().expect("non-empty"));
        }
        out
    };
    Ok(Series {
        x: keep(&r.times),
        columns: r.populations.iter().map(|p| keep(p)).collect(),
    })
}

#[wasm_bindgen]
pub fn spectrum(shape: &str, duration: f64, fs: f64) -> Result<Series, JsError> {
    spectrum_series(shape, duration, fs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rabi(
    shape: &str,
    delta: f64,
    a0: f64,
    t_max: f64,
    points: usize,
) -> Result<Series, JsError> {
    rabi_series(shape, delta, a0, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = dragPopulations)]
pub fn drag_populations(
    anharm: f64,
    a0: f64,
    sigma: f64,
    drag: bool,
    samples: usize,
) -> Result<Series, JsError> {
    drag_series(anharm, a0, sigma, drag, samples).map_err(|e| JsError::new(&e))
}
