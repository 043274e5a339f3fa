//! First and second Magnus terms: numerical quadrature, closed forms for the two-level
//! pulses, the first-order DRAG cancellation and the second-order channel inventory.
//!
//! With `H̃ = −iH`: `Ω₁ = ∫H̃`, `Ω₂ = ½∫dt′∫^{t′}dt″ [H̃(t′), H̃(t″)]`.

use num_complex::Complex64;

use crate::envelope::{ComplexEnvelope, Envelope};
use crate::error::{Error, Result};
use crate::hamiltonian::{three_level_rwa, TimeDependentHamiltonian};
use crate::numkit::{expm_hermitian_generator, gauss_nodes, ops, ComplexMatrix, I};

#[derive(Debug, Clone, PartialEq)]
pub struct MagnusTerms {
    pub omega1: ComplexMatrix,
    pub omega2: ComplexMatrix,
    /// `exp(Ω₁ + Ω₂)`
    pub truncated_unitary: ComplexMatrix,
}

/// Exponential of an anti-Hermitian matrix.
pub fn expm_anti_hermitian(omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    // Ω = −iG with G = iΩ Hermitian, so exp(Ω) = exp(−iG).
    expm_hermitian_generator(&omega.scale(I), 1.0)
}

struct Panel {
    start: f64,
    nodes: Vec<(f64, f64)>,
}

/// Panels over `[0, T]`, split at the model's breakpoints so no panel straddles a kink.
fn panels_for(model: &TimeDependentHamiltonian, duration: f64, panels: usize) -> Vec<Panel> {
    let mut cuts = vec![0.0];
    cuts.extend(
        model
            .breakpoints()
            .iter()
            .copied()
            .filter(|b| *b > 0.0 && *b < duration),
    );
    cuts.push(duration);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let share = ((panels as f64) * (w[1] - w[0]) / duration)
            .round()
            .max(1.0) as usize;
        let h = (w[1] - w[0]) / share as f64;
        for p in 0..share {
            let a = w[0] + p as f64 * h;
            let b = if p + 1 == share { w[1] } else { a + h };
            out.push(Panel {
                start: a,
                nodes: gauss_nodes(a, b, 1),
            });
        }
    }
    out
}

fn check_panels(duration: f64, panels: usize) -> Result<()> {
    if !(duration > 0.0) {
        return Err(Error::invalid("T", "duration must be positive"));
    }
    if panels < 8 {
        return Err(Error::invalid(
            "panels",
            format!("need at least 8, got {panels}"),
        ));
    }
    Ok(())
}

/// `Ω₁ = −i∫₀ᵀ H dt`
pub fn omega1_numeric(
    model: &TimeDependentHamiltonian,
    duration: f64,
    panels: usize,
) -> Result<ComplexMatrix> {
    check_panels(duration, panels)?;
    let mut acc = ComplexMatrix::zeros(model.dim());
    for panel in panels_for(model, duration, panels) {
        for (t, w) in panel.nodes {
            acc.add_scaled(&model.evaluate(t), Complex64::new(w, 0.0));
        }
    }
    Ok(acc.scale(-I))
}

/// Both terms by Gauss–Legendre quadrature. The inner integral of `Ω₂` is the running sum
/// over completed panels plus a fresh 5-point rule over the partial panel.
pub fn magnus_numeric(
    model: &TimeDependentHamiltonian,
    duration: f64,
    panels: usize,
) -> Result<MagnusTerms> {
    check_panels(duration, panels)?;
    let dim = model.dim();
    let mut integral = ComplexMatrix::zeros(dim);
    let mut nested = ComplexMatrix::zeros(dim);
    for panel in panels_for(model, duration, panels) {
        let mut panel_sum = ComplexMatrix::zeros(dim);
        for (t, w) in &panel.nodes {
            let h = model.evaluate(*t);
            let mut inner = integral.clone();
            for (s, v) in gauss_nodes(panel.start, *t, 1) {
                inner.add_scaled(&model.evaluate(s), Complex64::new(v, 0.0));
            }
            nested.add_scaled(&h.commutator(&inner), Complex64::new(*w, 0.0));
            panel_sum.add_scaled(&h, Complex64::new(*w, 0.0));
        }
        integral += &panel_sum;
    }
    let omega1 = integral.scale(-I);
    // [H̃′, H̃″] = −[H′, H″]
    let omega2 = nested.scale_real(-0.5);
    let truncated_unitary = expm_anti_hermitian(&(&omega1 + &omega2))?;
    Ok(MagnusTerms {
        omega1,
        omega2,
        truncated_unitary,
    })
}

/// `Ω₁` of `H = −(δ/2)σ_z + (A/2)σ_x`, i.e. `−(i/2)(−δT σ_z + (∫A) σ_x)`.
///
/// The common textbook form `−(i/2)(δT σ_z + ∫A σ_x)` is this expression with the detuning
/// sign reversed; transition probabilities do not depend on that sign.
pub fn omega1_two_level(delta: f64, env: &Envelope) -> Result<ComplexMatrix> {
    if env.has_quadrature() {
        return Err(Error::invalid(
            "env",
            "two-level model has no quadrature drive",
        ));
    }
    let t = env.duration();
    let g =
        ops::pauli_z().scale_real(-delta * t / 2.0) + ops::pauli_x().scale_real(env.area() / 2.0);
    Ok(g.scale(-I))
}

/// Rabi formula `A₀²/(A₀² + δ²)·sin²(ω T/2)`, `ω = √(δ² + A₀²)`.
pub fn p01_square_closed(delta: f64, a0: f64, t: f64) -> f64 {
    let w2 = delta * delta + a0 * a0;
    if w2 == 0.0 {
        return 0.0;
    }
    a0 * a0 / w2 * (w2.sqrt() * t / 2.0).sin().powi(2)
}

/// Generator components `(g_x, g_y, g_z)` of the second-order triangular-pulse propagator
/// `exp(−i(g_x σ_x + g_y σ_y + g_z σ_z))` built from the closed-form terms
/// `Ω₁ = −(iT/2)(δσ_z + (A₀/2)σ_x)` and `Ω₂ = (iδ/8)(A₀/12)(T/2)² σ_y`.
pub fn triangular_generator(delta: f64, a0: f64, t: f64) -> (f64, f64, f64) {
    (a0 * t / 4.0, -delta * a0 * t * t / 384.0, delta * t / 2.0)
}

/// `Ω₂` of the triangular pulse in the closed form quoted alongside `Ω₁`:
/// `(iδ/8)(A₀/12)(T/2)² σ_y`.
pub fn omega2_triangular_closed(delta: f64, a0: f64, t: f64) -> ComplexMatrix {
    ops::pauli_y().scale(I * (delta / 8.0) * (a0 / 12.0) * (t / 2.0).powi(2))
}

/// `P₀→₁` of `exp(Ω₁ + Ω₂)` for the triangular pulse, evaluated from
/// [`triangular_generator`]: `(g_x² + g_y²)/|g|²·sin²|g|`.
pub fn p01_triangular_closed(delta: f64, a0: f64, t: f64) -> f64 {
    let (gx, gy, gz) = triangular_generator(delta, a0, t);
    let theta2 = gx * gx + gy * gy + gz * gz;
    if theta2 == 0.0 {
        return 0.0;
    }
    (gx * gx + gy * gy) / theta2 * theta2.sqrt().sin().powi(2)
}

/// The triangular-pulse expression in the form usually printed, in which every component
/// of the generator appears doubled relative to [`p01_triangular_closed`]. Kept for
/// comparison only.
pub fn p01_triangular_printed(delta: f64, a0: f64, t: f64) -> f64 {
    let s = (delta * t).powi(2) + (a0 * t / 2.0).powi(2) + (delta * a0 * t * t / 192.0).powi(2);
    if s == 0.0 {
        return 0.0;
    }
    (1.0 - (delta * t).powi(2) / s) * s.sqrt().sin().powi(2)
}

/// Residual first-order errors of a qutrit drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderErrors {
    /// Magnitude of the `σ^y₀₁` coefficient of `iΩ₁`.
    pub comp_error: f64,
    /// Magnitude of the `σ^±₁₂` elements of `Ω₁`.
    pub leak_error: f64,
}

/// First-order Magnus errors of `three_level_rwa(anharm, lam, env)` over the pulse.
pub fn drag_first_order_check(
    anharm: f64,
    lam: f64,
    env: &ComplexEnvelope,
    panels: usize,
) -> Result<FirstOrderErrors> {
    let model = three_level_rwa(anharm, lam, env)?;
    let omega1 = omega1_numeric(&model, env.duration(), panels)?;
    let g = omega1.scale(I);
    // σ^y₀₁ = i|1⟩⟨0| − i|0⟩⟨1|, so G₁₀ = x + iy for the σ^x/σ^y coefficients.
    let comp_error = g[(1, 0)].im.abs();
    let leak_error = omega1[(2, 1)].norm().max(omega1[(1, 2)].norm());
    Ok(FirstOrderErrors {
        comp_error,
        leak_error,
    })
}

/// Coefficients of `iΩ₂` on the second-order error channels of a qutrit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMagnitudes {
    /// AC-Stark shift on `σ^z₀₁ = |0⟩⟨0| − |1⟩⟨1|`.
    pub s01z: f64,
    /// AC-Stark shift on `σ^z₁₂ = |1⟩⟨1| − |2⟩⟨2|`.
    pub s12z: f64,
    /// Direct `0 ↔ 2` coupling, `|coefficient of σ⁺₀₂|` (both quadratures).
    pub s02plus: f64,
    /// Frobenius norm of everything the four channels do not capture.
    pub residual: f64,
}

/// Projects `iΩ₂` of `three_level_rwa(anharm, lam, env)` onto
/// `{σ^z₀₁, σ^z₁₂, σ^x₀₂, σ^y₀₂}`. The two `z` operators overlap, so the diagonal is fitted by
/// least squares rather than by independent inner products.
pub fn channel_decompose_omega2(
    anharm: f64,
    lam: f64,
    env: &ComplexEnvelope,
    panels: usize,
) -> Result<ChannelMagnitudes> {
    let model = three_level_rwa(anharm, lam, env)?;
    let terms = magnus_numeric(&model, env.duration(), panels)?;
    let g = terms.omega2.scale(I);
    Ok(decompose_qutrit_channels(&g))
}

/// Channel fit of a Hermitian qutrit operator; see [`channel_decompose_omega2`].
pub fn decompose_qutrit_channels(g: &ComplexMatrix) -> ChannelMagnitudes {
    let d = [g[(0, 0)].re, g[(1, 1)].re, g[(2, 2)].re];
    // Normal equations for a·(1,−1,0) + b·(0,1,−1) ≈ d.
    let r1 = d[0] - d[1];
    let r2 = d[1] - d[2];
    let a = (2.0 * r1 + r2) / 3.0;
    let b = (r1 + 2.0 * r2) / 3.0;
    let c02 = g[(2, 0)];
    let mut fit = ops::sigma_z(3, 0, 1).scale_real(a) + ops::sigma_z(3, 1, 2).scale_real(b);
    fit.add_scaled(&ops::sigma_x(3, 0, 2), Complex64::new(c02.re, 0.0));
    fit.add_scaled(&ops::sigma_y(3, 0, 2), Complex64::new(c02.im, 0.0));
    ChannelMagnitudes {
        s01z: a.abs(),
        s12z: b.abs(),
        s02plus: c02.norm(),
        residual: (g - &fit).frobenius_norm(),
    }
}
