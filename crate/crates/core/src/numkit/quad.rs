//! Composite 5-point Gauss–Legendre quadrature.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Panels per pulse used when callers have no better choice.
pub const DEFAULT_PANELS: usize = 64;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Clone {
    /// `self += w · other`
    fn accumulate(&mut self, other: &Self, w: f64);
    /// Zero of the same shape as `self`.
    fn zero_like(&self) -> Self;
}

impl Integrand for f64 {
    fn accumulate(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn zero_like(&self) -> Self {
        0.0
    }
}

impl Integrand for Complex64 {
    fn accumulate(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
}

impl Integrand for ComplexMatrix {
    fn accumulate(&mut self, other: &Self, w: f64) {
        self.add_scaled(other, Complex64::new(w, 0.0));
    }
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.dim())
    }
}

/// Quadrature nodes and weights for `n` equal panels on `[a, b]`, in increasing time order.
pub fn gauss_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    let mut out = Vec::with_capacity(5 * n);
    for p in 0..n {
        let left = a + p as f64 * h;
        let mid = left + 0.5 * h;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// `∫_a^b f(t) dt` with `n` Gauss–Legendre panels.
pub fn quad_integrate<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    n: usize,
) -> Result<T> {
    if !(b >= a) {
        return Err(Error::invalid(
            "b",
            format!("upper limit {b} is below lower limit {a}"),
        ));
    }
    if n == 0 {
        return Err(Error::invalid("n", "panel count must be at least 1"));
    }
    let mut nodes = gauss_nodes(a, b, n).into_iter();
    let (t0, w0) = nodes.next().expect("at least five nodes");
    let first = f(t0);
    let mut acc = first.zero_like();
    acc.accumulate(&first, w0);
    for (t, w) in nodes {
        acc.accumulate(&f(t), w);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand() {
        let v = quad_integrate(|_| 1.0, 0.0, 2.0, 1).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sine_over_half_period() {
        let v = quad_integrate(f64::sin, 0.0, PI, 8).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degree_nine_polynomials_are_exact_on_one_panel() {
        let v = quad_integrate(|t: f64| t.powi(9), 0.0, 1.0, 1).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gaussian_converges_under_refinement() {
        let g = |t: f64| (-(t - 13.0).powi(2) / (2.0 * 6.5 * 6.5)).exp();
        let coarse = quad_integrate(g, 0.0, 26.0, 64).unwrap();
        let fine = quad_integrate(g, 0.0, 26.0, 128).unwrap();
        assert!((coarse - fine).abs() < 1e-10);
    }

    #[test]
    fn matrix_valued_integrand() {
        let x = super::super::matrix::ops::pauli_x();
        let v = quad_integrate(|t| x.scale_real(t), 0.0, 1.0, 2).unwrap();
        assert!(v.max_abs_diff(&x.scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn rejects_reversed_limits_and_zero_panels() {
        assert!(quad_integrate(|_| 1.0, 1.0, 0.0, 4).is_err());
        assert!(quad_integrate(|_| 1.0, 0.0, 1.0, 0).is_err());
    }
}
