//! Time-dependent Hamiltonians for the qubit, qutrit and two-qubit models.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::envelope::{ComplexEnvelope, Envelope};
use crate::error::{Error, Result};
use crate::numkit::{ops, pauli_product, ComplexMatrix, Pauli, HERMITIAN_TOL, ZERO};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Real(RealFn),
    /// Multiplies the operator and, conjugated, its adjoint.
    Complex(ComplexFn),
}

#[derive(Clone)]
struct Term {
    op: ComplexMatrix,
    coefficient: Coefficient,
}

/// `H(t) = Σ_k c_k(t)·O_k`, where complex terms carry `c·O + c̄·O†`.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    dim: usize,
    terms: Vec<Term>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim)
            .field("terms", &self.terms.len())
            .field("constant", &self.is_constant())
            .finish()
    }
}

impl TimeDependentHamiltonian {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
            breakpoints: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_dim(&self, op: &ComplexMatrix) -> Result<()> {
        if op.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.dim(),
            })
        }
    }

    pub fn add_constant(&mut self, op: ComplexMatrix, c: f64) -> Result<&mut Self> {
        self.check_dim(&op)?;
        op.ensure_hermitian(HERMITIAN_TOL)?;
        self.terms.push(Term {
            op,
            coefficient: Coefficient::Constant(c),
        });
        Ok(self)
    }

    pub fn add_real(
        &mut self,
        op: ComplexMatrix,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<&mut Self> {
        self.check_dim(&op)?;
        op.ensure_hermitian(HERMITIAN_TOL)?;
        self.terms.push(Term {
            op,
            coefficient: Coefficient::Real(Arc::new(f)),
        });
        Ok(self)
    }

    /// Adds `c(t)·op + conj(c(t))·op†`; `op` need not be Hermitian.
    pub fn add_complex(
        &mut self,
        op: ComplexMatrix,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<&mut Self> {
        self.check_dim(&op)?;
        self.terms.push(Term {
            op,
            coefficient: Coefficient::Complex(Arc::new(f)),
        });
        Ok(self)
    }

    /// Times where coefficients may have kinks; quadratures split there.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.extend_from_slice(&self.breakpoints);
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.coefficient, Coefficient::Constant(_)))
    }

    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.dim);
        for term in &self.terms {
            match &term.coefficient {
                Coefficient::Constant(c) => h.add_scaled(&term.op, Complex64::new(*c, 0.0)),
                Coefficient::Real(f) => h.add_scaled(&term.op, Complex64::new(f(t), 0.0)),
                Coefficient::Complex(f) => {
                    let c = f(t);
                    if c != ZERO {
                        h.add_scaled(&term.op, c);
                        h.add_scaled(&term.op.adjoint(), c.conj());
                    }
                }
            }
        }
        h
    }

    /// Largest Frobenius norm of `H(t)` on a uniform grid over `[0, T]`.
    pub fn max_norm(&self, duration: f64, samples: usize) -> f64 {
        let n = samples.max(2);
        (0..n)
            .map(|k| {
                self.evaluate(duration * k as f64 / (n - 1) as f64)
                    .frobenius_norm()
            })
            .fold(0.0, f64::max)
    }

    /// Sum of two models on the same space.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out.with_breakpoints(other.breakpoints.clone()))
    }
}

fn require_real(env: &Envelope) -> Result<()> {
    if env.has_quadrature() {
        Err(Error::invalid(
            "env",
            "this model has a single drive line; Q must vanish",
        ))
    } else {
        Ok(())
    }
}

/// Lab frame `H = −(ω_q/2)σ_z + A(t)·sin(ω_d t + α)·σ_y`.
pub fn two_level_lab(
    wq: f64,
    wd: f64,
    alpha: f64,
    env: &Envelope,
) -> Result<TimeDependentHamiltonian> {
    require_real(env)?;
    let mut h = TimeDependentHamiltonian::new(2);
    h.add_constant(ops::pauli_z(), -wq / 2.0)?;
    let e = env.clone();
    h.add_real(ops::pauli_y(), move |t| {
        e.in_phase(t) * (wd * t + alpha).sin()
    })?;
    Ok(h.with_breakpoints(env.breakpoints()))
}

/// Rotating frame with `α = π`: `H = −(δ/2)σ_z + (A(t)/2)σ_x`.
pub fn two_level_rwa(delta: f64, env: &Envelope) -> Result<TimeDependentHamiltonian> {
    require_real(env)?;
    let mut h = TimeDependentHamiltonian::new(2);
    h.add_constant(ops::pauli_z(), -delta / 2.0)?;
    let e = env.clone();
    h.add_real(ops::pauli_x(), move |t| e.in_phase(t) / 2.0)?;
    Ok(h.with_breakpoints(env.breakpoints()))
}

/// Rotating frame with both quadratures: `H = −(δ/2)σ_z + (I(t)σ_x + Q(t)σ_y)/2`.
pub fn two_level_rwa_iq(delta: f64, env: &ComplexEnvelope) -> Result<TimeDependentHamiltonian> {
    let mut h = TimeDependentHamiltonian::new(2);
    h.add_constant(ops::pauli_z(), -delta / 2.0)?;
    // (Iσx + Qσy)/2 = ((I + iQ)/2)·|1⟩⟨0| + h.c.
    let e = env.clone();
    h.add_complex(ops::transition(2, 0, 1), move |t| e.value(t) / 2.0)?;
    Ok(h)
}

/// Resonantly driven qutrit in the interaction picture:
/// `H = (I σ^x₀₁ − Q σ^y₀₁)/2 + (λ/2)[(I + iQ)·e^{iΔt}·σ⁺₁₂ + h.c.]`.
pub fn three_level_rwa(
    anharm: f64,
    lam: f64,
    env: &ComplexEnvelope,
) -> Result<TimeDependentHamiltonian> {
    let mut h = TimeDependentHamiltonian::new(3);
    let e = env.clone();
    h.add_real(ops::sigma_x(3, 0, 1), move |t| e.value(t).re / 2.0)?;
    let e = env.clone();
    h.add_real(ops::sigma_y(3, 0, 1), move |t| -e.value(t).im / 2.0)?;
    if lam != 0.0 {
        let e = env.clone();
        h.add_complex(ops::transition(3, 1, 2), move |t| {
            e.value(t) * Complex64::from_polar(lam / 2.0, anharm * t)
        })?;
    }
    Ok(h)
}

/// Qubit under a noisy local oscillator, in the doubly rotated frame:
/// `H = ½δω₀(t)σ_z + ½φ̇_N(t)σ_z + ½A(t)[cos φ_C(t) σ_x + sin φ_C(t) σ_y]`.
pub fn lo_noise_qubit(
    env: &Envelope,
    phi_c: impl Fn(f64) -> f64 + Send + Sync + 'static,
    phi_n_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
    delta_w0: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<TimeDependentHamiltonian> {
    require_real(env)?;
    let mut h = TimeDependentHamiltonian::new(2);
    h.add_real(ops::pauli_z(), move |t| 0.5 * (delta_w0(t) + phi_n_dot(t)))?;
    let phi_c = Arc::new(phi_c);
    let (e, p) = (env.clone(), phi_c.clone());
    h.add_real(ops::pauli_x(), move |t| 0.5 * e.in_phase(t) * p(t).cos())?;
    let (e, p) = (env.clone(), phi_c);
    h.add_real(ops::pauli_y(), move |t| 0.5 * e.in_phase(t) * p(t).sin())?;
    Ok(h.with_breakpoints(env.breakpoints()))
}

/// Rates of the effective cross-resonance Hamiltonian `Σ w_ab (P_a⊗P_b)/2`
/// (control first). The `y` terms are zero for a drive in phase with the target frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrCoefficients {
    pub w_ix: f64,
    pub w_iy: f64,
    pub w_iz: f64,
    pub w_zi: f64,
    pub w_zx: f64,
    pub w_zy: f64,
    pub w_zz: f64,
}

impl CrCoefficients {
    pub fn zx(w_zx: f64) -> Self {
        Self {
            w_zx,
            ..Self::default()
        }
    }

    pub fn terms(&self) -> [(Pauli, Pauli, f64); 7] {
        use Pauli::*;
        [
            (I, X, self.w_ix),
            (I, Y, self.w_iy),
            (I, Z, self.w_iz),
            (Z, I, self.w_zi),
            (Z, X, self.w_zx),
            (Z, Y, self.w_zy),
            (Z, Z, self.w_zz),
        ]
    }

    /// Coefficients for a drive of the opposite sign: the terms linear in the drive
    /// amplitude (`IX`, `IY`, `ZX`, `ZY`) flip, the quadratic ones stay.
    pub fn negated_drive(&self) -> Self {
        Self {
            w_ix: -self.w_ix,
            w_iy: -self.w_iy,
            w_zx: -self.w_zx,
            w_zy: -self.w_zy,
            ..*self
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for (a, b, w) in self.terms() {
            if w != 0.0 {
                m.add_scaled(&pauli_product(a, b), Complex64::new(w / 2.0, 0.0));
            }
        }
        m
    }
}

/// Constant two-qubit model `Σ w_ab (P_a⊗P_b)/2`; `sign = −1` applies
/// [`CrCoefficients::negated_drive`].
pub fn cr_effective(c: &CrCoefficients, sign: i8) -> Result<TimeDependentHamiltonian> {
    let c = match sign {
        1 => *c,
        -1 => c.negated_drive(),
        s => return Err(Error::invalid("sign", format!("must be +1 or -1, got {s}"))),
    };
    let mut h = TimeDependentHamiltonian::new(4);
    for (a, b, w) in c.terms() {
        if w != 0.0 {
            h.add_constant(pauli_product(a, b), w / 2.0)?;
        }
    }
    Ok(h)
}

/// Proportionality constants of the perturbative CR rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConstants {
    pub k_ix: f64,
    pub k_zx: f64,
    pub k_zz: f64,
    pub k_zi: f64,
    pub k_iz: f64,
}

impl Default for ScalingConstants {
    fn default() -> Self {
        Self {
            k_ix: 1.0,
            k_zx: 1.0,
            k_zz: 1.0,
            k_zi: 1.0,
            k_iz: 1.0,
        }
    }
}

/// Rates under the perturbative scalings `ix, zx ∝ JΩ`, `zz, iz ∝ J²`, `zi ∝ Ω²`.
/// The second value is a warning when the weak-coupling regime `J ≤ Ω/10` is violated.
pub fn scaling_model(
    j: f64,
    omega: f64,
    k: &ScalingConstants,
) -> Result<(CrCoefficients, Option<String>)> {
    if !(j >= 0.0) || !(omega >= 0.0) {
        return Err(Error::invalid(
            "J/Omega",
            "coupling and drive must be non-negative",
        ));
    }
    let warning = (j > omega / 10.0).then(|| {
        format!("J = {j} is not small against Omega = {omega}; the scalings are perturbative")
    });
    let c = CrCoefficients {
        w_ix: k.k_ix * j * omega,
        w_zx: k.k_zx * j * omega,
        w_zz: k.k_zz * j * j,
        w_zi: k.k_zi * omega * omega,
        w_iz: k.k_iz * j * j,
        ..CrCoefficients::default()
    };
    Ok((c, warning))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{make_default_gaussian, make_square, make_zero};
    use crate::numkit::pauli_decompose;
    use std::f64::consts::PI;

    #[test]
    fn zero_drive_lab_frame_is_static() {
        let h = two_level_lab(5.0, 4.9, PI, &make_zero(1.0).unwrap()).unwrap();
        for t in [0.0, 0.3, 0.9] {
            assert!(h.evaluate(t).max_abs_diff(&ops::pauli_z().scale_real(-2.5)) < 1e-15);
        }
    }

    #[test]
    fn lab_drive_vanishes_at_carrier_zero() {
        let (wd, alpha) = (3.0, PI);
        let h = two_level_lab(3.1, wd, alpha, &make_square(1.0, 5.0).unwrap()).unwrap();
        let t = (2.0 * PI - alpha) / wd;
        assert!(
            h.evaluate(t)
                .max_abs_diff(&ops::pauli_z().scale_real(-1.55))
                < 1e-14
        );
    }

    #[test]
    fn rwa_resonant_square_is_constant_sigma_x() {
        let h = two_level_rwa(0.0, &make_square(PI, 1.0).unwrap()).unwrap();
        assert!(
            h.evaluate(0.4)
                .max_abs_diff(&ops::pauli_x().scale_real(PI / 2.0))
                < 1e-15
        );
        let h0 = two_level_rwa(0.5, &make_zero(1.0).unwrap()).unwrap();
        assert!(
            h0.evaluate(0.4)
                .max_abs_diff(&ops::pauli_z().scale_real(-0.25))
                < 1e-15
        );
    }

    #[test]
    fn iq_model_reduces_to_rwa_without_quadrature() {
        let env = make_default_gaussian(0.3, 2.0).unwrap();
        let a = two_level_rwa(0.2, &env).unwrap();
        let b = two_level_rwa_iq(0.2, &env.as_complex()).unwrap();
        for t in [0.5, 3.3, 7.1] {
            assert!(a.evaluate(t).max_abs_diff(&b.evaluate(t)) < 1e-15);
        }
    }

    #[test]
    fn qutrit_without_drive_is_zero_and_restricts_to_qubit() {
        let z = make_zero(10.0).unwrap().as_complex();
        let h = three_level_rwa(-2.8, 2f64.sqrt(), &z).unwrap();
        assert_eq!(h.evaluate(3.0).max_abs(), 0.0);

        let env = make_default_gaussian(0.2, 6.5).unwrap();
        let q3 = three_level_rwa(-2.8, 0.0, &env.as_complex()).unwrap();
        let q2 = two_level_rwa(0.0, &env).unwrap();
        for t in [1.0, 13.0, 20.5] {
            let block = q3.evaluate(t).truncate(2);
            assert!(block.max_abs_diff(&q2.evaluate(t)) < 1e-12);
        }
    }

    #[test]
    fn qutrit_model_is_hermitian() {
        let env = crate::envelope::drag_quadrature(&make_default_gaussian(0.2, 6.5).unwrap(), -2.8)
            .unwrap();
        let h = three_level_rwa(-2.8, 2f64.sqrt(), &env.as_complex()).unwrap();
        for k in 0..50 {
            assert!(h.evaluate(0.52 * k as f64).hermitian_asymmetry() < 1e-12);
        }
    }

    #[test]
    fn lo_noise_special_cases() {
        let env = make_square(0.7, 2.0).unwrap();
        let h = lo_noise_qubit(&env, |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        assert!(
            h.evaluate(1.0)
                .max_abs_diff(&ops::pauli_x().scale_real(0.35))
                < 1e-15
        );
        let h = lo_noise_qubit(&env, |_| PI / 2.0, |_| 0.0, |_| 0.0).unwrap();
        assert!(
            h.evaluate(1.0)
                .max_abs_diff(&ops::pauli_y().scale_real(0.35))
                < 1e-15
        );
        let a = lo_noise_qubit(&env, |_| 0.2, |t| t.sin(), |t| 0.1 * t).unwrap();
        let b = lo_noise_qubit(&env, |_| 0.2, |t| 0.1 * t, |t| t.sin()).unwrap();
        assert!(a.evaluate(0.7).max_abs_diff(&b.evaluate(0.7)) < 1e-15);
    }

    #[test]
    fn cr_effective_sign_rule() {
        let c = CrCoefficients {
            w_ix: 0.1,
            w_iy: 0.05,
            w_iz: 0.02,
            w_zi: 0.3,
            w_zx: 0.2,
            w_zy: 0.01,
            w_zz: 0.004,
        };
        let plus = pauli_decompose(&cr_effective(&c, 1).unwrap().evaluate(0.0)).unwrap();
        let minus = pauli_decompose(&cr_effective(&c, -1).unwrap().evaluate(0.0)).unwrap();
        for (a, b, w) in c.terms() {
            assert!((plus.get(a, b) - w / 2.0).abs() < 1e-15);
            let flips = b == Pauli::X || b == Pauli::Y;
            let expect = if flips { -w / 2.0 } else { w / 2.0 };
            assert!((minus.get(a, b) - expect).abs() < 1e-15);
        }
        assert!(cr_effective(&c, 0).is_err());
        let zx = cr_effective(&CrCoefficients::zx(0.4), 1)
            .unwrap()
            .evaluate(0.0);
        assert!(zx.max_abs_diff(&pauli_product(Pauli::Z, Pauli::X).scale_real(0.2)) < 1e-15);
    }

    #[test]
    fn scaling_model_proportionalities() {
        let k = ScalingConstants::default();
        let (c, w) = scaling_model(0.01, 0.2, &k).unwrap();
        assert!(w.is_none());
        assert!((c.w_ix - 0.002).abs() < 1e-18);
        assert!((c.w_iz - 1e-4).abs() < 1e-18);
        assert!((c.w_zi - 0.04).abs() < 1e-17);
        assert!(c.w_zi > c.w_ix && c.w_ix == c.w_zx && c.w_zx > c.w_iz && c.w_iz == c.w_zz);

        let (d, _) = scaling_model(0.01, 0.4, &k).unwrap();
        assert!((d.w_ix - 2.0 * c.w_ix).abs() < 1e-18);
        assert!((d.w_zi - 4.0 * c.w_zi).abs() < 1e-17);
        assert_eq!(d.w_zz, c.w_zz);

        let (z, _) = scaling_model(0.0, 0.3, &k).unwrap();
        assert_eq!((z.w_ix, z.w_zx, z.w_zz, z.w_iz), (0.0, 0.0, 0.0, 0.0));
        assert!(z.w_zi > 0.0);

        assert!(scaling_model(0.1, 0.2, &k).unwrap().1.is_some());
    }
}
