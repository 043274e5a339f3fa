//! Exact time evolution by midpoint exponential stepping, plus population, leakage and
//! fidelity metrics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::TimeDependentHamiltonian;
use crate::io::CsvTable;
use crate::numkit::{expm_hermitian_generator, ComplexMatrix, HERMITIAN_TOL, ONE, ZERO};

pub const MIN_STEPS: usize = 8;
pub const DEFAULT_MIN_STEPS: usize = 4096;
pub const MAX_STEPS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Basis(usize),
    Vector(Vec<Complex64>),
}

impl InitialState {
    fn vector(&self, dim: usize) -> Result<Vec<Complex64>> {
        match self {
            InitialState::Basis(k) => {
                if *k >= dim {
                    return Err(Error::IndexOutOfRange { index: *k, dim });
                }
                let mut v = vec![ZERO; dim];
                v[*k] = ONE;
                Ok(v)
            }
            InitialState::Vector(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::invalid(
                        "initial",
                        format!("state norm is {norm}, expected 1"),
                    ));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub final_unitary: ComplexMatrix,
    pub times: Vec<f64>,
    /// `populations[k][n]` is the population of level `k` at `times[n]`.
    pub populations: Vec<Vec<f64>>,
    /// `ρ₀₁ = ψ₀·conj(ψ₁)` at each sample.
    pub coherence01: Vec<Complex64>,
    pub final_state: Vec<Complex64>,
}

impl PropagationResult {
    pub fn final_populations(&self) -> Vec<f64> {
        self.populations
            .iter()
            .map(|p| *p.last().expect("non-empty"))
            .collect()
    }

    /// Columns `t, P0, P1, …, re_c01, im_c01`.
    pub fn to_table(&self) -> CsvTable {
        let mut header = vec!["t".to_string()];
        header.extend((0..self.populations.len()).map(|k| format!("P{k}")));
        header.push("re_c01".into());
        header.push("im_c01".into());
        let mut table = CsvTable::new(header);
        for (n, t) in self.times.iter().enumerate() {
            let mut row = vec![*t];
            row.extend(self.populations.iter().map(|p| p[n]));
            row.push(self.coherence01[n].re);
            row.push(self.coherence01[n].im);
            table.push(row);
        }
        table
    }
}

/// `max(4096, 64·T·max‖H‖/2π)`, capped at `2²⁰`.
pub fn default_steps(model: &TimeDependentHamiltonian, t0: f64, t1: f64) -> usize {
    let duration = t1 - t0;
    let norm = (0..=256)
        .map(|k| {
            model
                .evaluate(t0 + duration * k as f64 / 256.0)
                .frobenius_norm()
        })
        .fold(0.0, f64::max);
    let wanted = (64.0 * duration * norm / (2.0 * std::f64::consts::PI)).ceil();
    (wanted as usize).clamp(DEFAULT_MIN_STEPS, MAX_STEPS)
}

fn step_unitary(model: &TimeDependentHamiltonian, t_mid: f64, h: f64) -> Result<ComplexMatrix> {
    run_unitary(&model.evaluate(t_mid), h)
}

/// Evolves over `[0, T]`; `steps = None` picks [`default_steps`].
pub fn propagate(
    model: &TimeDependentHamiltonian,
    duration: f64,
    steps: Option<usize>,
    initial: &InitialState,
) -> Result<PropagationResult> {
    propagate_between(model, 0.0, duration, steps, initial)
}

/// Evolves over `[t0, t1]` with `U ← exp(−i·H(t_mid)·h)·U`.
pub fn propagate_between(
    model: &TimeDependentHamiltonian,
    t0: f64,
    t1: f64,
    steps: Option<usize>,
    initial: &InitialState,
) -> Result<PropagationResult> {
    if !(t1 > t0) {
        return Err(Error::invalid(
            "T",
            format!("duration must be positive, got {}", t1 - t0),
        ));
    }
    let steps = steps.unwrap_or_else(|| default_steps(model, t0, t1));
    if steps < MIN_STEPS {
        return Err(Error::invalid(
            "steps",
            format!("need at least {MIN_STEPS}, got {steps}"),
        ));
    }
    let dim = model.dim();
    let mut psi = initial.vector(dim)?;
    let h = (t1 - t0) / steps as f64;
    let constant_step = if model.is_constant() {
        Some(step_unitary(model, t0, h)?)
    } else {
        None
    };

    let mut u = ComplexMatrix::identity(dim);
    let mut times = Vec::with_capacity(steps + 1);
    let mut populations = vec![Vec::with_capacity(steps + 1); dim];
    let mut coherence01 = Vec::with_capacity(steps + 1);
    let mut record = |t: f64, psi: &[Complex64]| {
        times.push(t);
        for (k, p) in populations.iter_mut().enumerate() {
            p.push(psi[k].norm_sqr());
        }
        coherence01.push(if dim >= 2 {
            psi[0] * psi[1].conj()
        } else {
            ZERO
        });
    };
    record(t0, &psi);
    for n in 0..steps {
        let owned;
        let step = match &constant_step {
            Some(s) => s,
            None => {
                owned = step_unitary(model, t0 + (n as f64 + 0.5) * h, h)?;
                &owned
            }
        };
        u = step.matmul(&u);
        psi = step.apply(&psi);
        record(t0 + (n + 1) as f64 * h, &psi);
    }
    Ok(PropagationResult {
        final_unitary: u,
        times,
        populations,
        coherence01,
        final_state: psi,
    })
}

/// Final unitary only, without population bookkeeping.
pub fn propagate_unitary(
    model: &TimeDependentHamiltonian,
    t0: f64,
    t1: f64,
    steps: Option<usize>,
) -> Result<ComplexMatrix> {
    if !(t1 > t0) {
        return Err(Error::invalid(
            "T",
            format!("duration must be positive, got {}", t1 - t0),
        ));
    }
    let steps = steps.unwrap_or_else(|| default_steps(model, t0, t1));
    if steps < MIN_STEPS {
        return Err(Error::invalid(
            "steps",
            format!("need at least {MIN_STEPS}, got {steps}"),
        ));
    }
    let h = (t1 - t0) / steps as f64;
    if model.is_constant() {
        return expm_hermitian_generator(&model.evaluate(t0), t1 - t0);
    }
    // Runs of identical midpoint Hamiltonians (square pulses, plateaus, held samples)
    // are exponentiated once over the whole run, which avoids repeating the same
    // rounding error at every step.
    let mut u = ComplexMatrix::identity(model.dim());
    let mut run: Option<(ComplexMatrix, usize)> = None;
    for n in 0..steps {
        let hm = model.evaluate(t0 + (n as f64 + 0.5) * h);
        match &mut run {
            Some((prev, len)) if *prev == hm => *len += 1,
            _ => {
                if let Some((prev, len)) = run.take() {
                    u = run_unitary(&prev, len as f64 * h)?.matmul(&u);
                }
                run = Some((hm, 1));
            }
        }
    }
    if let Some((prev, len)) = run {
        u = run_unitary(&prev, len as f64 * h)?.matmul(&u);
    }
    Ok(u)
}

fn run_unitary(hm: &ComplexMatrix, duration: f64) -> Result<ComplexMatrix> {
    hm.ensure_hermitian(HERMITIAN_TOL)?;
    expm_hermitian_generator(hm, duration)
}

/// `|U[to][from]|²`
pub fn transition_probability(u: &ComplexMatrix, from: usize, to: usize) -> Result<f64> {
    for index in [from, to] {
        if index >= u.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: u.dim(),
            });
        }
    }
    Ok(u[(to, from)].norm_sqr())
}

/// `1 − Σ_{k < comp_dim} P_k(T)`; exactly zero when nothing lies outside the subspace.
pub fn leakage(result: &PropagationResult, comp_dim: usize) -> Result<f64> {
    let dim = result.populations.len();
    if comp_dim == 0 || comp_dim > dim {
        return Err(Error::invalid(
            "comp_dim",
            format!("must lie in 1..={dim}, got {comp_dim}"),
        ));
    }
    if comp_dim == dim {
        return Ok(0.0);
    }
    let outside: f64 = result.final_populations()[comp_dim..].iter().sum();
    Ok(outside.clamp(0.0, 1.0))
}

/// `(|Tr(T†·U_c)|² + d)/(d(d+1))` with `U_c` the leading `d×d` block of `U`.
///
/// For a block that is not unitary (leakage) this is the usual convention rather than a
/// true average over the computational subspace.
pub fn average_gate_fidelity(
    u: &ComplexMatrix,
    target: &ComplexMatrix,
    comp_dim: usize,
) -> Result<f64> {
    if target.dim() != comp_dim {
        return Err(Error::DimensionMismatch {
            expected: comp_dim,
            found: target.dim(),
        });
    }
    if comp_dim == 0 || comp_dim > u.dim() {
        return Err(Error::invalid(
            "comp_dim",
            "must not exceed the propagator dimension",
        ));
    }
    let block = u.truncate(comp_dim);
    let overlap = target.adjoint().matmul(&block).trace().norm_sqr();
    let d = comp_dim as f64;
    Ok(((overlap + d) / (d * (d + 1.0))).clamp(0.0, 1.0))
}
