//! Simulated calibration: generator tomography, cancellation-tone search and generic
//! parameter sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::crgate::with_cancellation;
use crate::error::{Error, Result};
use crate::hamiltonian::{cr_effective, CrCoefficients, TimeDependentHamiltonian};
use crate::io::CsvTable;
use crate::numkit::{
    eigh, pauli_decompose, principal_log_unitary, ComplexMatrix, Pauli, PauliCoefficients,
};
use crate::propagate::{
    average_gate_fidelity, leakage, propagate, propagate_unitary, InitialState,
};

/// Generator of a two-qubit evolution split into CR rates and everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomography {
    pub coefficients: CrCoefficients,
    /// Full decomposition of `H_eff = log(U)/τ`, with `H_eff = Σ c_ab P_a⊗P_b`.
    pub paulis: PauliCoefficients,
    /// Largest `|c_ab|` outside `II` and the seven CR terms.
    pub residual: f64,
}

const CR_TERMS: [(Pauli, Pauli); 8] = [
    (Pauli::I, Pauli::I),
    (Pauli::I, Pauli::X),
    (Pauli::I, Pauli::Y),
    (Pauli::I, Pauli::Z),
    (Pauli::Z, Pauli::I),
    (Pauli::Z, Pauli::X),
    (Pauli::Z, Pauli::Y),
    (Pauli::Z, Pauli::Z),
];

/// Effective rates of the dim-4 `model` over `[0, tau_probe]`, read off the principal
/// logarithm of the propagator. Rates follow the `Σ w_ab P_a⊗P_b / 2` convention.
pub fn effective_tomography(
    model: &TimeDependentHamiltonian,
    tau_probe: f64,
) -> Result<Tomography> {
    if model.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: model.dim(),
        });
    }
    let u = propagate_unitary(model, 0.0, tau_probe, None)?;
    tomography_from_unitary(&u, tau_probe)
}

/// Same as [`effective_tomography`] for an already computed propagator.
pub fn tomography_from_unitary(u: &ComplexMatrix, tau: f64) -> Result<Tomography> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau_probe", "must be positive"));
    }
    let log = principal_log_unitary(u).map_err(|e| match e {
        Error::BranchAmbiguity { eigenphase } => Error::Numerical(format!(
            "generator eigenphase {eigenphase} is too close to pi; reduce tau_probe (currently {tau})"
        )),
        other => other,
    })?;
    let paulis = pauli_decompose(&log.scale_real(1.0 / tau))?;
    let w = |a, b| 2.0 * paulis.get(a, b);
    let coefficients = CrCoefficients {
        w_ix: w(Pauli::I, Pauli::X),
        w_iy: w(Pauli::I, Pauli::Y),
        w_iz: w(Pauli::I, Pauli::Z),
        w_zi: w(Pauli::Z, Pauli::I),
        w_zx: w(Pauli::Z, Pauli::X),
        w_zy: w(Pauli::Z, Pauli::Y),
        w_zz: w(Pauli::Z, Pauli::Z),
    };
    let residual = paulis.max_outside(&CR_TERMS);
    Ok(Tomography {
        coefficients,
        paulis,
        residual,
    })
}

/// Probe time keeping `‖H‖·τ` at one radian for a constant CR model.
pub fn probe_time(c: &CrCoefficients) -> f64 {
    let norm: f64 = c.terms().iter().map(|(_, _, w)| w.abs() / 2.0).sum();
    if norm > 0.0 {
        1.0 / norm
    } else {
        1.0
    }
}

/// `√(w_ix'² + w_iy'²)` of the tomographed CR segment with the cancellation tone applied.
pub fn cancellation_objective(c: &CrCoefficients, amp: f64, phase: f64) -> Result<f64> {
    let compensated = with_cancellation(c, amp, phase);
    let t = effective_tomography(&cr_effective(&compensated, 1)?, probe_time(&compensated))?;
    Ok(t.coefficients.w_ix.hypot(t.coefficients.w_iy))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationResult {
    pub amp: f64,
    pub phase: f64,
    pub residual: f64,
    /// Best objective over the coarse grid, before refinement.
    pub grid_best: f64,
    pub evaluations: usize,
}

/// 21 amplitudes on `[0, 2·|w_ix + i·w_iy|]` and 24 phases on `[0, 2π)`.
pub fn default_grids(c: &CrCoefficients) -> (Vec<f64>, Vec<f64>) {
    let span = 2.0 * c.w_ix.hypot(c.w_iy);
    let amps = (0..21).map(|k| span * k as f64 / 20.0).collect();
    let phases = (0..24).map(|k| 2.0 * PI * k as f64 / 24.0).collect();
    (amps, phases)
}

const GOLDEN_STEPS: usize = 60;

fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64, usize)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
        evaluations += 1;
    }
    Ok(if f1 <= f2 {
        (x1, f1, evaluations)
    } else {
        (x2, f2, evaluations)
    })
}

/// Coarse grid scan, then `refine_iters` rounds of golden-section search alternating
/// between amplitude and phase, each bracketed by one grid step around the incumbent.
pub fn cancellation_search(
    c: &CrCoefficients,
    amp_grid: &[f64],
    phase_grid: &[f64],
    refine_iters: usize,
) -> Result<CancellationResult> {
    if amp_grid.is_empty() || phase_grid.is_empty() {
        return Err(Error::invalid(
            "grid",
            "amplitude and phase grids must be non-empty",
        ));
    }
    let points: Vec<(f64, f64)> = amp_grid
        .iter()
        .flat_map(|&a| phase_grid.iter().map(move |&p| (a, p)))
        .collect();
    let values = points
        .par_iter()
        .map(|&(a, p)| cancellation_objective(c, a, p))
        .collect::<Result<Vec<f64>>>()?;
    let (mut best, mut residual) = (points[0], values[0]);
    for (&pt, &v) in points.iter().zip(&values) {
        if v < residual {
            best = pt;
            residual = v;
        }
    }
    let grid_best = residual;
    let mut evaluations = values.len();
    let step = |grid: &[f64], fallback: f64| {
        let mut sorted = grid.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(fallback)
    };
    let amp_step = step(amp_grid, f64::INFINITY);
    let amp_step = if amp_step.is_finite() { amp_step } else { 0.0 };
    let phase_step = step(phase_grid, PI);
    for _ in 0..refine_iters {
        if amp_step > 0.0 {
            let lo = (best.0 - amp_step).max(0.0);
            let (a, v, n) = golden_section(
                |a| cancellation_objective(c, a, best.1),
                lo,
                best.0 + amp_step,
            )?;
            evaluations += n;
            if v < residual {
                best.0 = a;
                residual = v;
            }
        }
        let (p, v, n) = golden_section(
            |p| cancellation_objective(c, best.0, p),
            best.1 - phase_step,
            best.1 + phase_step,
        )?;
        evaluations += n;
        if v < residual {
            best.1 = p.rem_euclid(2.0 * PI);
            residual = v;
        }
    }
    Ok(CancellationResult {
        amp: best.0,
        phase: best.1,
        residual,
        grid_best,
        evaluations,
    })
}

/// What a sweep records at each axis point. Every metric starts from the model's ground
/// state or unitary over `[0, duration]`.
#[derive(Debug, Clone)]
pub enum Metric {
    /// Population outside the first `comp_dim` levels after evolving `|0⟩`.
    Leakage { comp_dim: usize },
    /// Population of `level` after evolving `|0⟩`.
    Population { level: usize },
    /// Average gate fidelity of the leading block against `target`.
    Fidelity { target: ComplexMatrix },
    /// `|w_ab|` from [`effective_tomography`] with `tau_probe = duration`; all Pauli
    /// coefficients are kept.
    Coefficient { a: Pauli, b: Pauli },
    /// Spread of the propagator's eigenphases divided by the duration (the Rabi rate of a
    /// constant two-level drive, valid while the rotation angle stays below `π`).
    RabiRate,
}

/// A model and the time it is evolved for.
pub type SweepPoint = (TimeDependentHamiltonian, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Vec<f64>,
    /// `NaN` where the point failed.
    pub objective: Vec<f64>,
    pub coefficients: Vec<Option<PauliCoefficients>>,
    pub errors: Vec<Option<String>>,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Axis value and objective of the smallest finite objective.
    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.axis
            .iter()
            .zip(&self.objective)
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(x, v)| (*x, *v))
    }

    /// Columns `axis, objective` followed by the 16 Pauli coefficients when present.
    pub fn to_table(&self) -> CsvTable {
        let with_paulis = self.coefficients.iter().any(Option::is_some);
        let mut header = vec!["axis".to_string(), "objective".to_string()];
        if with_paulis {
            for a in Pauli::ALL {
                for b in Pauli::ALL {
                    header.push(format!("{}{}", a.symbol(), b.symbol()));
                }
            }
        }
        let mut table = CsvTable::new(header);
        for k in 0..self.len() {
            let mut row = vec![self.axis[k], self.objective[k]];
            if with_paulis {
                match &self.coefficients[k] {
                    Some(p) => row.extend(p.iter().map(|(_, _, c)| c)),
                    None => row.extend([f64::NAN; 16]),
                }
            }
            table.push(row);
        }
        table
    }
}

fn evaluate_metric(point: SweepPoint, metric: &Metric) -> Result<(f64, Option<PauliCoefficients>)> {
    let (model, duration) = point;
    match metric {
        Metric::Leakage { comp_dim } => {
            let r = propagate(&model, duration, None, &InitialState::Basis(0))?;
            Ok((leakage(&r, *comp_dim)?, None))
        }
        Metric::Population { level } => {
            let r = propagate(&model, duration, None, &InitialState::Basis(0))?;
            let p = r
                .final_populations()
                .get(*level)
                .copied()
                .ok_or(Error::IndexOutOfRange {
                    index: *level,
                    dim: model.dim(),
                })?;
            Ok((p, None))
        }
        Metric::Fidelity { target } => {
            let u = propagate_unitary(&model, 0.0, duration, None)?;
            Ok((average_gate_fidelity(&u, target, target.dim())?, None))
        }
        Metric::Coefficient { a, b } => {
            let t = effective_tomography(&model, duration)?;
            Ok((t.paulis.get(*a, *b).abs() * 2.0, Some(t.paulis)))
        }
        Metric::RabiRate => {
            let u = propagate_unitary(&model, 0.0, duration, None)?;
            let eig = eigh(&principal_log_unitary(&u)?)?;
            let hi = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
            let spread = hi - lo;
            Ok((spread / duration, None))
        }
    }
}

/// Evaluates `metric` on `factory(x)` for every axis value; failures are recorded per
/// point and do not stop the sweep. Points run in parallel, results keep axis order.
pub fn parameter_sweep<F>(factory: F, axis: &[f64], metric: &Metric) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<SweepPoint> + Sync,
{
    if axis.is_empty() {
        return Err(Error::invalid("axis", "must be non-empty"));
    }
    let outcomes: Vec<Result<(f64, Option<PauliCoefficients>)>> = axis
        .par_iter()
        .map(|&x| factory(x).and_then(|p| evaluate_metric(p, metric)))
        .collect();
    let mut result = SweepResult {
        axis: axis.to_vec(),
        objective: Vec::with_capacity(axis.len()),
        coefficients: Vec::with_capacity(axis.len()),
        errors: Vec::with_capacity(axis.len()),
    };
    for outcome in outcomes {
        match outcome {
            Ok((v, c)) => {
                result.objective.push(v);
                result.coefficients.push(c);
                result.errors.push(None);
            }
            Err(e) => {
                result.objective.push(f64::NAN);
                result.coefficients.push(None);
                result.errors.push(Some(e.to_string()));
            }
        }
    }
    Ok(result)
}
