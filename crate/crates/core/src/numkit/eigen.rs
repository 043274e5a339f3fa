//! Hermitian eigendecomposition (cyclic complex Jacobi) and the exponential/logarithm
//! maps built on it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, I};
use crate::error::{Error, Result};

/// Tolerance for Hermitian preconditions.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance for unitary preconditions.
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenphases closer than this to ±π are rejected by [`principal_log_unitary`].
pub const BRANCH_MARGIN: f64 = 1e-6;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending order not guaranteed) and the unitary whose columns are the
/// corresponding eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic Jacobi rotations.
///
/// Each rotation first strips the phase of the pivot `a_pq` and then applies the real
/// symmetric Jacobi rotation, so the accumulated transform stays exactly unitary up to
/// rounding.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    h.ensure_hermitian(HERMITIAN_TOL)?;
    let n = h.dim();
    let mut a = (h + &h.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 || b <= 1e-19 * scale {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / b; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e_minus = phase.conj();

                // A ← A·G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * e_minus * s;
                    a[(k, q)] = akp * s + akq * e_minus * c;
                }
                // A ← G†·A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V ← V·G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * e_minus * s;
                    v[(k, q)] = vkp * s + vkq * e_minus * c;
                }
            }
        }
    }

    Ok(HermitianEigen {
        values: (0..n).map(|k| a[(k, k)].re).collect(),
        vectors: v,
    })
}

/// `V · diag(f(λ)) · V†`
fn spectral_map(eig: &HermitianEigen, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let n = eig.vectors.dim();
    let v = &eig.vectors;
    let fl: Vec<Complex64> = eig.values.iter().map(|&l| f(l)).collect();
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = (0..n).map(|k| v[(r, k)] * fl[k] * v[(c, k)].conj()).sum();
        }
    }
    out
}

/// `exp(−i·H·t)` for Hermitian `H`.
pub fn expm_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    Ok(spectral_map(&eig, |l| Complex64::from_polar(1.0, -l * t)))
}

/// Hermitian `H` with `exp(−iH) = U` and spectrum inside `(−π, π)`.
///
/// `U` is diagonalized through the Hermitian combination `Re U + α·Im U` (which shares
/// its eigenvectors); accidental degeneracies between distinct eigenphases are detected
/// by checking that the basis actually diagonalizes `U`, and another `α` is tried.
pub fn principal_log_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let n = u.dim();
    let ud = u.adjoint();
    let re_part = (u + &ud).scale_real(0.5);
    let im_part = (u - &ud).scale(-0.5 * I);

    for alpha in [
        0.618_033_988_749_894_8,
        -0.414_213_562_373_095,
        1.732_050_807_568_877,
        0.267_949_192_431_122_7,
    ] {
        let mut k = re_part.clone();
        k.add_scaled(&im_part, Complex64::new(alpha, 0.0));
        // Both parts are Hermitian by construction; clean rounding asymmetry.
        let k = (&k + &k.adjoint()).scale_real(0.5);
        let eig = eigh(&k)?;
        let v = &eig.vectors;
        let d = v.adjoint().matmul(u).matmul(v);
        let mut off: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off = off.max(d[(r, c)].norm());
                }
            }
        }
        if off > 1e-10 {
            continue;
        }
        let mut phases = Vec::with_capacity(n);
        for j in 0..n {
            let theta = -d[(j, j)].arg();
            if theta.abs() >= std::f64::consts::PI - BRANCH_MARGIN {
                return Err(Error::BranchAmbiguity { eigenphase: theta });
            }
            phases.push(theta);
        }
        let eig = HermitianEigen {
            values: phases,
            vectors: v.clone(),
        };
        return Ok(spectral_map(&eig, |l| Complex64::new(l, 0.0)));
    }
    Err(Error::Numerical(
        "failed to diagonalize unitary: persistent eigenvalue collision".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::super::matrix::ops::*;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_generator_gives_identity() {
        let u = expm_hermitian_generator(&ComplexMatrix::zeros(2), 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn half_pi_sigma_x_is_minus_i_sigma_x() {
        let h = pauli_x().scale_real(PI / 2.0);
        let u = expm_hermitian_generator(&h, 1.0).unwrap();
        assert!(u.max_abs_diff(&pauli_x().scale(-I)) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_and_reports_asymmetry() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        match expm_hermitian_generator(&m, 1.0) {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_of_identity_is_zero() {
        let h = principal_log_unitary(&ComplexMatrix::identity(3)).unwrap();
        assert!(h.max_abs() < 1e-15);
    }

    #[test]
    fn log_inverts_expm_on_sigma_z() {
        let u = expm_hermitian_generator(&pauli_z(), 0.3).unwrap();
        let h = principal_log_unitary(&u).unwrap();
        assert!(h.max_abs_diff(&pauli_z().scale_real(0.3)) < 1e-14);
    }

    #[test]
    fn minus_identity_is_branch_ambiguous() {
        let u = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!(matches!(
            principal_log_unitary(&u),
            Err(Error::BranchAmbiguity { .. })
        ));
    }

    #[test]
    fn log_rejects_non_unitary() {
        let u = ComplexMatrix::identity(2).scale_real(1.1);
        assert!(matches!(
            principal_log_unitary(&u),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        // Z⊗X has a doubly degenerate spectrum {±1}
        let zx = pauli_z().kron(&pauli_x());
        let eig = eigh(&zx).unwrap();
        let mut vals = eig.values.clone();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        let u = expm_hermitian_generator(&zx, 0.4).unwrap();
        let h = principal_log_unitary(&u).unwrap();
        assert!(h.max_abs_diff(&zx.scale_real(0.4)) < 1e-13);
    }
}
