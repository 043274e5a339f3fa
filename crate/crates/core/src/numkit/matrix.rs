//! Small dense complex matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest dimension the kernel is meant for (two three-level transmons).
pub const MAX_DIM: usize = 9;

/// Dense row-major complex matrix of small dimension.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. The entry count must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
                .collect(),
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    /// `|row><col|` in dimension `dim`.
    pub fn outer_basis(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(row, col)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * v[c]).sum())
            .collect()
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self[(r1, c1)];
                if a == ZERO {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        out[(r1 * m + r2, c1 * m + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Hilbert–Schmidt inner product `Tr(self† · other)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in hs_inner");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self − other|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M[i][j] − conj(M[j][i])|`
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Fails with the observed asymmetry when it exceeds `tol`.
    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let asym = self.hermitian_asymmetry();
        if asym > tol {
            Err(Error::NotHermitian { asymmetry: asym })
        } else {
            Ok(())
        }
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    /// Leading `k × k` block.
    pub fn truncate(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.dim, "block size out of range");
        let mut out = Self::zeros(k);
        for r in 0..k {
            for c in 0..k {
                out[(r, c)] = self[(r, c)];
            }
        }
        out
    }

    /// Distance to `other` after removing the best global phase, together with that phase.
    ///
    /// Returns `(min_φ ‖self − e^{iφ} other‖_max, φ)` where φ is fixed by the overlap
    /// `Tr(other† self)`.
    pub fn phase_distance(&self, other: &Self) -> (f64, f64) {
        let overlap = other.hs_inner(self);
        let phase = if overlap.norm() > 0.0 {
            overlap.arg()
        } else {
            0.0
        };
        let rotated = other.scale(Complex64::from_polar(1.0, phase));
        (self.max_abs_diff(&rotated), phase)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self += &rhs;
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.add_scaled(rhs, ONE);
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices and the three-level transition operators.
pub mod ops {
    use super::*;

    pub fn pauli_i() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Raising operator `|k+1><k|` between neighbouring levels.
    pub fn raise(dim: usize, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer_basis(dim, k + 1, k)
    }

    /// `|hi><lo|` for any pair of levels.
    pub fn transition(dim: usize, lo: usize, hi: usize) -> ComplexMatrix {
        ComplexMatrix::outer_basis(dim, hi, lo)
    }

    /// `σ⁺ + σ⁻` on the `lo ↔ hi` pair.
    pub fn sigma_x(dim: usize, lo: usize, hi: usize) -> ComplexMatrix {
        let up = transition(dim, lo, hi);
        &up + &up.adjoint()
    }

    /// `iσ⁺ − iσ⁻` on the `lo ↔ hi` pair.
    pub fn sigma_y(dim: usize, lo: usize, hi: usize) -> ComplexMatrix {
        let up = transition(dim, lo, hi);
        &up.scale(I) - &up.adjoint().scale(I)
    }

    /// `|lo><lo| − |hi><hi|`
    pub fn sigma_z(dim: usize, lo: usize, hi: usize) -> ComplexMatrix {
        &ComplexMatrix::outer_basis(dim, lo, lo) - &ComplexMatrix::outer_basis(dim, hi, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::ops::*;
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // XY = iZ
        assert!(x.matmul(&y).max_abs_diff(&z.scale(I)) < 1e-15);
        assert!(z.matmul(&x).max_abs_diff(&y.scale(I)) < 1e-15);
        assert!(x.commutator(&y).max_abs_diff(&z.scale(2.0 * I)) < 1e-15);
    }

    #[test]
    fn embedded_operators_match_qubit_paulis() {
        assert_eq!(sigma_x(2, 0, 1), pauli_x());
        assert_eq!(sigma_y(2, 0, 1), pauli_y());
        assert_eq!(sigma_z(2, 0, 1), pauli_z());
    }

    #[test]
    fn kron_ordering_is_control_major() {
        // Z⊗X: block diag(X, −X)
        let zx = pauli_z().kron(&pauli_x());
        assert_eq!(zx[(0, 1)], ONE);
        assert_eq!(zx[(2, 3)], -ONE);
        assert_eq!(zx[(0, 2)], ZERO);
    }

    #[test]
    fn from_row_major_rejects_non_square_counts() {
        assert!(ComplexMatrix::from_row_major(vec![ONE; 5]).is_err());
        assert_eq!(
            ComplexMatrix::from_row_major(vec![ONE; 9]).unwrap().dim(),
            3
        );
    }

    #[test]
    fn phase_distance_recovers_global_phase() {
        let x = pauli_x();
        let rotated = x.scale(Complex64::from_polar(1.0, 0.7));
        let (d, phase) = rotated.phase_distance(&x);
        assert!(d < 1e-15);
        assert!((phase - 0.7).abs() < 1e-15);
    }
}
