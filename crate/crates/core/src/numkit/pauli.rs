//! Two-qubit Pauli product basis.

use std::fmt;

use num_complex::Complex64;

use super::matrix::{ops, ComplexMatrix};
use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ops::pauli_i(),
            Pauli::X => ops::pauli_x(),
            Pauli::Y => ops::pauli_y(),
            Pauli::Z => ops::pauli_z(),
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `a ⊗ b`, control (first factor) major.
pub fn pauli_product(a: Pauli, b: Pauli) -> ComplexMatrix {
    a.matrix().kron(&b.matrix())
}

/// Coefficients of a dim-4 operator in the `{I,X,Y,Z}⊗{I,X,Y,Z}` basis.
///
/// `real[a][b] = Re Tr((P_a⊗P_b)·M)/4`; the imaginary parts are kept separately and vanish
/// for Hermitian `M`.
#[derive(Clone, PartialEq)]
pub struct PauliCoefficients {
    real: [[f64; 4]; 4],
    imag: [[f64; 4]; 4],
}

impl PauliCoefficients {
    pub fn zero() -> Self {
        Self {
            real: [[0.0; 4]; 4],
            imag: [[0.0; 4]; 4],
        }
    }

    pub fn get(&self, a: Pauli, b: Pauli) -> f64 {
        self.real[a.index()][b.index()]
    }

    pub fn get_imag(&self, a: Pauli, b: Pauli) -> f64 {
        self.imag[a.index()][b.index()]
    }

    pub fn set(&mut self, a: Pauli, b: Pauli, value: f64) {
        self.real[a.index()][b.index()] = value;
    }

    /// Iterates `(a, b, coefficient)` over all 16 products.
    pub fn iter(&self) -> impl Iterator<Item = (Pauli, Pauli, f64)> + '_ {
        Pauli::ALL
            .into_iter()
            .flat_map(move |a| Pauli::ALL.into_iter().map(move |b| (a, b, self.get(a, b))))
    }

    /// Largest imaginary part; zero (to rounding) for Hermitian sources.
    pub fn max_imag(&self) -> f64 {
        self.imag
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `Σ c_ab (P_a⊗P_b)` from the real coefficients.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for (a, b, c) in self.iter() {
            if c != 0.0 {
                out.add_scaled(&pauli_product(a, b), Complex64::new(c, 0.0));
            }
        }
        out
    }

    /// Largest coefficient magnitude outside `allowed`.
    pub fn max_outside(&self, allowed: &[(Pauli, Pauli)]) -> f64 {
        self.iter()
            .filter(|(a, b, _)| !allowed.contains(&(*a, *b)))
            .fold(0.0_f64, |m, (_, _, c)| m.max(c.abs()))
    }
}

impl fmt::Debug for PauliCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (a, b, c) in self.iter() {
            if c != 0.0 {
                map.entry(&format!("{}{}", a.symbol(), b.symbol()), &c);
            }
        }
        map.finish()
    }
}

pub fn pauli_decompose(m: &ComplexMatrix) -> Result<PauliCoefficients> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.dim(),
        });
    }
    let mut out = PauliCoefficients::zero();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let t = pauli_product(a, b).matmul(m).trace() / 4.0;
            out.real[a.index()][b.index()] = t.re;
            out.imag[a.index()][b.index()] = t.im;
        }
    }
    Ok(out)
}
