//! Dense symmetric positive-definite solves.

use ndarray::{Array2, ArrayBase, Data, Ix2};
use ndarray_linalg::{Cholesky, Diag, SolveTriangular, UPLO};

use crate::error::{Error, Result};

/// Cholesky factor `L` of an SPD matrix `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    lower: Array2<f64>,
}

impl SpdFactor {
    pub fn new<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, what: &'static str) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem(what));
        }
        let lower = m
            .cholesky(UPLO::Lower)
            .map_err(|_| Error::SingularSystem(what))?;
        if lower.diag().iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::SingularSystem(what));
        }
        Ok(SpdFactor { lower })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `M⁻¹ B`.
    pub fn solve_left<S: Data<Elem = f64>>(&self, b: &ArrayBase<S, Ix2>) -> Array2<f64> {
        let y = self
            .lower
            .solve_triangular(UPLO::Lower, Diag::NonUnit, &b.to_owned())
            .expect("triangular solve with nonsingular factor");
        self.lower
            .t()
            .solve_triangular(UPLO::Upper, Diag::NonUnit, &y)
            .expect("triangular solve with nonsingular factor")
    }

    /// `B M⁻¹` (M symmetric, so this is `(M⁻¹ Bᵀ)ᵀ`).
    pub fn solve_right<S: Data<Elem = f64>>(&self, b: &ArrayBase<S, Ix2>) -> Array2<f64> {
        let bt = b.t().to_owned();
        let x = self.solve_left(&bt);
        x.reversed_axes().as_standard_layout().to_owned()
    }

    /// Explicit `M⁻¹`.
    pub fn inverse(&self) -> Array2<f64> {
        self.solve_left(&Array2::eye(self.dim()))
    }
}

/// `a + shift·I` for a square matrix.
pub fn add_diagonal(mut a: Array2<f64>, shift: f64) -> Array2<f64> {
    a.diag_mut().iter_mut().for_each(|d| *d += shift);
    a
}

/// Squared Frobenius norm.
pub fn fro2<S: Data<Elem = f64>>(a: &ArrayBase<S, Ix2>) -> f64 {
    a.iter().map(|v| v * v).sum()
}
