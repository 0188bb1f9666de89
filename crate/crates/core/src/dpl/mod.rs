//! Labeled projective dictionary pair learning.
//!
//! Each class `i` owns an analysis dictionary `P_i` (m × n), a synthesis
//! dictionary `D_i` (n × m) and a linear classifier `W_i` (Q × m). Training
//! alternates closed-form updates of the relaxed objective
//!
//! ```text
//! Σ_i ‖X_i − D_i A_i‖² + λ1‖P_i X̄_i‖² + λ2‖H_i − W_i A_i‖² + λ3‖P_i X_i − A_i‖²
//! s.t. ‖d_j‖₂ ≤ 1 for every atom
//! ```
//!
//! over codes `A_i`, then `P_i`, `W_i` and finally `D_i` by ADMM. Classes
//! are fully decoupled and trained independently.

mod dataset;
mod train;
mod updates;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dataset::ClassPartitionedDataset;
pub use train::{init, init_class, train, train_problems, ClassProblem, ClassState, TrainOutput};
pub use updates::{
    class_objective, label_matrix, objective, project_columns, update_a, update_d, update_p,
    update_w, AdmmState, PSolver,
};

/// Which inverse the code update uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CodeUpdate {
    /// `(DᵀD + λ2 WᵀW + λ3 I)⁻¹`, the exact minimizer.
    #[default]
    Corrected,
    /// `(DᵀD + WᵀW + λ3 I)⁻¹` as typeset in the original derivation.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Atoms per class dictionary.
    pub m: usize,
    /// Weight of the cross-class suppression term ‖P_i X̄_i‖².
    pub lambda1: f64,
    /// Weight of the label term ‖H_i − W_i A_i‖².
    pub lambda2: f64,
    /// Weight of the coding term ‖P_i X_i − A_i‖².
    pub lambda3: f64,
    /// Ridge added in the P and W solves.
    pub gamma: f64,
    /// ADMM penalty for the dictionary update.
    pub rho: f64,
    pub outer_iters: usize,
    pub admm_iters: usize,
    pub admm_tol: f64,
    /// Stop when the relative objective decrease falls below this.
    pub tol: f64,
    pub code_update: CodeUpdate,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            m: 340,
            lambda1: 1e-2,
            lambda2: 1.0,
            lambda3: 1e-1,
            gamma: 1e-4,
            rho: 1.0,
            outer_iters: 10,
            admm_iters: 20,
            admm_tol: 1e-6,
            tol: 1e-4,
            code_update: CodeUpdate::Corrected,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let weights = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ];
        for (name, v) in weights {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidConfig(format!("rho must be > 0, got {}", self.rho)));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if !(self.tol >= 0.0) || !(self.admm_tol >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be >= 0".into()));
        }
        Ok(())
    }
}

/// One class's trained triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    /// Analysis dictionary, m × n.
    pub p: Array2<f64>,
    /// Synthesis dictionary, n × m, unit-ball columns.
    pub d: Array2<f64>,
    /// Label classifier, Q × m.
    pub w: Array2<f64>,
}

impl ClassModel {
    pub fn atoms(&self) -> usize {
        self.p.nrows()
    }

    pub fn feature_len(&self) -> usize {
        self.p.ncols()
    }

    /// Largest atom norm of `D`.
    pub fn max_atom_norm(&self) -> f64 {
        self.d
            .columns()
            .into_iter()
            .map(|c| c.dot(&c).sqrt())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(Hyperparameters::default().validate().is_ok());
    }

    #[test]
    fn invalid_hyperparameters() {
        let bad = [
            Hyperparameters { lambda1: -1.0, ..Default::default() },
            Hyperparameters { gamma: 0.0, ..Default::default() },
            Hyperparameters { rho: 0.0, ..Default::default() },
            Hyperparameters { m: 0, ..Default::default() },
            Hyperparameters { lambda3: f64::NAN, ..Default::default() },
        ];
        for hp in bad {
            assert!(hp.validate().is_err(), "{hp:?}");
        }
    }
}
