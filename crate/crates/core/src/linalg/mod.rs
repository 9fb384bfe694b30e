//! Dense complex matrices and the subspace calculus built on the SVD.
//!
//! Ranks, kernels and ranges are all decided by singular values against a
//! relative cutoff `tol · σ_max`. Subspaces are carried as orthonormal bases.

mod chain;
mod matrix;
pub(crate) mod schur;
mod subspace;
mod svd;
pub mod text;

pub use chain::{power_chain, power_chain_abs, PowerChain};
pub use matrix::{product, CMatrix};
pub use schur::{ordered_schur, OrderedSchur};
pub use subspace::{intersect, subspace_sum, SubspaceBasis, DEFAULT_SUBSPACE_TOL};
pub use svd::{null_basis, null_basis_abs, pinv, pinv_rank, range_basis, range_basis_abs, rank, rank_abs, singular_values};

pub use num_complex::Complex64;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix shape {rows}x{cols} has an empty dimension")]
    EmptyShape { rows: usize, cols: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("tolerance must be finite and nonnegative, got {0}")]
    BadTolerance(f64),
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("Schur decomposition did not converge")]
    SchurFailed,
    #[error("matrix text: {0}")]
    Parse(String),
}

/// Default relative rank cutoff: `max(rows, cols) · ε`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

pub(crate) fn check_tol(tol: f64) -> Result<(), LinalgError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(LinalgError::BadTolerance(tol))
    }
}

pub(crate) fn require_square(m: &CMatrix) -> Result<usize, LinalgError> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}
