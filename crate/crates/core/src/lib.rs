//! Principal eigenpairs of Perron-Frobenius-like operators.
//!
//! The central algorithm is a shifted inverse iteration whose shift is reset
//! every step to the upper Collatz-Wielandt bound of the current iterate.
//! Starting from any entrywise-positive vector, the shifts decrease strictly
//! toward the principal eigenvalue and converge quadratically.
//!
//! Supported operators are nonnegative dense matrices (including Hilbert
//! matrices), random nonnegative symmetric tridiagonal matrices, and the
//! inverse of the 5-point discrete Dirichlet Laplacian on a 2-D grid domain.
//!
//! ```
//! use cwpower::operators::{hilbert_matrix, PositiveOperator};
//! use cwpower::iteration::{variable_lambda_power, SolverConfig};
//!
//! let h = hilbert_matrix(10).unwrap();
//! let v0 = vec![1.0; h.dim()];
//! let report = variable_lambda_power(&h, &v0, &SolverConfig::for_kind(h.kind())).unwrap();
//! assert!((report.lambda - 1.7519196702651774).abs() < 1e-12);
//! ```

// NaN must fail positivity and finiteness checks, hence `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod iteration;
pub mod linsolve;
pub mod operators;

pub use error::{Error, Result};

pub(crate) mod vecops {
    pub fn norm2(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm_inf(v: &[f64]) -> f64 {
        v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Returns `v / ‖v‖₂`. The caller guarantees `v` is nonzero.
    pub fn normalized(v: &[f64]) -> Vec<f64> {
        let n = norm2(v);
        v.iter().map(|x| x / n).collect()
    }
}
