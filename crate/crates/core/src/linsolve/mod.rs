//! Direct linear solvers behind operator application and shifted solves.
//!
//! A [`Factorization`] is immutable once built, so concurrent solves against
//! one factorization are safe. Factorizations are rebuilt whenever the shift
//! changes; there is no low-rank updating.

mod band;
mod dense;

pub use band::{BandCholesky, BandLu};
pub use dense::{DenseLu, Matrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::StencilMatrix;

/// Estimated 1-norm condition numbers above this attach a warning.
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e15;

/// Identifies the system a factorization was built for: the operator's
/// identity and the shift `λ` in `λ·I − op`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorTarget {
    pub operator_id: u64,
    pub shift: f64,
}

/// Non-fatal report that the factored matrix is numerically ill-conditioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionWarning {
    pub condition_estimate: f64,
}

#[derive(Debug, Clone)]
enum Factor {
    Lu(DenseLu),
    Cholesky(BandCholesky),
    BandLu(BandLu),
}

#[derive(Debug, Clone)]
pub struct Factorization {
    factor: Factor,
    target: Option<FactorTarget>,
    warning: Option<ConditionWarning>,
    pivot_growth: f64,
}

impl Factorization {
    pub fn dim(&self) -> usize {
        match &self.factor {
            Factor::Lu(f) => f.dim(),
            Factor::Cholesky(f) => f.dim(),
            Factor::BandLu(f) => f.dim(),
        }
    }

    pub fn target(&self) -> Option<FactorTarget> {
        self.target
    }

    pub fn with_target(mut self, target: FactorTarget) -> Self {
        self.target = Some(target);
        self
    }

    pub fn warning(&self) -> Option<ConditionWarning> {
        self.warning
    }

    /// `max|U| / max|A|` for dense LU; 1 for the other kinds.
    pub fn pivot_growth(&self) -> f64 {
        self.pivot_growth
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: b.len(),
            });
        }
        Ok(match &self.factor {
            Factor::Lu(f) => f.solve(b),
            Factor::Cholesky(f) => f.solve(b),
            Factor::BandLu(f) => f.solve(b),
        })
    }

    /// Like [`solve`](Self::solve) but refuses to run unless this
    /// factorization was built for `target`.
    pub fn solve_for(&self, target: &FactorTarget, b: &[f64]) -> Result<Vec<f64>> {
        match self.target {
            Some(t) if t == *target => self.solve(b),
            _ => Err(Error::TargetMismatch),
        }
    }
}

/// LU with partial pivoting of a dense square matrix.
pub fn factor_dense(m: &Matrix) -> Result<Factorization> {
    let norm = m.norm_one();
    let lu = DenseLu::factor(m.clone())?;
    let cond = norm * lu.inverse_norm_one_estimate();
    let warning = (!(cond <= CONDITION_WARNING_THRESHOLD)).then_some(ConditionWarning {
        condition_estimate: cond,
    });
    let pivot_growth = lu.pivot_growth();
    Ok(Factorization {
        factor: Factor::Lu(lu),
        target: None,
        warning,
        pivot_growth,
    })
}

/// Symmetric band factorization of `scale·S + diagonal_shift·I`.
///
/// With `scale = λ` and `diagonal_shift = -1` this is `λ(−Δ_h) − I`, which is
/// positive definite exactly when `λ` exceeds the largest eigenvalue of
/// `(−Δ_h)⁻¹`. A non-positive-definite system is reported as a shift
/// collision at `scale`.
pub fn factor_stencil(s: &StencilMatrix, scale: f64, diagonal_shift: f64) -> Result<Factorization> {
    let entry = |i: usize, j: usize| {
        let v = scale * s.entry(i, j);
        if i == j {
            v + diagonal_shift
        } else {
            v
        }
    };
    let chol = BandCholesky::factor(s.dim(), s.bandwidth(), entry)
        .map_err(|_| Error::ShiftCollision { lambda: scale })?;
    Ok(Factorization {
        factor: Factor::Cholesky(chol),
        target: None,
        warning: None,
        pivot_growth: 1.0,
    })
}

/// Pivoted band LU of `scale·S + diagonal_shift·I` for shifts inside the
/// spectrum, where the system is indefinite.
pub fn factor_stencil_indefinite(
    s: &StencilMatrix,
    scale: f64,
    diagonal_shift: f64,
) -> Result<Factorization> {
    let b = s.bandwidth();
    let entry = |i: usize, j: usize| {
        let v = scale * s.entry(i, j);
        if i == j {
            v + diagonal_shift
        } else {
            v
        }
    };
    let lu = BandLu::factor(s.dim(), b, b, entry)?;
    Ok(Factorization {
        factor: Factor::BandLu(lu),
        target: None,
        warning: None,
        pivot_growth: 1.0,
    })
}

/// Pivoted LU of a tridiagonal matrix given by its three diagonals.
pub fn factor_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Factorization> {
    let n = diag.len();
    if lower.len() + 1 != n.max(1) || upper.len() + 1 != n.max(1) {
        return Err(Error::Shape {
            expected: n.saturating_sub(1),
            got: lower.len(),
        });
    }
    let entry = |i: usize, j: usize| {
        if i == j {
            diag[i]
        } else if i == j + 1 {
            lower[j]
        } else {
            upper[i]
        }
    };
    let lu = BandLu::factor(n, 1, 1, entry)?;
    Ok(Factorization {
        factor: Factor::BandLu(lu),
        target: None,
        warning: None,
        pivot_growth: 1.0,
    })
}

/// Solves with a prebuilt factorization.
pub fn solve(f: &Factorization, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}
