//! Positivity-preserving linear operators.
//!
//! Every operator here maps nonnegative nonzero vectors to entrywise-positive
//! vectors and has a simple dominant eigenvalue. For user-supplied dense
//! matrices this requires the matrix to be primitive; primitivity is not
//! checked, and the iterations in [`crate::iteration`] have unspecified
//! behaviour on imprimitive input (for instance a periodic permutation
//! matrix).
//!
//! Operators are immutable after construction and may be shared across
//! threads.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{assemble, GridDomain, StencilMatrix};
use crate::linsolve::{
    factor_dense, factor_stencil, factor_stencil_indefinite, factor_tridiagonal, FactorTarget,
    Factorization, Matrix,
};
use crate::vecops::norm_inf;

/// Entries of a shifted solve below `-POSITIVITY_TOLERANCE·‖w‖∞` are a
/// positivity violation.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

static NEXT_OPERATOR_ID: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    NEXT_OPERATOR_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    DenseMatrix,
    Tridiagonal,
    InverseLaplacian,
}

impl OperatorKind {
    /// Matrix kinds apply cheaply; operator kinds need a linear solve per
    /// application.
    pub fn is_matrix(self) -> bool {
        !matches!(self, OperatorKind::InverseLaplacian)
    }
}

/// Where the shift of a shifted solve is expected to lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRegion {
    /// Above the principal eigenvalue, so `λ − op` is an M-matrix-like
    /// positive inverse. Grid operators use a Cholesky factorization here.
    AboveSpectrum,
    /// Anywhere; the system may be indefinite.
    Interior,
}

pub trait PositiveOperator: Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> OperatorKind;

    /// Identity used to tag factorizations.
    fn id(&self) -> u64;

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>>;

    /// Factors `λ·I − op` for repeated solves.
    fn factor_shifted(&self, lambda: f64, region: ShiftRegion) -> Result<ShiftedSystem<'_>>;

    /// Structured access for oracles that need more than `apply`.
    fn as_tridiagonal(&self) -> Option<&TridiagonalMatrix> {
        None
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.dim(),
                got: v.len(),
            })
        }
    }
}

/// A factored `λ·I − op`. For the inverse Laplacian the factor is of
/// `λ·A_h − I` and solutions are post-multiplied by `A_h`, using
/// `(λ − A_h⁻¹)⁻¹ = A_h·(λ·A_h − I)⁻¹`.
#[derive(Debug)]
pub struct ShiftedSystem<'a> {
    lambda: f64,
    factor: Factorization,
    post: Option<&'a StencilMatrix>,
}

impl ShiftedSystem<'_> {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factor
    }

    /// Raw solution of `(λ − op)·w = v`, no sign checks.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        let target = self.factor.target().ok_or(Error::TargetMismatch)?;
        let z = self.factor.solve_for(&target, v)?;
        match self.post {
            Some(s) => s.mul_vec(&z),
            None => Ok(z),
        }
    }
}

/// `op·v`.
pub fn apply(op: &dyn PositiveOperator, v: &[f64]) -> Result<Vec<f64>> {
    op.apply(v)
}

/// Solves `(λ·I − op)·w = v` for a shift above the spectrum and checks that
/// `w` is positive up to round-off.
pub fn shifted_solve(op: &dyn PositiveOperator, lambda: f64, v: &[f64]) -> Result<Vec<f64>> {
    op.check_len(v)?;
    let sys = op.factor_shifted(lambda, ShiftRegion::AboveSpectrum)?;
    let w = sys.solve(v)?;
    check_positive(&w, lambda)?;
    Ok(w)
}

/// Rejects non-finite output (a numerically singular solve) and entries
/// below `−POSITIVITY_TOLERANCE·‖w‖∞`.
pub fn check_positive(w: &[f64], lambda: f64) -> Result<()> {
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::ShiftCollision { lambda });
    }
    let floor = -POSITIVITY_TOLERANCE * norm_inf(w);
    match w
        .iter()
        .enumerate()
        .find(|(_, &x)| x < floor || (x <= 0.0 && floor == 0.0))
    {
        Some((index, &value)) => Err(Error::Positivity { index, value }),
        None => Ok(()),
    }
}

/// Dense matrix with nonnegative entries.
#[derive(Debug)]
pub struct DenseMatrix {
    id: u64,
    entries: Matrix,
}

impl Clone for DenseMatrix {
    fn clone(&self) -> Self {
        Self {
            id: next_id(),
            entries: self.entries.clone(),
        }
    }
}

impl DenseMatrix {
    pub fn new(entries: Matrix) -> Result<Self> {
        if entries.dim() == 0 {
            return Err(Error::InvalidDimension(
                "matrix must be at least 1x1".into(),
            ));
        }
        if let Some(pos) = entries
            .as_slice()
            .iter()
            .position(|x| !(*x >= 0.0) || !x.is_finite())
        {
            let n = entries.dim();
            return Err(Error::Domain(format!(
                "entry ({}, {}) = {} is not a finite nonnegative number",
                pos / n,
                pos % n,
                entries.as_slice()[pos]
            )));
        }
        Ok(Self {
            id: next_id(),
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    /// Plain-text format: `n` on the first line, then `n` rows of `n`
    /// whitespace-separated decimals.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let n: usize = first.parse().map_err(|e| Error::Parse {
            line: ln,
            msg: format!("bad dimension {first:?}: {e}"),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: ln,
                msg: "dimension must be positive".into(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for (ln, line) in lines {
            if rows.len() == n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("more than {n} rows"),
                });
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| Error::Parse {
                        line: ln,
                        msg: format!("bad number {tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: rows.len() + 2,
                msg: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        Self::from_rows(&rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Writes 17 significant digits per entry.
    pub fn to_text(&self) -> String {
        let n = self.entries.dim();
        let mut out = format!("{n}\n");
        for i in 0..n {
            let row: Vec<String> = self
                .entries
                .row(i)
                .iter()
                .map(|x| format!("{x:.16e}"))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

impl PositiveOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.entries.dim()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::DenseMatrix
    }

    fn id(&self) -> u64 {
        self.id
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.entries.mul_vec(v)
    }

    fn factor_shifted(&self, lambda: f64, _region: ShiftRegion) -> Result<ShiftedSystem<'_>> {
        let factor = factor_dense(&self.entries.shifted_negated(lambda))
            .map_err(|e| match e {
                Error::Singular(_) => Error::ShiftCollision { lambda },
                other => other,
            })?
            .with_target(FactorTarget {
                operator_id: self.id,
                shift: lambda,
            });
        Ok(ShiftedSystem {
            lambda,
            factor,
            post: None,
        })
    }
}

/// Hilbert matrix, `H[i][j] = 1/(i+j−1)` for 1-based indices.
pub fn hilbert_matrix(n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "Hilbert matrix needs n >= 1".into(),
        ));
    }
    DenseMatrix::new(Matrix::from_fn(n, |i, j| 1.0 / (i + j + 1) as f64))
}

/// Symmetric tridiagonal matrix with diagonal `a_i` and off-diagonal `b_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    #[serde(skip, default = "next_id")]
    id: u64,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    seed: Option<u64>,
}

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidDimension(format!(
                "tridiagonal needs n >= 1 diagonal and n-1 off-diagonal entries, got {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        if diagonal.iter().chain(&off_diagonal).any(|x| !(*x >= 0.0)) {
            return Err(Error::Domain(
                "tridiagonal entries must be nonnegative".into(),
            ));
        }
        Ok(Self {
            id: next_id(),
            diagonal,
            off_diagonal,
            seed: None,
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.diagonal.len();
        Matrix::from_fn(n, |i, j| {
            if i == j {
                self.diagonal[i]
            } else if i == j + 1 {
                self.off_diagonal[j]
            } else if j == i + 1 {
                self.off_diagonal[i]
            } else {
                0.0
            }
        })
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diagonal.len() {
            let b2 = if i == 0 {
                0.0
            } else {
                self.off_diagonal[i - 1].powi(2)
            };
            d = self.diagonal[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Largest eigenvalue by Sturm bisection, accurate to a few ulps.
    pub fn largest_eigenvalue(&self) -> f64 {
        let n = self.diagonal.len();
        let radius = |i: usize| {
            let left = if i > 0 { self.off_diagonal[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i] } else { 0.0 };
            left + right
        };
        let mut lo = (0..n)
            .map(|i| self.diagonal[i] - radius(i))
            .fold(f64::INFINITY, f64::min);
        let mut hi = (0..n)
            .map(|i| self.diagonal[i] + radius(i))
            .fold(f64::NEG_INFINITY, f64::max);
        hi += f64::EPSILON * hi.abs().max(1.0);
        lo -= f64::EPSILON * lo.abs().max(1.0);
        // Invariant: count_below(lo) < n <= count_below(hi).
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) == n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Random nonnegative symmetric tridiagonal matrix with `a_i ~ U(0,2)` and
/// `b_i ~ U(0,1)`.
///
/// Entries are drawn from `ChaCha20Rng::seed_from_u64(seed)`: all `n`
/// diagonal entries first, then the `n − 1` off-diagonal entries, each as
/// `scale · u` with `u` the generator's standard `f64` in `[0, 1)`, redrawn
/// while `u == 0`.
pub fn random_tridiagonal(n: usize, seed: u64) -> Result<TridiagonalMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "random tridiagonal needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut open_uniform = |scale: f64| loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return scale * u;
        }
    };
    let diagonal: Vec<f64> = (0..n).map(|_| open_uniform(2.0)).collect();
    let off_diagonal: Vec<f64> = (0..n - 1).map(|_| open_uniform(1.0)).collect();
    let mut t = TridiagonalMatrix::new(diagonal, off_diagonal)?;
    t.seed = Some(seed);
    Ok(t)
}

impl PositiveOperator for TridiagonalMatrix {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Tridiagonal
    }

    fn as_tridiagonal(&self) -> Option<&TridiagonalMatrix> {
        Some(self)
    }

    fn id(&self) -> u64 {
        self.id
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let n = v.len();
        Ok((0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal[i] * v[i + 1];
                }
                s
            })
            .collect())
    }

    fn factor_shifted(&self, lambda: f64, _region: ShiftRegion) -> Result<ShiftedSystem<'_>> {
        let diag: Vec<f64> = self.diagonal.iter().map(|a| lambda - a).collect();
        let off: Vec<f64> = self.off_diagonal.iter().map(|b| -b).collect();
        let factor = factor_tridiagonal(&off, &diag, &off)
            .map_err(|e| match e {
                Error::Singular(_) => Error::ShiftCollision { lambda },
                other => other,
            })?
            .with_target(FactorTarget {
                operator_id: self.id,
                shift: lambda,
            });
        Ok(ShiftedSystem {
            lambda,
            factor,
            post: None,
        })
    }
}

/// `T_h = (−Δ_h)⁻¹` on a grid domain with zero Dirichlet data.
#[derive(Debug)]
pub struct InverseLaplacian {
    id: u64,
    domain: GridDomain,
    stencil: StencilMatrix,
    laplacian: Factorization,
}

impl InverseLaplacian {
    pub fn new(domain: GridDomain) -> Result<Self> {
        if domain.interior_count() == 0 {
            return Err(Error::Domain("no interior nodes".into()));
        }
        let stencil = assemble(&domain);
        let laplacian = factor_stencil(&stencil, 1.0, 0.0)
            .map_err(|_| Error::Domain("stencil matrix is not positive definite".into()))?;
        Ok(Self {
            id: next_id(),
            domain,
            stencil,
            laplacian,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn stencil(&self) -> &StencilMatrix {
        &self.stencil
    }

    /// `T_h·1`, the solution of `−Δ_h u = 1`.
    pub fn apply_to_ones(&self) -> Vec<f64> {
        self.laplacian
            .solve(&vec![1.0; self.dim()])
            .expect("dimension matches by construction")
    }
}

impl PositiveOperator for InverseLaplacian {
    fn dim(&self) -> usize {
        self.stencil.dim()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::InverseLaplacian
    }

    fn id(&self) -> u64 {
        self.id
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        self.laplacian.solve(v)
    }

    fn factor_shifted(&self, lambda: f64, region: ShiftRegion) -> Result<ShiftedSystem<'_>> {
        let factor = match region {
            ShiftRegion::AboveSpectrum => factor_stencil(&self.stencil, lambda, -1.0)?,
            ShiftRegion::Interior => factor_stencil_indefinite(&self.stencil, lambda, -1.0)
                .map_err(|e| match e {
                    Error::Singular(_) => Error::ShiftCollision { lambda },
                    other => other,
                })?,
        }
        .with_target(FactorTarget {
            operator_id: self.id,
            shift: lambda,
        });
        Ok(ShiftedSystem {
            lambda,
            factor,
            post: Some(&self.stencil),
        })
    }
}
