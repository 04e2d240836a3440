//! Banded direct solvers: Cholesky for symmetric positive-definite systems
//! and LU with partial pivoting for general banded systems.

use crate::error::{Error, Result};

/// Relative pivot floor below which a Cholesky pivot is treated as zero.
const CHOLESKY_PIVOT_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Lower-triangular band factor `L` of `A = L·Lᵀ`, half-bandwidth `b`.
///
/// Row `i` stores `L[i][i-b..=i]` at `data[i*(b+1)..(i+1)*(b+1)]`; entries
/// left of column 0 are unused.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    b: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    /// Factors the symmetric matrix whose lower band is given by `entry(i, j)`
    /// for `i - b <= j <= i`.
    ///
    /// Returns the offending row when a pivot is not safely positive.
    pub fn factor(
        n: usize,
        b: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> std::result::Result<Self, usize> {
        let w = b + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            for j in i.saturating_sub(b)..=i {
                data[i * w + j + b - i] = entry(i, j);
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(b);
            for j in j0..=i {
                let mut s = data[i * w + j + b - i];
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    s -= data[i * w + k + b - i] * data[j * w + k + b - j];
                }
                if j == i {
                    let diag = entry(i, i).abs();
                    if !(s > CHOLESKY_PIVOT_FLOOR * diag) || !s.is_finite() {
                        return Err(i);
                    }
                    data[i * w + b] = s.sqrt();
                } else {
                    data[i * w + j + b - i] = s / data[j * w + b];
                }
            }
        }
        Ok(Self { n, b, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        let l = |i: usize, j: usize| self.data[i * w + j + b - i];
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= l(i, k) * x[k];
            }
            x[i] = s / l(i, i);
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + b + 1).min(n) {
                s -= l(k, i) * x[k];
            }
            x[i] = s / l(i, i);
        }
        x
    }
}

/// General banded LU with partial pivoting in LAPACK band layout
/// (`kl` sub-diagonals, `ku` super-diagonals, `kl` extra rows for fill-in).
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    /// Factors the matrix with entries `entry(i, j)` for `|i - j|` within the band.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for j in 0..n {
            for i in j.saturating_sub(ku)..(j + kl + 1).min(n) {
                ab[kv + i - j + j * ldab] = entry(i, j);
            }
        }
        let idx = |i: usize, j: usize| kv + i - j + j * ldab;
        let mut ipiv = Vec::with_capacity(n);
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[idx(j, j)].abs();
            for k in 1..=km {
                let v = ab[idx(j + k, j)].abs();
                if v > best {
                    best = v;
                    jp = k;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(j));
            }
            ipiv.push(j + jp);
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(idx(j, c), idx(j + jp, c));
                }
            }
            let piv = ab[idx(j, j)];
            for k in 1..=km {
                ab[idx(j + k, j)] /= piv;
            }
            for c in j + 1..=ju {
                let u = ab[idx(j, c)];
                if u != 0.0 {
                    for k in 1..=km {
                        let l = ab[idx(j + k, j)];
                        ab[idx(j + k, c)] -= l * u;
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            ab,
            ipiv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, kl) = (self.n, self.kl);
        let kv = self.kl + self.ku;
        let ldab = 2 * kl + self.ku + 1;
        let idx = |i: usize, j: usize| kv + i - j + j * ldab;
        let mut x = rhs.to_vec();
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            for k in 1..=kl.min(n - 1 - j) {
                x[j + k] -= self.ab[idx(j + k, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.ab[idx(j, j)];
            let xj = x[j];
            for i in j.saturating_sub(kv)..j {
                x[i] -= self.ab[idx(i, j)] * xj;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_residual(a: &[Vec<f64>], x: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(row, bi)| {
                let r: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bi;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn cholesky_tridiagonal_laplacian() {
        let n: usize = 6;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        let f = BandCholesky::factor(n, 1, |i, j| a[i][j]).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
        let x = f.solve(&b);
        assert!(dense_residual(&a, &x, &b) < 1e-13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        // [[1, 2], [2, 1]] has eigenvalues 3 and -1.
        let a = [[1.0, 2.0], [2.0, 1.0]];
        assert_eq!(BandCholesky::factor(2, 1, |i, j| a[i][j]).unwrap_err(), 1);
    }

    #[test]
    fn band_lu_needs_pivoting() {
        // Zero leading diagonal forces a row interchange.
        let a = vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 3.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, -4.0],
        ];
        let f = BandLu::factor(4, 1, 1, |i, j| a[i][j]).unwrap();
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = f.solve(&b);
        assert!(dense_residual(&a, &x, &b) < 1e-13);
    }

    #[test]
    fn band_lu_wider_band() {
        let n = 9;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = i as i64 - j as i64;
                        if d == 0 {
                            0.1 * i as f64 - 0.3
                        } else if d.abs() <= 3 {
                            1.0 / (1.0 + (i + 2 * j) as f64)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let f = BandLu::factor(n, 3, 3, |i, j| a[i][j]).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        assert!(dense_residual(&a, &x, &b) < 1e-12);
    }

    #[test]
    fn band_lu_singular() {
        assert!(matches!(
            BandLu::factor(2, 1, 1, |_, _| 1.0),
            Err(Error::Singular(1))
        ));
    }
}
