//! Dense square matrices and LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `shift·I − self`.
    pub fn shifted_negated(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = -*v;
        }
        for i in 0..self.n {
            out.data[i * self.n + i] += shift;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// `P·A = L·U` with unit lower-triangular `L`, stored in place.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: Matrix,
    /// `perm[k]` is the row swapped with row `k` at elimination step `k`.
    perm: Vec<usize>,
    pivot_growth: f64,
}

impl DenseLu {
    pub fn factor(mut a: Matrix) -> Result<Self> {
        let n = a.n;
        let scale = a.max_abs();
        let mut perm = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = a.get(k, k).abs();
            for i in k + 1..n {
                let v = a.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
            }
            perm.push(p);

            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            let pivot = pivot_row[k];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (r, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= l * u;
                    }
                }
            }
        }
        let mut umax = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                umax = umax.max(a.get(i, j).abs());
            }
        }
        let pivot_growth = if scale > 0.0 { umax / scale } else { 1.0 };
        Ok(Self {
            lu: a,
            perm,
            pivot_growth,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn pivot_growth(&self) -> f64 {
        self.pivot_growth
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x = b.to_vec();
        for (k, &p) in self.perm.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, y)| u * y)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ·x = b`.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x = b.to_vec();
        // Uᵀ y = b
        for i in 0..n {
            x[i] /= self.lu.get(i, i);
            let xi = x[i];
            let row = self.lu.row(i);
            for j in i + 1..n {
                x[j] -= row[j] * xi;
            }
        }
        // Lᵀ z = y
        for i in (0..n).rev() {
            let xi = x[i];
            let row = self.lu.row(i);
            for j in 0..i {
                x[j] -= row[j] * xi;
            }
        }
        for (k, &p) in self.perm.iter().enumerate().rev() {
            x.swap(k, p);
        }
        x
    }

    /// Lower estimate of `‖A⁻¹‖₁` (Hager's method with Higham's
    /// alternating-sign safeguard).
    pub fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.lu.n;
        if n == 0 {
            return 0.0;
        }
        let one_norm = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0_f64;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let y_norm = one_norm(&y);
            if !y_norm.is_finite() {
                return f64::INFINITY;
            }
            if iter > 0 && y_norm <= est {
                break;
            }
            est = y_norm;
            let xi: Vec<f64> = y
                .iter()
                .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve_transposed(&xi);
            let (j, zmax) =
                z.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bj, bv), (j, v)| {
                        if v.abs() > bv {
                            (j, v.abs())
                        } else {
                            (bj, bv)
                        }
                    });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x.iter_mut().for_each(|v| *v = 0.0);
            x[j] = 1.0;
        }
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let alt_est = 2.0 * one_norm(&self.solve(&alt)) / (3.0 * n as f64);
        if !alt_est.is_finite() {
            return f64::INFINITY;
        }
        est.max(alt_est)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let m = Matrix::from_rows(&[vec![4.0, -2.0], vec![-2.0, 4.0]]).unwrap();
        let lu = DenseLu::factor(m).unwrap();
        let x = lu.solve(&[2.0, 1.0]);
        assert!((x[0] - 5.0 / 6.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn transposed_solve_matches_explicit_transpose() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![0.0, 3.0, 1.0],
            vec![4.0, 1.0, 2.0],
        ])
        .unwrap();
        let mt = Matrix::from_fn(3, |i, j| m.get(j, i));
        let b = [1.0, -2.0, 0.25];
        let x1 = DenseLu::factor(m).unwrap().solve_transposed(&b);
        let x2 = DenseLu::factor(mt).unwrap().solve(&b);
        for (a, b) in x1.iter().zip(&x2) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_singular() {
        let m = Matrix::from_rows(&[vec![2.0, -2.0], vec![-2.0, 2.0]]).unwrap();
        assert!(matches!(DenseLu::factor(m), Err(Error::Singular(1))));
    }

    #[test]
    fn inverse_norm_estimate_exact_for_diagonal() {
        let m = Matrix::from_fn(4, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let est = DenseLu::factor(m).unwrap().inverse_norm_one_estimate();
        assert!((est - 1.0).abs() < 1e-15);
    }
}
