//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use cwpower::grid::GridDomain;
use cwpower::linsolve::Matrix;
use cwpower::operators::DenseMatrix;
use nalgebra::DMatrix;
use rand::Rng;

/// Spectral radius by a dense general eigensolve.
pub fn spectral_radius(m: &Matrix) -> f64 {
    let n = m.dim();
    let a = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Largest eigenvalue of a symmetric matrix given as rows.
pub fn symmetric_max_eigenvalue(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    a.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest eigenvalue of a symmetric matrix given as rows.
pub fn symmetric_min_eigenvalue(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    a.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Random primitive nonnegative matrix: sparse uniform entries plus a
/// positive diagonal and a cycle through all indices.
pub fn random_primitive(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.6) {
                m.set(i, j, rng.gen_range(0.0..1.0));
            }
        }
        m.set(i, i, 0.1 + rng.gen_range(0.0..1.0));
        let next = (i + 1) % n;
        if next != i {
            m.set(i, next, 0.05 + m.get(i, next));
        }
    }
    DenseMatrix::new(m).unwrap()
}

pub fn random_positive_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.05..2.0)).collect()
}

/// Random 4-connected mask grown from a seed cell inside an `nx × ny` box.
pub fn random_connected_mask(nx: usize, ny: usize, target: usize, rng: &mut impl Rng) -> Vec<bool> {
    let mut mask = vec![false; nx * ny];
    let start = rng.gen_range(0..nx * ny);
    mask[start] = true;
    let mut count = 1;
    let target = target.min(nx * ny);
    while count < target {
        let cells: Vec<usize> = (0..nx * ny).filter(|&k| mask[k]).collect();
        let k = cells[rng.gen_range(0..cells.len())];
        let (r, c) = (k / nx, k % nx);
        let mut nbrs = Vec::new();
        if r > 0 {
            nbrs.push(k - nx);
        }
        if r + 1 < ny {
            nbrs.push(k + nx);
        }
        if c > 0 {
            nbrs.push(k - 1);
        }
        if c + 1 < nx {
            nbrs.push(k + 1);
        }
        let pick = nbrs[rng.gen_range(0..nbrs.len())];
        if !mask[pick] {
            mask[pick] = true;
            count += 1;
        }
    }
    mask
}

/// Random connected grid domain with at most 20 interior nodes.
pub fn random_domain(rng: &mut impl Rng) -> GridDomain {
    let nx = rng.gen_range(1..=6);
    let ny = rng.gen_range(1..=6);
    let target = rng.gen_range(1..=(nx * ny).min(20));
    let h = 1.0 / rng.gen_range(2..=10) as f64;
    GridDomain::from_mask(nx, ny, h, random_connected_mask(nx, ny, target, rng)).unwrap()
}

/// Scaled log-spaced positive error sequence.
pub fn random_errors(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut e = rng.gen_range(1e-3..1.0);
    (0..len)
        .map(|_| {
            let out = e;
            e *= (-rng.gen_range(0.2..5.0f64)).exp();
            out
        })
        .collect()
}
