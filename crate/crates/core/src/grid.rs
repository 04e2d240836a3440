//! Vertex-centred 2-D grid domains and the 5-point Dirichlet Laplacian.
//!
//! A domain is a rectangular mask of nodes with spacing `h`. Nodes marked
//! interior are unknowns; every other node, and every node outside the mask,
//! carries the homogeneous Dirichlet value zero.
//!
//! Mask files are ASCII:
//!
//! ```text
//! nx ny
//! h
//! <ny rows of nx characters, '1' interior, '0' exterior; top row first>
//! ```

use std::collections::VecDeque;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    nx: usize,
    ny: usize,
    h: f64,
    /// Row-major, `mask[row * nx + col]`, row 0 is the top row.
    mask: Vec<bool>,
    index: Vec<Option<usize>>,
    /// `(col, row)` of each interior unknown.
    nodes: Vec<(usize, usize)>,
}

impl GridDomain {
    /// Builds a domain from a mask, enforcing a nonempty, 4-connected interior.
    pub fn from_mask(nx: usize, ny: usize, h: f64, mask: Vec<bool>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if mask.len() != nx * ny {
            return Err(Error::Shape {
                expected: nx * ny,
                got: mask.len(),
            });
        }
        let mut index = vec![None; nx * ny];
        let mut nodes = Vec::new();
        for row in 0..ny {
            for col in 0..nx {
                if mask[row * nx + col] {
                    index[row * nx + col] = Some(nodes.len());
                    nodes.push((col, row));
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::Domain("no interior nodes".into()));
        }
        let dom = Self {
            nx,
            ny,
            h,
            mask,
            index,
            nodes,
        };
        let components = dom.count_components();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(dom)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of interior unknowns.
    pub fn interior_count(&self) -> usize {
        self.nodes.len()
    }

    /// Unknown index of the node at `(col, row)`, if interior.
    pub fn index_of(&self, col: usize, row: usize) -> Option<usize> {
        if col < self.nx && row < self.ny {
            self.index[row * self.nx + col]
        } else {
            None
        }
    }

    /// `(col, row)` of unknown `k`.
    pub fn node(&self, k: usize) -> (usize, usize) {
        self.nodes[k]
    }

    /// Interior nodes as `(i, j)` lattice coordinates with `j` increasing
    /// upward and the mask's bottom-left cell at `(1, 1)`. For built-in
    /// domains the physical position is `(i·h, j·h)`.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .map(move |&(col, row)| (col + 1, self.ny - row))
    }

    fn neighbors(&self, col: usize, row: usize) -> impl Iterator<Item = usize> + '_ {
        let cands = [
            (col.wrapping_sub(1), row),
            (col + 1, row),
            (col, row.wrapping_sub(1)),
            (col, row + 1),
        ];
        cands
            .into_iter()
            .filter_map(move |(c, r)| self.index_of(c, r))
    }

    fn count_components(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                let (c, r) = self.nodes[k];
                for nb in self.neighbors(c, r) {
                    if !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
        components
    }

    /// Renders the domain in mask-file format.
    pub fn to_mask_string(&self) -> String {
        let mut out = format!("{} {}\n{:.17e}\n", self.nx, self.ny, self.h);
        for row in 0..self.ny {
            for col in 0..self.nx {
                out.push(if self.mask[row * self.nx + col] {
                    '1'
                } else {
                    '0'
                });
            }
            out.push('\n');
        }
        out
    }
}

/// Number of cells per unit length, `1/h`, when it is an integer `>= 2`.
fn cells_per_unit(h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidSpacing(h));
    }
    let inv = 1.0 / h;
    let k = inv.round();
    if (inv - k).abs() > 1e-9 * inv || k < 2.0 {
        return Err(Error::InvalidSpacing(h));
    }
    Ok(k as usize)
}

/// Unit square `(0,1)²`: interior nodes `(i·h, j·h)`, `1 <= i, j <= 1/h − 1`.
pub fn unit_square(h: f64) -> Result<GridDomain> {
    let n = cells_per_unit(h)?;
    let m = n - 1;
    GridDomain::from_mask(m, m, 1.0 / n as f64, vec![true; m * m])
}

/// L-shaped domain `(0,2)² \ [1,2]²`.
pub fn l_shape(h: f64) -> Result<GridDomain> {
    let n = cells_per_unit(h)?;
    let total = 2 * n;
    let m = total - 1;
    // lattice (i, j), 1 <= i, j <= 2n-1; excluded when x >= 1 and y >= 1.
    let mut mask = vec![false; m * m];
    for row in 0..m {
        let j = m - row;
        for col in 0..m {
            let i = col + 1;
            mask[row * m + col] = !(i >= n && j >= n);
        }
    }
    GridDomain::from_mask(m, m, 1.0 / n as f64, mask)
}

pub fn parse_mask(text: &str) -> Result<GridDomain> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected \"nx ny\", found {header:?}"),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line: ln,
            msg: format!("bad dimension {s:?}: {e}"),
        })
    };
    let (nx, ny) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    if nx == 0 || ny == 0 {
        return Err(Error::Parse {
            line: ln,
            msg: "dimensions must be positive".into(),
        });
    }
    let (ln, hline) = lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing grid spacing".into(),
    })?;
    let h: f64 = hline.trim().parse().map_err(|e| Error::Parse {
        line: ln,
        msg: format!("bad grid spacing {:?}: {e}", hline.trim()),
    })?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Parse {
            line: ln,
            msg: format!("grid spacing must be positive, got {h}"),
        });
    }
    let mut mask = Vec::with_capacity(nx * ny);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == ny {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::Parse {
                line: ln,
                msg: format!("more than {ny} mask rows"),
            });
        }
        if line.chars().count() != nx {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {nx} columns, found {}", line.chars().count()),
            });
        }
        for c in line.chars() {
            mask.push(match c {
                '1' => true,
                '0' => false,
                other => {
                    return Err(Error::Parse {
                        line: ln,
                        msg: format!("invalid mask character {other:?}"),
                    })
                }
            });
        }
        rows += 1;
    }
    if rows != ny {
        return Err(Error::Parse {
            line: rows + 3,
            msg: format!("expected {ny} mask rows, found {rows}"),
        });
    }
    GridDomain::from_mask(nx, ny, h, mask)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<GridDomain> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mask(&text)
}

/// Sparse symmetric positive-definite matrix of `−Δ_h` in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilMatrix {
    dim: usize,
    bandwidth: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl StencilMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half-bandwidth: `max |i − j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }
}

/// Assembles the 5-point stencil: `4/h²` on the diagonal and `−1/h²` for
/// each interior 4-neighbour.
pub fn assemble(domain: &GridDomain) -> StencilMatrix {
    let inv_h2 = 1.0 / (domain.h * domain.h);
    let dim = domain.interior_count();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(5 * dim);
    let mut vals = Vec::with_capacity(5 * dim);
    let mut bandwidth = 0;
    row_ptr.push(0);
    for k in 0..dim {
        let (c, r) = domain.nodes[k];
        let mut entries: Vec<(usize, f64)> =
            domain.neighbors(c, r).map(|nb| (nb, -inv_h2)).collect();
        entries.push((k, 4.0 * inv_h2));
        entries.sort_by_key(|e| e.0);
        for (j, v) in entries {
            bandwidth = bandwidth.max(j.abs_diff(k));
            cols.push(j);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    StencilMatrix {
        dim,
        bandwidth,
        row_ptr,
        cols,
        vals,
    }
}

/// Largest eigenvalue of `(−Δ_h)⁻¹` on the unit square, `1/((8/h²)·sin²(πh/2))`.
pub fn unit_square_principal_value(h: f64) -> f64 {
    let s = (std::f64::consts::PI * h / 2.0).sin();
    h * h / (8.0 * s * s)
}

impl std::fmt::Display for GridDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x{} grid, h = {}, {} interior nodes",
            self.nx,
            self.ny,
            self.h,
            self.interior_count()
        )
    }
}
