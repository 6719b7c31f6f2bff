use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular lattice of `rows × cols` units, numbered row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SomGrid {
    rows: usize,
    cols: usize,
}

impl SomGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(SomGrid { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn units(&self) -> usize {
        self.rows * self.cols
    }

    /// `(row, col)` of unit `m`.
    pub fn coords(&self, m: usize) -> (usize, usize) {
        (m / self.cols, m % self.cols)
    }

    pub fn unit_at(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    /// Euclidean distance between unit coordinates.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra as f64 - rb as f64;
        let dc = ca as f64 - cb as f64;
        (dr * dr + dc * dc).sqrt()
    }

    /// Up, left, right, down neighbors of `m` that lie on the grid.
    pub fn neighbors4(&self, m: usize) -> Vec<usize> {
        let (r, c) = self.coords(m);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.unit_at(r - 1, c));
        }
        if c > 0 {
            out.push(self.unit_at(r, c - 1));
        }
        if c + 1 < self.cols {
            out.push(self.unit_at(r, c + 1));
        }
        if r + 1 < self.rows {
            out.push(self.unit_at(r + 1, c));
        }
        out
    }
}

impl std::str::FromStr for SomGrid {
    type Err = Error;

    /// Parses `RxC`, e.g. `7x7`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid must look like RxC, got {s:?}"));
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        SomGrid::new(rows, cols)
    }
}
