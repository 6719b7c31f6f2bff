use ndarray::ArrayView2;

use super::grid::SomGrid;
use super::train::{KernelSpace, PointSpace, PrototypeSpace, SomModel};
use crate::error::{Error, Result};
use crate::linalg::KernelMatrix;

/// Data a map was trained on.
#[derive(Clone, Copy, Debug)]
pub enum SomData<'a> {
    Kernel(&'a KernelMatrix),
    Points(ArrayView2<'a, f64>),
}

/// Mean prototype distance from each unit to its 4-neighbors.
#[derive(Clone, Debug, PartialEq)]
pub struct UMatrix {
    pub grid: SomGrid,
    pub values: Vec<f64>,
}

/// Row-major grid of interpolated values.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl UMatrix {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.unit_at(row, col)]
    }

    /// Bilinear interpolation between unit centers, `factor` pixels per unit.
    pub fn upsample(&self, factor: usize) -> Raster {
        let (rows, cols) = (self.grid.rows(), self.grid.cols());
        let (height, width) = (rows * factor, cols * factor);
        let f = factor as f64;
        let mut values = Vec::with_capacity(width * height);
        for py in 0..height {
            let y = ((py as f64 + 0.5) / f - 0.5).clamp(0.0, (rows - 1) as f64);
            let (y0, ty) = (y.floor() as usize, y - y.floor());
            let y1 = (y0 + 1).min(rows - 1);
            for px in 0..width {
                let x = ((px as f64 + 0.5) / f - 0.5).clamp(0.0, (cols - 1) as f64);
                let (x0, tx) = (x.floor() as usize, x - x.floor());
                let x1 = (x0 + 1).min(cols - 1);
                let top = self.value(y0, x0) * (1.0 - tx) + self.value(y0, x1) * tx;
                let bottom = self.value(y1, x0) * (1.0 - tx) + self.value(y1, x1) * tx;
                values.push(top * (1.0 - ty) + bottom * ty);
            }
        }
        Raster {
            width,
            height,
            values,
        }
    }
}

pub fn u_matrix(model: &SomModel, data: SomData<'_>) -> Result<UMatrix> {
    if model.energy_trace.is_empty() {
        return Err(Error::InvalidArgument("model has not been trained".into()));
    }
    let n = match data {
        SomData::Kernel(k) => k.order(),
        SomData::Points(p) => p.nrows(),
    };
    if n != model.vertices() {
        return Err(Error::DimensionMismatch {
            expected: model.vertices(),
            got: n,
        });
    }
    let dist = match data {
        SomData::Kernel(k) => KernelSpace(k).prototype_distances(&model.gamma),
        SomData::Points(p) => PointSpace(p).prototype_distances(&model.gamma),
    };
    let grid = model.grid;
    let values = (0..grid.units())
        .map(|m| {
            let nbrs = grid.neighbors4(m);
            if nbrs.is_empty() {
                0.0
            } else {
                nbrs.iter().map(|&o| dist[[m, o]]).sum::<f64>() / nbrs.len() as f64
            }
        })
        .collect();
    Ok(UMatrix { grid, values })
}
