//! Uniform tensor-product grids.
//!
//! Nodal data on a grid is stored x-major: node `(i, j)` lives at
//! `i * npy + j`, so each x-index owns a contiguous line of `npy` values
//! running along y.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
    pub npx: usize,
    pub npy: usize,
}

impl<T: Scalar> Grid2D<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T, npx: usize, npy: usize) -> Result<Self> {
        if npx < 2 || npy < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points per axis, got {npx}x{npy}"
            )));
        }
        if !(xmax > xmin) || !(ymax > ymin) {
            return Err(Error::InvalidGrid(format!(
                "empty domain [{:?}, {:?}] x [{:?}, {:?}]",
                xmin, xmax, ymin, ymax
            )));
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
            npx,
            npy,
        })
    }

    /// Square domain `[lo, hi]^2` with `cells` intervals per axis.
    pub fn square(lo: T, hi: T, cells: usize) -> Result<Self> {
        Self::new(lo, hi, lo, hi, cells + 1, cells + 1)
    }

    pub fn dx(&self) -> T {
        (self.xmax - self.xmin) / T::from_usize(self.npx - 1)
    }

    pub fn dy(&self) -> T {
        (self.ymax - self.ymin) / T::from_usize(self.npy - 1)
    }

    pub fn x(&self, i: usize) -> T {
        self.xmin + T::from_usize(i) * self.dx()
    }

    pub fn y(&self, j: usize) -> T {
        self.ymin + T::from_usize(j) * self.dy()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.npx * self.npy
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.npy + j
    }

    /// Label in the `NxM` cell-count form used by result tables.
    pub fn label(&self) -> String {
        format!("{}x{}", self.npx - 1, self.npy - 1)
    }

    /// Samples `f` at every node in storage order.
    pub fn sample<F: FnMut(T, T) -> T>(&self, mut f: F) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.npx {
            let x = self.x(i);
            for j in 0..self.npy {
                out.push(f(x, self.y(j)));
            }
        }
        out
    }
}

/// One of the four sides of the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::XMin, Side::XMax, Side::YMin, Side::YMax];

    /// Number of nodes on this side.
    pub fn len<T>(self, grid: &Grid2D<T>) -> usize {
        match self {
            Side::XMin | Side::XMax => grid.npy,
            Side::YMin | Side::YMax => grid.npx,
        }
    }

    /// `(i, j)` of the `k`-th node along this side.
    pub fn node<T>(self, grid: &Grid2D<T>, k: usize) -> (usize, usize) {
        match self {
            Side::XMin => (0, k),
            Side::XMax => (grid.npx - 1, k),
            Side::YMin => (k, 0),
            Side::YMax => (k, grid.npy - 1),
        }
    }
}
