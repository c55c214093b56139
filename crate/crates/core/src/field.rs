use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::scalar::Real;
use crate::stencil::check_len;

/// Two-component nodal field. `data` holds `B^1` on all nodes followed by
/// `B^2`, each in the grid's x-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticField<T> {
    grid: Grid2D<T>,
    data: Vec<T>,
}

impl<T: Real> MagneticField<T> {
    pub fn zeros(grid: Grid2D<T>) -> Self {
        Self {
            data: vec![T::zero(); 2 * grid.len()],
            grid,
        }
    }

    pub fn from_vec(grid: Grid2D<T>, data: Vec<T>) -> Result<Self> {
        check_len("magnetic field", 2 * grid.len(), data.len())?;
        Ok(Self { grid, data })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn<F: FnMut(T, T) -> [T; 2]>(grid: Grid2D<T>, mut f: F) -> Self {
        let n = grid.len();
        let mut data = vec![T::zero(); 2 * n];
        for i in 0..grid.npx {
            let x = grid.x(i);
            for j in 0..grid.npy {
                let [b1, b2] = f(x, grid.y(j));
                let k = grid.index(i, j);
                data[k] = b1;
                data[n + k] = b2;
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn b1(&self) -> &[T] {
        &self.data[..self.grid.len()]
    }

    pub fn b2(&self) -> &[T] {
        &self.data[self.grid.len()..]
    }

    /// Nodewise `|B|`.
    pub fn magnitude(&self) -> Vec<T> {
        self.b1()
            .iter()
            .zip(self.b2())
            .map(|(&a, &b)| (a * a + b * b).sqrt())
            .collect()
    }

    /// Fails on the first non-finite entry.
    pub fn check_finite(&self) -> Result<()> {
        check_finite(&self.grid, &self.data, "field value")
    }
}

pub(crate) fn check_finite<T: Real>(grid: &Grid2D<T>, data: &[T], what: &'static str) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(k) => {
            let k = k % grid.len();
            Err(Error::NonFinite {
                what,
                i: k / grid.npy,
                j: k % grid.npy,
            })
        }
    }
}
