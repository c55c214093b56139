//! Banded line operators and their matrix-free application along either
//! axis of an x-major grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct StencilRow<T> {
    /// Column of the first coefficient.
    pub start: usize,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> StencilRow<T> {
    pub fn new(start: usize, coeffs: Vec<T>) -> Self {
        Self { start, coeffs }
    }

    #[inline]
    fn dot(&self, line: &[T]) -> T {
        let mut acc = T::zero();
        for (c, &v) in self.coeffs.iter().zip(&line[self.start..]) {
            acc += *c * v;
        }
        acc
    }
}

/// Square `n x n` matrix stored one explicit stencil row per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    rows: Vec<StencilRow<T>>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn from_rows(rows: Vec<StencilRow<T>>) -> Self {
        let n = rows.len();
        debug_assert!(rows.iter().all(|r| r.start + r.coeffs.len() <= n));
        Self { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[StencilRow<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &StencilRow<T> {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = &self.rows[i];
        if j >= r.start && j < r.start + r.coeffs.len() {
            r.coeffs[j - r.start]
        } else {
            T::zero()
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.n();
        let mut m = vec![T::zero(); n * n];
        for (i, r) in self.rows.iter().enumerate() {
            for (k, &c) in r.coeffs.iter().enumerate() {
                m[i * n + r.start + k] = c;
            }
        }
        m
    }

    /// Applies a row-wise map to every coefficient.
    pub fn map_rows<F: FnMut(usize, T) -> T>(&self, mut f: F) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| StencilRow::new(r.start, r.coeffs.iter().map(|&c| f(i, c)).collect()))
            .collect();
        Self { rows }
    }

    /// `out = scale * M * input` on a single line.
    pub fn apply_line(&self, input: &[T], scale: T, out: &mut [T]) -> Result<()> {
        check_len("line input", self.n(), input.len())?;
        check_len("line output", self.n(), out.len())?;
        for (o, r) in out.iter_mut().zip(&self.rows) {
            *o = scale * r.dot(input);
        }
        Ok(())
    }

    /// `out = scale * (M ⊗ I_y) field` for an x-major field with `npy` values
    /// per x-line.
    pub fn apply_x(&self, field: &[T], npy: usize, scale: T, out: &mut [T]) -> Result<()> {
        let len = self.n() * npy;
        check_len("field", len, field.len())?;
        check_len("output", len, out.len())?;
        out.par_chunks_mut(npy)
            .zip(self.rows.par_iter())
            .for_each(|(line, row)| {
                line.fill(T::zero());
                for (k, &c) in row.coeffs.iter().enumerate() {
                    let src = &field[(row.start + k) * npy..(row.start + k + 1) * npy];
                    for (o, &v) in line.iter_mut().zip(src) {
                        *o += c * v;
                    }
                }
                for o in line.iter_mut() {
                    *o *= scale;
                }
            });
        Ok(())
    }

    /// `out = scale * (I_x ⊗ M) field` for an x-major field with `npx` lines.
    pub fn apply_y(&self, field: &[T], npx: usize, scale: T, out: &mut [T]) -> Result<()> {
        let npy = self.n();
        let len = npx * npy;
        check_len("field", len, field.len())?;
        check_len("output", len, out.len())?;
        out.par_chunks_mut(npy)
            .zip(field.par_chunks(npy))
            .for_each(|(o, line)| {
                for (oo, r) in o.iter_mut().zip(&self.rows) {
                    *oo = scale * r.dot(line);
                }
            });
        Ok(())
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
