//! Diagonal-norm summation-by-parts first-derivative operators.
//!
//! An operator `D = P^{-1} Q` on `n` equidistant points with spacing `h`
//! satisfies `P = P^T > 0` and `Q + Q^T = diag(-1, 0, ..., 0, 1)`. Both the
//! norm and `Q` are kept dimensionless: the physical norm is `h * diag(w)`
//! and the physical derivative is `(1/h) * diag(w)^{-1} Q`.
//!
//! Two operators are provided. The second-order one is the central stencil
//! with one-sided first/last rows. The fourth-order one is the classical
//! diagonal-norm operator with four closure rows at each boundary and norm
//! `(17/48, 59/48, 43/48, 49/48, 1, ...)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::scalar::Scalar;
use crate::stencil::{check_len, BandedMatrix, StencilRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SbpOrder {
    Second,
    Fourth,
}

impl SbpOrder {
    /// Interior order of accuracy.
    pub fn order(self) -> usize {
        match self {
            SbpOrder::Second => 2,
            SbpOrder::Fourth => 4,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            2 => Some(SbpOrder::Second),
            4 => Some(SbpOrder::Fourth),
            _ => None,
        }
    }

    /// Smallest point count for which the two boundary closures fit.
    pub fn min_points(self) -> usize {
        match self {
            SbpOrder::Second => 3,
            SbpOrder::Fourth => 8,
        }
    }

    /// Number of closure rows at each end.
    pub fn closure_rows(self) -> usize {
        match self {
            SbpOrder::Second => 1,
            SbpOrder::Fourth => 4,
        }
    }

    /// Highest polynomial degree differentiated exactly at closure rows.
    pub fn closure_degree(self) -> usize {
        self.order() / 2
    }

    /// Highest polynomial degree differentiated exactly at interior rows.
    pub fn interior_degree(self) -> usize {
        self.order()
    }
}

// Exact coefficient tables as (numerator, denominator).
type Frac = (i64, i64);

const SECOND_WEIGHTS: [Frac; 1] = [(1, 2)];
const SECOND_CLOSURE: [&[Frac]; 1] = [&[(-1, 2), (1, 2)]];
const SECOND_INTERIOR: [Frac; 3] = [(-1, 2), (0, 1), (1, 2)];

const FOURTH_WEIGHTS: [Frac; 4] = [(17, 48), (59, 48), (43, 48), (49, 48)];
const FOURTH_CLOSURE: [&[Frac]; 4] = [
    &[(-1, 2), (59, 96), (-1, 12), (-1, 32)],
    &[(-59, 96), (0, 1), (59, 96), (0, 1)],
    &[(1, 12), (-59, 96), (0, 1), (59, 96), (-1, 12)],
    &[(1, 32), (0, 1), (-59, 96), (0, 1), (2, 3), (-1, 12)],
];
const FOURTH_INTERIOR: [Frac; 5] = [(1, 12), (-2, 3), (0, 1), (2, 3), (-1, 12)];

#[derive(Debug, Clone, PartialEq)]
pub struct SbpOperator<T> {
    order: SbpOrder,
    h: T,
    /// Norm weights in units of `h`.
    weights: Vec<T>,
    /// Dimensionless near-skew part.
    q: BandedMatrix<T>,
    /// `h * D`.
    d: BandedMatrix<T>,
}

/// Builds an operator on `n` points with spacing `h`.
pub fn build_sbp<T: Scalar>(order: SbpOrder, n: usize, h: T) -> Result<SbpOperator<T>> {
    SbpOperator::new(order, n, h)
}

impl<T: Scalar> SbpOperator<T> {
    pub fn new(order: SbpOrder, n: usize, h: T) -> Result<Self> {
        let min = order.min_points();
        if n < min {
            return Err(Error::TooFewPoints {
                order: order.order(),
                n,
                min,
            });
        }
        if !(h > T::zero()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h:?}")));
        }
        let (weights, closure, interior): (&[Frac], &[&[Frac]], &[Frac]) = match order {
            SbpOrder::Second => (&SECOND_WEIGHTS, &SECOND_CLOSURE, &SECOND_INTERIOR),
            SbpOrder::Fourth => (&FOURTH_WEIGHTS, &FOURTH_CLOSURE, &FOURTH_INTERIOR),
        };
        let frac = |&(a, b): &Frac| T::from_ratio(a, b);
        let nb = closure.len();
        let half = interior.len() / 2;

        let mut w = vec![T::one(); n];
        for (k, f) in weights.iter().enumerate() {
            w[k] = frac(f);
            w[n - 1 - k] = frac(f);
        }

        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let row = if i < nb {
                StencilRow::new(0, closure[i].iter().map(frac).collect())
            } else if i >= n - nb {
                // Q[n-1-r][n-1-k] = -Q[r][k]
                let r = n - 1 - i;
                let c: Vec<T> = closure[r].iter().rev().map(|f| -frac(f)).collect();
                StencilRow::new(n - c.len(), c)
            } else {
                StencilRow::new(i - half, interior.iter().map(frac).collect())
            };
            rows.push(row);
        }
        let q = BandedMatrix::from_rows(rows);
        let d = q.map_rows(|i, c| c / w[i]);
        Ok(Self {
            order,
            h,
            weights: w,
            q,
            d,
        })
    }

    pub fn order(&self) -> SbpOrder {
        self.order
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Norm weights in units of `h`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Diagonal of the physical norm `P`.
    pub fn norm_diagonal(&self) -> Vec<T> {
        self.weights.iter().map(|&w| w * self.h).collect()
    }

    /// Physical boundary weight `P[0][0] = P[n-1][n-1]`.
    pub fn boundary_weight(&self) -> T {
        self.weights[0] * self.h
    }

    pub fn q(&self) -> &BandedMatrix<T> {
        &self.q
    }

    /// `h * D`, the undivided derivative stencils.
    pub fn scaled_derivative(&self) -> &BandedMatrix<T> {
        &self.d
    }

    /// Physical derivative matrix `D`, row-major.
    pub fn dense_derivative(&self) -> Vec<T> {
        let inv_h = T::one() / self.h;
        self.d.to_dense().into_iter().map(|c| c * inv_h).collect()
    }

    /// `out = D * input` on a single line.
    pub fn apply(&self, input: &[T], out: &mut [T]) -> Result<()> {
        self.d.apply_line(input, T::one() / self.h, out)
    }

    /// Writes the entries of `D` as `row,col,value` CSV.
    pub fn write_coefficients_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,value")?;
        let inv_h = (T::one() / self.h).to_f64();
        for (i, r) in self.d.rows().iter().enumerate() {
            for (k, c) in r.coeffs.iter().enumerate() {
                writeln!(w, "{},{},{:e}", i, r.start + k, c.to_f64() * inv_h)?;
            }
        }
        Ok(())
    }

    /// Checks the defining algebraic properties.
    pub fn verify(&self) -> SbpReport {
        verify_sbp(self)
    }
}

/// `(D_x ⊗ I_y) field`.
pub fn apply_dx<T: Scalar>(op: &SbpOperator<T>, field: &[T], grid: &Grid2D<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); field.len()];
    apply_dx_into(op, field, grid, &mut out)?;
    Ok(out)
}

/// `(I_x ⊗ D_y) field`.
pub fn apply_dy<T: Scalar>(op: &SbpOperator<T>, field: &[T], grid: &Grid2D<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); field.len()];
    apply_dy_into(op, field, grid, &mut out)?;
    Ok(out)
}

pub fn apply_dx_into<T: Scalar>(
    op: &SbpOperator<T>,
    field: &[T],
    grid: &Grid2D<T>,
    out: &mut [T],
) -> Result<()> {
    check_len("x-operator size", grid.npx, op.n())?;
    check_len("field", grid.len(), field.len())?;
    op.d.apply_x(field, grid.npy, T::one() / op.h, out)
}

pub fn apply_dy_into<T: Scalar>(
    op: &SbpOperator<T>,
    field: &[T],
    grid: &Grid2D<T>,
    out: &mut [T],
) -> Result<()> {
    check_len("y-operator size", grid.npy, op.n())?;
    check_len("field", grid.len(), field.len())?;
    op.d.apply_y(field, grid.npx, T::one() / op.h, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Closure,
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessResidual {
    pub degree: usize,
    pub region: Region,
    /// Whether the operator is expected to be exact for this degree here.
    pub required: bool,
    pub max_residual: f64,
}

/// Algebraic property report for an SBP operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SbpReport {
    /// `max |(Q + Q^T - B)_ij|`.
    pub skew_residual: f64,
    /// Smallest norm weight (in units of `h`).
    pub min_weight: f64,
    pub exactness: Vec<ExactnessResidual>,
}

impl SbpReport {
    /// Largest residual among the degrees the operator must reproduce.
    pub fn max_required_exactness_residual(&self) -> f64 {
        self.exactness
            .iter()
            .filter(|e| e.required)
            .map(|e| e.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, skew_tol: f64, exact_tol: f64) -> bool {
        self.skew_residual <= skew_tol
            && self.min_weight > 0.0
            && self.max_required_exactness_residual() <= exact_tol
    }
}

/// Evaluates `Q + Q^T = B`, positivity of the norm and polynomial exactness
/// of `D` on the nodes `x_i = i h`.
pub fn verify_sbp<T: Scalar>(op: &SbpOperator<T>) -> SbpReport {
    let n = op.n();
    let q = op.q.to_dense();
    let mut skew = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut b = T::zero();
            if i == j && i == 0 {
                b = -T::one();
            } else if i == j && i == n - 1 {
                b = T::one();
            }
            let r = q[i * n + j] + q[j * n + i] - b;
            skew = skew.max(r.abs().to_f64());
        }
    }
    let min_weight = op
        .weights
        .iter()
        .map(|w| w.to_f64())
        .fold(f64::INFINITY, f64::min);

    let nb = op.order.closure_rows();
    let xs: Vec<T> = (0..n).map(|i| T::from_usize(i) * op.h).collect();
    let mut exactness = Vec::new();
    for degree in 0..=op.order.interior_degree() {
        let f: Vec<T> = xs.iter().map(|&x| pow(x, degree)).collect();
        let mut df = vec![T::zero(); n];
        op.apply(&f, &mut df).expect("lengths agree");
        let mut closure = 0.0f64;
        let mut interior = 0.0f64;
        for i in 0..n {
            let exact = if degree == 0 {
                T::zero()
            } else {
                T::from_usize(degree) * pow(xs[i], degree - 1)
            };
            let r = (df[i] - exact).abs().to_f64();
            if i < nb || i >= n - nb {
                closure = closure.max(r);
            } else {
                interior = interior.max(r);
            }
        }
        exactness.push(ExactnessResidual {
            degree,
            region: Region::Closure,
            required: degree <= op.order.closure_degree(),
            max_residual: closure,
        });
        if n > 2 * nb {
            exactness.push(ExactnessResidual {
                degree,
                region: Region::Interior,
                required: true,
                max_residual: interior,
            });
        }
    }
    SbpReport {
        skew_residual: skew,
        min_weight,
        exactness,
    }
}

fn pow<T: Scalar>(x: T, k: usize) -> T {
    let mut r = T::one();
    for _ in 0..k {
        r *= x;
    }
    r
}
