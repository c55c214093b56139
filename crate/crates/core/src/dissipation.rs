//! Artificial dissipation compatible with the SBP norm.
//!
//! The operator is `A = -s * c_p * P^{-1} Δ_p^T Δ_p`, where `Δ_p` is the
//! undivided `p`-th difference (`p = 1` for the second-order scheme, `p = 2`
//! for the fourth-order one), `c_1 = 1/2`, `c_2 = 1/12`, and `P` is the
//! physical SBP norm. With `s = α h` the interior truncation is
//! `O(h^{2p})` and the formal order of the advection scheme is kept; with
//! `s = α` (one extra division by `h`) the interior operator becomes the
//! classical first- or third-order upwind scheme.
//!
//! `P A = -s c_p Δ_p^T Δ_p` is symmetric negative semidefinite, so the
//! operator can only remove energy.

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::sbp::{build_sbp, SbpOperator, SbpOrder};
use crate::scalar::Scalar;
use crate::stencil::{check_len, BandedMatrix, StencilRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DissipationScaling {
    /// Retains the interior order of the first-derivative operator.
    Accurate,
    /// Divided by one more power of `h`; upwind-like, one order lower.
    Upwind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationOperator<T> {
    order: SbpOrder,
    scaling: DissipationScaling,
    alpha: T,
    h: T,
    /// `-c_p W^{-1} Δ_p^T Δ_p` with `W` the dimensionless norm.
    stencil: BandedMatrix<T>,
}

/// Builds a dissipation operator on `n` points with spacing `h`.
pub fn build_dissipation<T: Scalar>(
    order: SbpOrder,
    scaling: DissipationScaling,
    alpha: T,
    n: usize,
    h: T,
) -> Result<DissipationOperator<T>> {
    let sbp = build_sbp(order, n, h)?;
    DissipationOperator::for_operator(&sbp, scaling, alpha)
}

impl<T: Scalar> DissipationOperator<T> {
    /// Dissipation matched to `sbp`'s order, size and norm.
    pub fn for_operator(sbp: &SbpOperator<T>, scaling: DissipationScaling, alpha: T) -> Result<Self> {
        if alpha < T::zero() {
            return Err(Error::NegativeDissipation(alpha.to_f64()));
        }
        let order = sbp.order();
        let p = order.order() / 2;
        let c = match order {
            SbpOrder::Second => T::from_ratio(1, 2),
            SbpOrder::Fourth => T::from_ratio(1, 12),
        };
        let gram = difference_gram::<T>(p, sbp.n());
        let w = sbp.weights();
        let stencil = gram.map_rows(|i, g| -c * g / w[i]);
        Ok(Self {
            order,
            scaling,
            alpha,
            h: sbp.h(),
            stencil,
        })
    }

    pub fn order(&self) -> SbpOrder {
        self.order
    }

    pub fn scaling(&self) -> DissipationScaling {
        self.scaling
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.stencil.n()
    }

    /// Multiplier applied to the dimensionless stencil.
    fn scale(&self) -> T {
        match self.scaling {
            DissipationScaling::Accurate => self.alpha,
            DissipationScaling::Upwind => self.alpha / self.h,
        }
    }

    /// Physical operator `A`, row-major.
    pub fn dense(&self) -> Vec<T> {
        let s = self.scale();
        self.stencil.to_dense().into_iter().map(|c| c * s).collect()
    }

    pub fn apply(&self, input: &[T], out: &mut [T]) -> Result<()> {
        self.stencil.apply_line(input, self.scale(), out)
    }

    /// `out = (A ⊗ I_y) field`.
    pub fn apply_x_into(&self, field: &[T], grid: &Grid2D<T>, out: &mut [T]) -> Result<()> {
        check_len("x-dissipation size", grid.npx, self.n())?;
        self.stencil.apply_x(field, grid.npy, self.scale(), out)
    }

    /// `out = (I_x ⊗ A) field`.
    pub fn apply_y_into(&self, field: &[T], grid: &Grid2D<T>, out: &mut [T]) -> Result<()> {
        check_len("y-dissipation size", grid.npy, self.n())?;
        self.stencil.apply_y(field, grid.npx, self.scale(), out)
    }
}

/// `Δ_p^T Δ_p` for the undivided `p`-th difference on `n` points.
fn difference_gram<T: Scalar>(p: usize, n: usize) -> BandedMatrix<T> {
    // Δ_p[k][k + m] = (-1)^(p - m) * binom(p, m)
    let binom = |m: usize| -> i64 {
        let mut b = 1i64;
        for t in 0..m {
            b = b * (p - t) as i64 / (t + 1) as i64;
        }
        b
    };
    let delta = |k: usize, col: usize| -> i64 {
        if col < k || col > k + p {
            0
        } else {
            let m = col - k;
            let sign = if (p - m).is_multiple_of(2) { 1 } else { -1 };
            sign * binom(m)
        }
    };
    let nrows = n - p;
    let rows = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(p);
            let hi = (i + p).min(n - 1);
            let coeffs = (lo..=hi)
                .map(|j| {
                    let kmin = i.max(j).saturating_sub(p);
                    let kmax = i.min(j).min(nrows - 1);
                    let s: i64 = (kmin..=kmax).map(|k| delta(k, i) * delta(k, j)).sum();
                    T::from_ratio(s, 1)
                })
                .collect();
            StencilRow::new(lo, coeffs)
        })
        .collect();
    BandedMatrix::from_rows(rows)
}
