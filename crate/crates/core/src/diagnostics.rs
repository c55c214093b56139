//! Norms, errors, discrete divergence and convergence rates.

use crate::error::{Error, Result};
use crate::field::MagneticField;
use crate::grid::Grid2D;
use crate::sbp::{apply_dx_into, apply_dy_into, SbpOperator};
use crate::scalar::{pairwise_sum, Real};
use crate::stencil::check_len;

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    /// Cells per axis, `NxM`.
    pub grid: String,
    pub cells: usize,
    /// Relative l2 error of `|B|`, in percent.
    pub error_percent: f64,
    pub error_rate: Option<f64>,
    /// l2 norm of the discrete divergence.
    pub div_l2: f64,
    pub div_rate: Option<f64>,
    /// `V^T (I_2 ⊗ P_x ⊗ P_y) V`.
    pub energy: f64,
    pub time: f64,
}

/// `V^T (I_2 ⊗ P_x ⊗ P_y) V`.
pub fn p_energy<T: Real>(v: &MagneticField<T>, op_x: &SbpOperator<T>, op_y: &SbpOperator<T>) -> Result<T> {
    let g = v.grid();
    check_len("x-operator size", g.npx, op_x.n())?;
    check_len("y-operator size", g.npy, op_y.n())?;
    let px = op_x.norm_diagonal();
    let py = op_y.norm_diagonal();
    let terms: Vec<T> = [v.b1(), v.b2()]
        .into_iter()
        .flat_map(|comp| {
            comp.chunks(g.npy)
                .zip(&px)
                .flat_map(|(line, &wx)| line.iter().zip(&py).map(move |(&b, &wy)| wx * wy * b * b))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `div_P(V) = (D_x ⊗ I) V^1 + (I ⊗ D_y) V^2`.
pub fn discrete_divergence<T: Real>(
    v: &MagneticField<T>,
    op_x: &SbpOperator<T>,
    op_y: &SbpOperator<T>,
) -> Result<Vec<T>> {
    let g = v.grid();
    let mut dx = vec![T::zero(); g.len()];
    let mut dy = vec![T::zero(); g.len()];
    apply_dx_into(op_x, v.b1(), g, &mut dx)?;
    apply_dy_into(op_y, v.b2(), g, &mut dy)?;
    for (a, b) in dx.iter_mut().zip(dy) {
        *a += b;
    }
    Ok(dx)
}

/// Discrete l2 norm `sqrt(dx dy Σ w_ij^2)`.
pub fn l2_norm<T: Real>(grid: &Grid2D<T>, values: &[T]) -> T {
    let sq: Vec<T> = values.iter().map(|&v| v * v).collect();
    (grid.dx() * grid.dy() * pairwise_sum(&sq)).sqrt()
}

/// `100 ‖ |B_num| - |B_exact| ‖ / ‖ |B_exact| ‖` at time `t`.
pub fn rel_percent_error<T, F>(v: &MagneticField<T>, exact: F, t: T) -> Result<T>
where
    T: Real,
    F: Fn(T, T, T) -> [T; 2],
{
    let g = v.grid();
    let reference = MagneticField::from_fn(*g, |x, y| exact(x, y, t));
    let num = v.magnitude();
    let ex = reference.magnitude();
    let diff: Vec<T> = num.iter().zip(&ex).map(|(&a, &b)| a - b).collect();
    let denom = l2_norm(g, &ex);
    if denom.is_zero() {
        return Err(Error::ZeroReference);
    }
    Ok(T::from_ratio(100, 1) * l2_norm(g, &diff) / denom)
}

/// Observed orders `log2(e_{k-1} / e_k)` for a sequence of grids refined
/// by a factor of two. Entry `k` is `None` for `k = 0` and for pairs
/// involving a zero or non-finite error.
pub fn convergence_rates(errors: &[f64]) -> Vec<Option<f64>> {
    let mut rates = Vec::with_capacity(errors.len());
    for k in 0..errors.len() {
        let rate = if k == 0 {
            None
        } else {
            let (a, b) = (errors[k - 1], errors[k]);
            if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                Some((a / b).log2())
            } else {
                None
            }
        };
        rates.push(rate);
    }
    rates
}
