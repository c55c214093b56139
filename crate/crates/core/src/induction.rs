//! Semi-discrete SBP-SAT right-hand side for the 2D induction equations
//!
//! ```text
//! B1_t + u1 B1_x + u2 B1_y = -(u2)_y B1 + (u1)_y B2
//! B2_t + u1 B2_x + u2 B2_y =  (u2)_x B1 - (u1)_x B2
//! ```
//!
//! Spatial derivatives of both the field and the velocity use the SBP
//! operators. Dirichlet data is imposed weakly, and only at inflow nodes,
//! through penalty terms `σ / p_0 * (V - g)` on each side.

use std::sync::Arc;

use crate::dissipation::{DissipationOperator, DissipationScaling};
use crate::error::{Error, Result};
use crate::field::{check_finite, MagneticField};
use crate::grid::{Grid2D, Side};
use crate::sbp::{apply_dx, apply_dx_into, apply_dy, apply_dy_into, SbpOperator, SbpOrder};
use crate::scalar::Real;
use crate::stencil::check_len;

/// Steady velocity field `u(x, y)`.
pub type VelocityFn<T> = Arc<dyn Fn(T, T) -> [T; 2] + Send + Sync>;

/// Time-dependent vector field `f(x, y, t)`.
pub type FieldFn<T> = Arc<dyn Fn(T, T, T) -> [T; 2] + Send + Sync>;

/// Nodal velocity samples and their SBP derivatives.
#[derive(Clone)]
pub struct VelocityCoeffs<T> {
    pub lam_x: Vec<T>,
    pub lam_y: Vec<T>,
    pub du1dx: Vec<T>,
    pub du1dy: Vec<T>,
    pub du2dx: Vec<T>,
    pub du2dy: Vec<T>,
    velocity: VelocityFn<T>,
}

impl<T: Real> VelocityCoeffs<T> {
    pub fn velocity(&self) -> &VelocityFn<T> {
        &self.velocity
    }

    pub fn max_abs_u1(&self) -> T {
        max_abs(&self.lam_x)
    }

    pub fn max_abs_u2(&self) -> T {
        max_abs(&self.lam_y)
    }

    /// `max (|u1| + |u2|)` over the grid.
    pub fn max_speed_sum(&self) -> T {
        self.lam_x
            .iter()
            .zip(&self.lam_y)
            .fold(T::zero(), |m, (&a, &b)| m.max(a.abs() + b.abs()))
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
}

impl<T> std::fmt::Debug for VelocityCoeffs<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VelocityCoeffs")
            .field("nodes", &self.lam_x.len())
            .finish_non_exhaustive()
    }
}

/// Samples `velocity` on `grid` and differentiates the samples with the
/// SBP operators.
pub fn sample_velocity<T: Real>(
    velocity: VelocityFn<T>,
    grid: &Grid2D<T>,
    op_x: &SbpOperator<T>,
    op_y: &SbpOperator<T>,
) -> Result<VelocityCoeffs<T>> {
    let n = grid.len();
    let mut lam_x = Vec::with_capacity(n);
    let mut lam_y = Vec::with_capacity(n);
    for i in 0..grid.npx {
        let x = grid.x(i);
        for j in 0..grid.npy {
            let [u1, u2] = velocity(x, grid.y(j));
            if !u1.is_finite() || !u2.is_finite() {
                return Err(Error::NonFinite {
                    what: "velocity sample",
                    i,
                    j,
                });
            }
            lam_x.push(u1);
            lam_y.push(u2);
        }
    }
    Ok(VelocityCoeffs {
        du1dx: apply_dx(op_x, &lam_x, grid)?,
        du1dy: apply_dy(op_y, &lam_x, grid)?,
        du2dx: apply_dx(op_x, &lam_y, grid)?,
        du2dy: apply_dy(op_y, &lam_y, grid)?,
        lam_x,
        lam_y,
        velocity,
    })
}

/// Penalty strength on `side` for a boundary node whose velocity component
/// normal to that side is `u_normal` (`u1` on x-sides, `u2` on y-sides).
///
/// Inflow nodes get `σ = -θ |u_n|`, outflow and tangential nodes `σ = 0`.
pub fn sat_sigma<T: Real>(side: Side, u_normal: T, theta: T) -> Result<T> {
    if !(theta >= T::from_ratio(1, 2)) {
        return Err(Error::PenaltyTooWeak(theta.to_f64()));
    }
    let inflow = match side {
        Side::XMin | Side::YMin => u_normal > T::zero(),
        Side::XMax | Side::YMax => u_normal < T::zero(),
    };
    Ok(if inflow {
        -theta * u_normal.abs()
    } else {
        T::zero()
    })
}

/// Per-node penalty strengths on the four sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SatConfig<T> {
    theta: T,
    sigma: [Vec<T>; 4],
}

impl<T: Real> SatConfig<T> {
    pub fn new(theta: T, grid: &Grid2D<T>, coeffs: &VelocityCoeffs<T>) -> Result<Self> {
        let mut sigma: [Vec<T>; 4] = Default::default();
        for (s, side) in Side::ALL.into_iter().enumerate() {
            sigma[s] = (0..side.len(grid))
                .map(|k| {
                    let (i, j) = side.node(grid, k);
                    let idx = grid.index(i, j);
                    let un = match side {
                        Side::XMin | Side::XMax => coeffs.lam_x[idx],
                        Side::YMin | Side::YMax => coeffs.lam_y[idx],
                    };
                    sat_sigma(side, un, theta)
                })
                .collect::<Result<_>>()?;
        }
        Ok(Self { theta, sigma })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn sigma(&self, side: Side) -> &[T] {
        &self.sigma[side_slot(side)]
    }
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::XMin => 0,
        Side::XMax => 1,
        Side::YMin => 2,
        Side::YMax => 3,
    }
}

/// Boundary data snapshots, linearly interpolated in time.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTable<T> {
    times: Vec<T>,
    /// `values[side][snapshot][node]`.
    values: [Vec<Vec<[T; 2]>>; 4],
}

impl<T: Real> BoundaryTable<T> {
    /// `values` is indexed as `[side][snapshot][node]` with sides ordered
    /// like [`Side::ALL`].
    pub fn new(grid: &Grid2D<T>, times: Vec<T>, values: [Vec<Vec<[T; 2]>>; 4]) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Config("boundary table needs at least one time".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("boundary table times must increase".into()));
        }
        for (s, side) in Side::ALL.into_iter().enumerate() {
            check_len("boundary table snapshots", times.len(), values[s].len())?;
            for snap in &values[s] {
                check_len("boundary table side", side.len(grid), snap.len())?;
            }
        }
        Ok(Self { times, values })
    }

    pub fn trace(&self, side: Side, t: T) -> Result<Vec<[T; 2]>> {
        let first = self.times[0];
        let last = *self.times.last().expect("non-empty");
        if t < first || t > last || !t.is_finite() {
            return Err(Error::TimeOutOfRange {
                t: t.to_f64(),
                start: first.to_f64(),
                end: last.to_f64(),
            });
        }
        let snaps = &self.values[side_slot(side)];
        if self.times.len() == 1 {
            return Ok(snaps[0].clone());
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let a = (t - t0) / (t1 - t0);
        Ok(snaps[k - 1]
            .iter()
            .zip(&snaps[k])
            .map(|(l, r)| [l[0] + a * (r[0] - l[0]), l[1] + a * (r[1] - l[1])])
            .collect())
    }
}

/// Dirichlet data `g` for inflow boundaries.
#[derive(Clone)]
pub enum BoundaryData<T> {
    /// Far-field data `g = 0`.
    Zero,
    /// Trace of a known solution `B(x, y, t)`.
    Exact(FieldFn<T>),
    Table(BoundaryTable<T>),
}

impl<T> std::fmt::Debug for BoundaryData<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryData::Zero => f.write_str("Zero"),
            BoundaryData::Exact(_) => f.write_str("Exact(..)"),
            BoundaryData::Table(_) => f.write_str("Table(..)"),
        }
    }
}

/// Evaluates the boundary data along `side` at time `t`, one `(g1, g2)` per
/// boundary node.
pub fn boundary_trace<T: Real>(
    g: &BoundaryData<T>,
    grid: &Grid2D<T>,
    side: Side,
    t: T,
) -> Result<Vec<[T; 2]>> {
    let len = side.len(grid);
    match g {
        BoundaryData::Zero => Ok(vec![[T::zero(); 2]; len]),
        BoundaryData::Exact(f) => Ok((0..len)
            .map(|k| {
                let (i, j) = side.node(grid, k);
                f(grid.x(i), grid.y(j), t)
            })
            .collect()),
        BoundaryData::Table(table) => table.trace(side, t),
    }
}

/// Assembled semi-discrete operator.
#[derive(Debug, Clone)]
pub struct InductionScheme<T> {
    grid: Grid2D<T>,
    op_x: SbpOperator<T>,
    op_y: SbpOperator<T>,
    coeffs: VelocityCoeffs<T>,
    sat: Option<SatConfig<T>>,
    boundary: BoundaryData<T>,
    dissipation: Option<[DissipationOperator<T>; 2]>,
}

impl<T: Real> InductionScheme<T> {
    /// Operators of the given order on `grid`, penalty factor `theta`, no
    /// dissipation.
    pub fn new(
        grid: Grid2D<T>,
        order: SbpOrder,
        velocity: VelocityFn<T>,
        boundary: BoundaryData<T>,
        theta: T,
    ) -> Result<Self> {
        let op_x = SbpOperator::new(order, grid.npx, grid.dx())?;
        let op_y = SbpOperator::new(order, grid.npy, grid.dy())?;
        let coeffs = sample_velocity(velocity, &grid, &op_x, &op_y)?;
        let sat = SatConfig::new(theta, &grid, &coeffs)?;
        Ok(Self {
            grid,
            op_x,
            op_y,
            coeffs,
            sat: Some(sat),
            boundary,
            dissipation: None,
        })
    }

    pub fn from_parts(
        grid: Grid2D<T>,
        op_x: SbpOperator<T>,
        op_y: SbpOperator<T>,
        coeffs: VelocityCoeffs<T>,
        sat: Option<SatConfig<T>>,
        boundary: BoundaryData<T>,
        dissipation: Option<[DissipationOperator<T>; 2]>,
    ) -> Result<Self> {
        check_len("x-operator size", grid.npx, op_x.n())?;
        check_len("y-operator size", grid.npy, op_y.n())?;
        check_len("velocity samples", grid.len(), coeffs.lam_x.len())?;
        if let Some([ax, ay]) = &dissipation {
            check_len("x-dissipation size", grid.npx, ax.n())?;
            check_len("y-dissipation size", grid.npy, ay.n())?;
        }
        Ok(Self {
            grid,
            op_x,
            op_y,
            coeffs,
            sat,
            boundary,
            dissipation,
        })
    }

    /// Adds dissipation along both axes with coefficient `alpha`.
    pub fn with_dissipation(mut self, scaling: DissipationScaling, alpha: T) -> Result<Self> {
        let ax = DissipationOperator::for_operator(&self.op_x, scaling, alpha)?;
        let ay = DissipationOperator::for_operator(&self.op_y, scaling, alpha)?;
        self.dissipation = Some([ax, ay]);
        Ok(self)
    }

    /// Drops all penalty terms.
    pub fn without_sat(mut self) -> Self {
        self.sat = None;
        self
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn op_x(&self) -> &SbpOperator<T> {
        &self.op_x
    }

    pub fn op_y(&self) -> &SbpOperator<T> {
        &self.op_y
    }

    pub fn coeffs(&self) -> &VelocityCoeffs<T> {
        &self.coeffs
    }

    pub fn sat(&self) -> Option<&SatConfig<T>> {
        self.sat.as_ref()
    }

    pub fn boundary(&self) -> &BoundaryData<T> {
        &self.boundary
    }

    pub fn dissipation(&self) -> Option<&[DissipationOperator<T>; 2]> {
        self.dissipation.as_ref()
    }

    /// `∂V/∂t` at time `t`.
    pub fn compute_rhs(&self, v: &MagneticField<T>, t: T) -> Result<MagneticField<T>> {
        if v.grid() != &self.grid {
            return Err(Error::Config("field grid differs from scheme grid".into()));
        }
        let mut out = vec![T::zero(); v.as_slice().len()];
        self.rhs_into(v.as_slice(), t, &mut out)?;
        MagneticField::from_vec(self.grid, out)
    }

    /// Slice form of [`compute_rhs`](Self::compute_rhs); `v` and `out` hold
    /// both components.
    pub fn rhs_into(&self, v: &[T], t: T, out: &mut [T]) -> Result<()> {
        let grid = &self.grid;
        let n = grid.len();
        check_len("state", 2 * n, v.len())?;
        check_len("tendency", 2 * n, out.len())?;
        check_finite(grid, v, "state value")?;

        let c = &self.coeffs;
        let (v1, v2) = v.split_at(n);
        let (o1, o2) = out.split_at_mut(n);
        let mut sx = vec![T::zero(); n];
        let mut sy = vec![T::zero(); n];

        for (vc, oc) in [(v1, &mut *o1), (v2, &mut *o2)] {
            apply_dx_into(&self.op_x, vc, grid, &mut sx)?;
            apply_dy_into(&self.op_y, vc, grid, &mut sy)?;
            for k in 0..n {
                oc[k] = -(c.lam_x[k] * sx[k] + c.lam_y[k] * sy[k]);
            }
            if let Some([ax, ay]) = &self.dissipation {
                ax.apply_x_into(vc, grid, &mut sx)?;
                ay.apply_y_into(vc, grid, &mut sy)?;
                for k in 0..n {
                    oc[k] += sx[k] + sy[k];
                }
            }
        }

        for k in 0..n {
            let (b1, b2) = (v1[k], v2[k]);
            o1[k] += -c.du2dy[k] * b1 + c.du1dy[k] * b2;
            o2[k] += c.du2dx[k] * b1 - c.du1dx[k] * b2;
        }

        if let Some(sat) = &self.sat {
            for side in Side::ALL {
                let sigma = sat.sigma(side);
                if sigma.iter().all(|s| s.is_zero()) {
                    continue;
                }
                let pb = match side {
                    Side::XMin | Side::XMax => self.op_x.boundary_weight(),
                    Side::YMin | Side::YMax => self.op_y.boundary_weight(),
                };
                let g = boundary_trace(&self.boundary, grid, side, t)?;
                for (k, (&s, gk)) in sigma.iter().zip(&g).enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    let (i, j) = side.node(grid, k);
                    let idx = grid.index(i, j);
                    let f = s / pb;
                    o1[idx] += f * (v1[idx] - gk[0]);
                    o2[idx] += f * (v2[idx] - gk[1]);
                }
            }
        }
        Ok(())
    }
}
