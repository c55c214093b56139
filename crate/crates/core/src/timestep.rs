//! Explicit Runge-Kutta integration with CFL-based step selection.

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::induction::VelocityCoeffs;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrator {
    /// Heun's method (explicit trapezoid).
    Rk2,
    /// Classical four-stage Runge-Kutta.
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig<T> {
    pub method: Integrator,
    pub cfl: T,
    pub t_final: T,
    /// Overrides the CFL step when set.
    pub fixed_dt: Option<T>,
    /// The diagnostics hook fires every `hook_every` steps (0 disables all
    /// but the first and last call).
    pub hook_every: usize,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(method: Integrator, cfl: T, t_final: T) -> Result<Self> {
        let cfg = Self {
            method,
            cfl,
            t_final,
            fixed_dt: None,
            hook_every: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidCfl(self.cfl.to_f64()));
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidTime(format!(
                "final time must be finite and non-negative, got {}",
                self.t_final
            )));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > T::zero()) {
                return Err(Error::InvalidTime(format!("fixed dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }

    /// Step size for this configuration on `grid`.
    pub fn step_size(&self, grid: &Grid2D<T>, coeffs: &VelocityCoeffs<T>) -> Result<T> {
        self.validate()?;
        match self.fixed_dt {
            Some(dt) => Ok(dt),
            None => compute_dt(grid, coeffs, self.cfl),
        }
    }
}

/// `dt = cfl / (max|u1| / dx + max|u2| / dy)`.
pub fn compute_dt<T: Real>(grid: &Grid2D<T>, coeffs: &VelocityCoeffs<T>, cfl: T) -> Result<T> {
    if !(cfl > T::zero() && cfl <= T::one()) {
        return Err(Error::InvalidCfl(cfl.to_f64()));
    }
    let rate = coeffs.max_abs_u1() / grid.dx() + coeffs.max_abs_u2() / grid.dy();
    if !(rate > T::zero()) {
        return Err(Error::ZeroVelocity);
    }
    Ok(cfl / rate)
}

/// Scratch storage for the stage vectors.
#[derive(Debug, Clone)]
pub struct RkWorkspace<T> {
    k: [Vec<T>; 4],
    stage: Vec<T>,
}

impl<T: Real> RkWorkspace<T> {
    pub fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![T::zero(); len]),
            stage: vec![T::zero(); len],
        }
    }
}

/// Advances `v` in place by one step of `method`.
pub fn step_in_place<T, F>(
    method: Integrator,
    v: &mut [T],
    t: T,
    dt: T,
    rhs: &mut F,
    ws: &mut RkWorkspace<T>,
) -> Result<()>
where
    T: Real,
    F: FnMut(&[T], T, &mut [T]) -> Result<()>,
{
    if !(dt > T::zero()) {
        return Err(Error::InvalidTime(format!("dt must be positive, got {dt}")));
    }
    let half = T::from_ratio(1, 2);
    let RkWorkspace { k, stage } = ws;
    match method {
        Integrator::Rk2 => {
            rhs(v, t, &mut k[0])?;
            for ((s, &x), &k0) in stage.iter_mut().zip(v.iter()).zip(&k[0]) {
                *s = x + dt * k0;
            }
            rhs(stage, t + dt, &mut k[1])?;
            for ((x, &k0), &k1) in v.iter_mut().zip(&k[0]).zip(&k[1]) {
                *x += half * dt * (k0 + k1);
            }
        }
        Integrator::Rk4 => {
            let sixth = T::from_ratio(1, 6);
            rhs(v, t, &mut k[0])?;
            for ((s, &x), &k0) in stage.iter_mut().zip(v.iter()).zip(&k[0]) {
                *s = x + half * dt * k0;
            }
            rhs(stage, t + half * dt, &mut k[1])?;
            for ((s, &x), &k1) in stage.iter_mut().zip(v.iter()).zip(&k[1]) {
                *s = x + half * dt * k1;
            }
            rhs(stage, t + half * dt, &mut k[2])?;
            for ((s, &x), &k2) in stage.iter_mut().zip(v.iter()).zip(&k[2]) {
                *s = x + dt * k2;
            }
            rhs(stage, t + dt, &mut k[3])?;
            let two = T::from_ratio(2, 1);
            for (idx, x) in v.iter_mut().enumerate() {
                *x += sixth * dt * (k[0][idx] + two * k[1][idx] + two * k[2][idx] + k[3][idx]);
            }
        }
    }
    Ok(())
}

/// One Heun step from `(v, t)`.
pub fn rk2_step<T, F>(v: &[T], t: T, dt: T, mut rhs: F) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T], T, &mut [T]) -> Result<()>,
{
    let mut out = v.to_vec();
    let mut ws = RkWorkspace::new(v.len());
    step_in_place(Integrator::Rk2, &mut out, t, dt, &mut rhs, &mut ws)?;
    ensure_finite(&out, 0, t + dt)?;
    Ok(out)
}

/// One classical RK4 step from `(v, t)`.
pub fn rk4_step<T, F>(v: &[T], t: T, dt: T, mut rhs: F) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T], T, &mut [T]) -> Result<()>,
{
    let mut out = v.to_vec();
    let mut ws = RkWorkspace::new(v.len());
    step_in_place(Integrator::Rk4, &mut out, t, dt, &mut rhs, &mut ws)?;
    ensure_finite(&out, 0, t + dt)?;
    Ok(out)
}

fn ensure_finite<T: Real>(v: &[T], step: usize, time: T) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Unstable {
            step,
            time: time.to_f64(),
        })
    }
}

/// Final state of a completed integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integration<T> {
    pub state: Vec<T>,
    pub time: T,
    pub steps: usize,
}

/// An integration that stopped early. `last_finite` is the state at
/// `time`, the last one that was entirely finite.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct Aborted<T: std::fmt::Debug> {
    pub error: Error,
    pub last_finite: Vec<T>,
    pub time: T,
    pub steps: usize,
}

/// Integrates from `t = 0` to `config.t_final` with steps of at most `dt`.
/// The last step is shortened to land exactly on the final time.
///
/// `hook(step, t, state)` is called for the initial state, every
/// `config.hook_every` steps and for the final state.
pub fn integrate<T, F, H>(
    v0: Vec<T>,
    config: &IntegratorConfig<T>,
    dt: T,
    mut rhs: F,
    mut hook: H,
) -> std::result::Result<Integration<T>, Aborted<T>>
where
    T: Real,
    F: FnMut(&[T], T, &mut [T]) -> Result<()>,
    H: FnMut(usize, T, &[T]),
{
    let abort = |error: Error, state: Vec<T>, time: T, steps: usize| Aborted {
        error,
        last_finite: state,
        time,
        steps,
    };
    if let Err(e) = config.validate() {
        return Err(abort(e, v0, T::zero(), 0));
    }
    if !(dt > T::zero()) {
        let e = Error::InvalidTime(format!("dt must be positive, got {dt}"));
        return Err(abort(e, v0, T::zero(), 0));
    }

    let t_final = config.t_final;
    let mut v = v0;
    let mut prev = v.clone();
    let mut ws = RkWorkspace::new(v.len());
    let mut t = T::zero();
    let mut step = 0usize;
    hook(0, t, &v);

    // Absorb round-off so a nearly-integral number of steps does not leave
    // a sliver step at the end.
    let slack = T::from_f64(1e-10);
    while t < t_final {
        let remaining = t_final - t;
        let (h, last) = if remaining <= dt * (T::one() + slack) {
            (remaining, true)
        } else {
            (dt, false)
        };
        prev.copy_from_slice(&v);
        if let Err(e) = step_in_place(config.method, &mut v, t, h, &mut rhs, &mut ws) {
            let e = match e {
                Error::NonFinite { .. } => Error::Unstable {
                    step: step + 1,
                    time: (t + h).to_f64(),
                },
                other => other,
            };
            return Err(abort(e, prev, t, step));
        }
        step += 1;
        t = if last {
            t_final
        } else {
            T::from_usize(step) * dt
        };
        if v.iter().any(|x| !x.is_finite()) {
            let e = Error::Unstable {
                step,
                time: t.to_f64(),
            };
            let t_prev = if last { t_final - h } else { T::from_usize(step - 1) * dt };
            return Err(abort(e, prev, t_prev, step - 1));
        }
        if last || (config.hook_every > 0 && step.is_multiple_of(config.hook_every)) {
            hook(step, t, &v);
        }
        if last {
            break;
        }
    }
    Ok(Integration {
        state: v,
        time: t,
        steps: step,
    })
}
