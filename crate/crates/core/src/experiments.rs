//! Benchmark problems and the convergence-study harness.
//!
//! 1. Rotating hump on `[-1, 1]^2` with far-field data `g = 0`.
//! 2. The same rotation on `[0, 1]^2`; the hump leaves and re-enters the
//!    domain, so the exact solution is imposed at inflow boundaries.
//! 3. A discontinuity translated by the constant velocity `(1, 2)` on
//!    `[0, 1]^2`.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::diagnostics::{convergence_rates, discrete_divergence, l2_norm, p_energy, rel_percent_error, ErrorRecord};
use crate::dissipation::DissipationScaling;
use crate::error::{Error, Result};
use crate::field::MagneticField;
use crate::grid::Grid2D;
use crate::induction::{BoundaryData, FieldFn, InductionScheme, VelocityFn};
use crate::sbp::SbpOrder;
use crate::scalar::Real;
use crate::timestep::{integrate, Aborted, Integrator, IntegratorConfig};

/// Named scheme variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Second-order operator with upwind-scaled dissipation (first order).
    Sbp1,
    Sbp2,
    /// Fourth-order operator with upwind-scaled dissipation (third order).
    Sbp3,
    Sbp4,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Sbp1, Scheme::Sbp2, Scheme::Sbp3, Scheme::Sbp4];

    pub fn order(self) -> SbpOrder {
        match self {
            Scheme::Sbp1 | Scheme::Sbp2 => SbpOrder::Second,
            Scheme::Sbp3 | Scheme::Sbp4 => SbpOrder::Fourth,
        }
    }

    pub fn default_dissipation(self) -> Option<DissipationScaling> {
        match self {
            Scheme::Sbp1 | Scheme::Sbp3 => Some(DissipationScaling::Upwind),
            Scheme::Sbp2 | Scheme::Sbp4 => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Sbp1 => "sbp1",
            Scheme::Sbp2 => "sbp2",
            Scheme::Sbp3 => "sbp3",
            Scheme::Sbp4 => "sbp4",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}; valid schemes: sbp1, sbp2, sbp3, sbp4")))
    }
}

/// Spatial and temporal discretization choices for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig<T> {
    pub order: SbpOrder,
    pub dissipation: Option<DissipationScaling>,
    /// Dissipation coefficient; `None` uses `max (|u1| + |u2|)`.
    pub alpha: Option<T>,
    pub theta: T,
    pub cfl: T,
    pub integrator: Integrator,
}

impl<T: Real> SchemeConfig<T> {
    /// Defaults: `θ = 1`, CFL 0.45, RK2.
    pub fn from_scheme(scheme: Scheme) -> Self {
        Self {
            order: scheme.order(),
            dissipation: scheme.default_dissipation(),
            alpha: None,
            theta: T::one(),
            cfl: T::from_f64(0.45),
            integrator: Integrator::Rk2,
        }
    }

    pub fn with_dissipation(mut self, d: Option<DissipationScaling>) -> Self {
        self.dissipation = d;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    /// Short name such as `sbp4` or `sbp2+accurate`.
    pub fn label(&self) -> String {
        let base = match (self.order, self.dissipation) {
            (SbpOrder::Second, Some(DissipationScaling::Upwind)) => return "sbp1".into(),
            (SbpOrder::Fourth, Some(DissipationScaling::Upwind)) => return "sbp3".into(),
            (SbpOrder::Second, _) => "sbp2",
            (SbpOrder::Fourth, _) => "sbp4",
        };
        match self.dissipation {
            Some(DissipationScaling::Accurate) => format!("{base}+accurate"),
            _ => base.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    Zero,
    Exact,
}

pub type InitialFn<T> = Arc<dyn Fn(T, T) -> [T; 2] + Send + Sync>;

#[derive(Clone)]
pub struct ExperimentSpec<T> {
    pub id: u8,
    /// `[xmin, xmax, ymin, ymax]`.
    pub domain: [T; 4],
    pub velocity: VelocityFn<T>,
    pub initial: InitialFn<T>,
    pub exact: FieldFn<T>,
    pub boundary: BoundaryMode,
    pub t_final: T,
    /// Time for the exact solution to return to the initial data, if any.
    pub period: Option<T>,
    /// Cells per axis for the default convergence study.
    pub grids: Vec<usize>,
    pub schemes: Vec<Scheme>,
}

impl<T> std::fmt::Debug for ExperimentSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExperimentSpec")
            .field("id", &self.id)
            .field("boundary", &self.boundary)
            .field("grids", &self.grids)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ExperimentSpec<T> {
    /// Uniform grid with `cells` intervals per axis.
    pub fn grid(&self, cells: usize) -> Result<Grid2D<T>> {
        self.grid_xy(cells, cells)
    }

    /// Uniform grid with `nx` by `ny` intervals.
    pub fn grid_xy(&self, nx: usize, ny: usize) -> Result<Grid2D<T>> {
        let [x0, x1, y0, y1] = self.domain;
        Grid2D::new(x0, x1, y0, y1, nx + 1, ny + 1)
    }

    pub fn boundary_data(&self) -> BoundaryData<T> {
        match self.boundary {
            BoundaryMode::Zero => BoundaryData::Zero,
            BoundaryMode::Exact => BoundaryData::Exact(self.exact.clone()),
        }
    }

    pub fn initial_field(&self, grid: &Grid2D<T>) -> MagneticField<T> {
        MagneticField::from_fn(*grid, |x, y| (self.initial)(x, y))
    }

    pub fn exact_field(&self, grid: &Grid2D<T>, t: T) -> MagneticField<T> {
        MagneticField::from_fn(*grid, |x, y| (self.exact)(x, y, t))
    }
}

pub fn experiment<T: Real>(id: u8) -> Result<ExperimentSpec<T>> {
    match id {
        1 => Ok(experiment1()),
        2 => Ok(experiment2()),
        3 => Ok(experiment3()),
        _ => Err(Error::Config(format!("unknown experiment {id}; valid ids: 1, 2, 3"))),
    }
}

/// `B_0 = 4 (-y, x - 1/2) exp(-20 ((x - 1/2)^2 + y^2))`.
pub fn rotating_hump<T: Real>(x: T, y: T) -> [T; 2] {
    let c = |v: f64| T::from_f64(v);
    let xs = x - c(0.5);
    let e = (-c(20.0) * (xs * xs + y * y)).exp();
    [-c(4.0) * y * e, c(4.0) * xs * e]
}

/// `R(t) B_0(R(-t) x)` for rotation about the origin.
pub fn rotated_hump<T: Real>(x: T, y: T, t: T) -> [T; 2] {
    let (s, c) = t.sin_cos();
    let xr = c * x + s * y;
    let yr = -s * x + c * y;
    let [b1, b2] = rotating_hump(xr, yr);
    [c * b1 - s * b2, s * b1 + c * b2]
}

fn rotation_spec<T: Real>(id: u8, domain: [T; 4], boundary: BoundaryMode, grids: Vec<usize>) -> ExperimentSpec<T> {
    let two_pi = T::TAU();
    ExperimentSpec {
        id,
        domain,
        velocity: Arc::new(|x: T, y: T| [-y, x]),
        initial: Arc::new(rotating_hump),
        exact: Arc::new(rotated_hump),
        boundary,
        t_final: two_pi,
        period: Some(two_pi),
        grids,
        schemes: vec![Scheme::Sbp2, Scheme::Sbp4],
    }
}

pub fn experiment1<T: Real>() -> ExperimentSpec<T> {
    let one = T::one();
    rotation_spec(1, [-one, one, -one, one], BoundaryMode::Zero, vec![40, 80, 160, 320, 640])
}

pub fn experiment2<T: Real>() -> ExperimentSpec<T> {
    let (zero, one) = (T::zero(), T::one());
    rotation_spec(2, [zero, one, zero, one], BoundaryMode::Exact, vec![10, 20, 40, 80, 160])
}

/// Both components equal 2 where `x > y` and 0 elsewhere, including the
/// line `x = y`.
pub fn step_data<T: Real>(x: T, y: T) -> [T; 2] {
    let v = if x > y { T::from_ratio(2, 1) } else { T::zero() };
    [v, v]
}

pub fn experiment3<T: Real>() -> ExperimentSpec<T> {
    let (zero, one) = (T::zero(), T::one());
    let two = T::from_ratio(2, 1);
    ExperimentSpec {
        id: 3,
        domain: [zero, one, zero, one],
        velocity: Arc::new(move |_, _| [one, two]),
        initial: Arc::new(step_data),
        exact: Arc::new(move |x, y, t| step_data(x - t, y - two * t)),
        boundary: BoundaryMode::Exact,
        t_final: T::from_ratio(1, 2),
        period: None,
        grids: vec![100],
        schemes: vec![Scheme::Sbp1, Scheme::Sbp2, Scheme::Sbp3, Scheme::Sbp4],
    }
}

/// An experiment discretized on one grid with one scheme.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    spec: ExperimentSpec<T>,
    config: SchemeConfig<T>,
    scheme: InductionScheme<T>,
    dt: T,
}

impl<T: Real> Simulation<T> {
    pub fn new(spec: &ExperimentSpec<T>, config: &SchemeConfig<T>, cells: usize) -> Result<Self> {
        Self::on_grid(spec, config, spec.grid(cells)?)
    }

    pub fn on_grid(spec: &ExperimentSpec<T>, config: &SchemeConfig<T>, grid: Grid2D<T>) -> Result<Self> {
        let mut scheme = InductionScheme::new(
            grid,
            config.order,
            spec.velocity.clone(),
            spec.boundary_data(),
            config.theta,
        )?;
        if let Some(scaling) = config.dissipation {
            let alpha = config.alpha.unwrap_or_else(|| scheme.coeffs().max_speed_sum());
            scheme = scheme.with_dissipation(scaling, alpha)?;
        }
        let probe = IntegratorConfig::new(config.integrator, config.cfl, spec.t_final)?;
        let dt = probe.step_size(&grid, scheme.coeffs())?;
        Ok(Self {
            spec: spec.clone(),
            config: config.clone(),
            scheme,
            dt,
        })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        self.scheme.grid()
    }

    pub fn scheme(&self) -> &InductionScheme<T> {
        &self.scheme
    }

    pub fn spec(&self) -> &ExperimentSpec<T> {
        &self.spec
    }

    pub fn config(&self) -> &SchemeConfig<T> {
        &self.config
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn initial_field(&self) -> MagneticField<T> {
        self.spec.initial_field(self.grid())
    }

    /// Advances `field` from `t0` to `t1`. `hook(step, t, field)` sees the
    /// state every `hook_every` steps, plus the first and last state.
    pub fn advance<H>(
        &self,
        field: MagneticField<T>,
        t0: T,
        t1: T,
        hook_every: usize,
        mut hook: H,
    ) -> std::result::Result<MagneticField<T>, Aborted<T>>
    where
        H: FnMut(usize, T, &MagneticField<T>),
    {
        let grid = *self.grid();
        let mut cfg = IntegratorConfig {
            method: self.config.integrator,
            cfl: self.config.cfl,
            t_final: t1 - t0,
            fixed_dt: None,
            hook_every,
        };
        if t1 < t0 {
            cfg.t_final = T::zero();
        }
        let scheme = &self.scheme;
        let run = integrate(
            field.into_vec(),
            &cfg,
            self.dt,
            |v, s, out| scheme.rhs_into(v, t0 + s, out),
            |step, s, v| {
                let f = MagneticField::from_vec(grid, v.to_vec()).expect("state length is fixed");
                hook(step, t0 + s, &f);
            },
        )
        .map_err(|a| Aborted {
            time: t0 + a.time,
            ..a
        })?;
        Ok(MagneticField::from_vec(grid, run.state).expect("state length is fixed"))
    }

    /// Runs from the initial data to `t_final`.
    pub fn run(&self, t_final: T) -> std::result::Result<MagneticField<T>, Aborted<T>> {
        self.advance(self.initial_field(), T::zero(), t_final, 0, |_, _, _| {})
    }

    /// Error, divergence and energy of `field` at time `t`.
    pub fn record(&self, field: &MagneticField<T>, t: T) -> Result<ErrorRecord> {
        let exact = &self.spec.exact;
        let err = rel_percent_error(field, |x, y, s| exact(x, y, s), t)?;
        let div = discrete_divergence(field, self.scheme.op_x(), self.scheme.op_y())?;
        let energy = p_energy(field, self.scheme.op_x(), self.scheme.op_y())?;
        Ok(ErrorRecord {
            grid: self.grid().label(),
            cells: self.grid().npx - 1,
            error_percent: err.to_f64(),
            error_rate: None,
            div_l2: l2_norm(self.grid(), &div).to_f64(),
            div_rate: None,
            energy: energy.to_f64(),
            time: t.to_f64(),
        })
    }
}

/// Runs `config` on `cells` up to `t_final` and reports the final record.
pub fn run_single<T: Real>(
    spec: &ExperimentSpec<T>,
    config: &SchemeConfig<T>,
    cells: usize,
    t_final: T,
) -> Result<(MagneticField<T>, ErrorRecord)> {
    let sim = Simulation::new(spec, config, cells)?;
    let field = sim.run(t_final).map_err(|a| a.error)?;
    let record = sim.record(&field, t_final)?;
    Ok((field, record))
}

/// One grid of a study; failed runs keep their error message.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub cells: usize,
    pub outcome: std::result::Result<ErrorRecord, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyColumn {
    pub scheme: String,
    pub rows: Vec<StudyRow>,
}

impl StudyColumn {
    /// Successful records in grid order.
    pub fn records(&self) -> Vec<ErrorRecord> {
        self.rows.iter().filter_map(|r| r.outcome.clone().ok()).collect()
    }
}

/// Runs every scheme on every grid to `t_final` and fills in observed
/// convergence rates between consecutive successful grids.
pub fn run_convergence_study<T: Real>(
    spec: &ExperimentSpec<T>,
    configs: &[SchemeConfig<T>],
    cells: &[usize],
    t_final: T,
) -> Result<Vec<StudyColumn>> {
    if cells.is_empty() {
        return Err(Error::Config("convergence study needs at least one grid".into()));
    }
    if cells.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config(format!("grids must refine by a factor of 2, got {cells:?}")));
    }
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..cells.len()).map(move |g| (c, g)))
        .collect();
    let outcomes: Vec<std::result::Result<ErrorRecord, String>> = jobs
        .par_iter()
        .map(|&(c, g)| {
            run_single(spec, &configs[c], cells[g], t_final)
                .map(|(_, rec)| rec)
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut columns = Vec::with_capacity(configs.len());
    for (c, config) in configs.iter().enumerate() {
        let mut rows: Vec<StudyRow> = (0..cells.len())
            .map(|g| StudyRow {
                cells: cells[g],
                outcome: outcomes[c * cells.len() + g].clone(),
            })
            .collect();
        fill_rates(&mut rows);
        columns.push(StudyColumn {
            scheme: config.label(),
            rows,
        });
    }
    Ok(columns)
}

fn fill_rates(rows: &mut [StudyRow]) {
    let errors: Vec<f64> = rows
        .iter()
        .map(|r| r.outcome.as_ref().map(|e| e.error_percent).unwrap_or(f64::NAN))
        .collect();
    let divs: Vec<f64> = rows
        .iter()
        .map(|r| r.outcome.as_ref().map(|e| e.div_l2).unwrap_or(f64::NAN))
        .collect();
    let er = convergence_rates(&errors);
    let dr = convergence_rates(&divs);
    for (k, row) in rows.iter_mut().enumerate() {
        if let Ok(rec) = &mut row.outcome {
            rec.error_rate = er[k];
            rec.div_rate = dr[k];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongTimeRecord {
    pub rotations: usize,
    pub time: f64,
    pub error_percent: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongTimeRun {
    pub records: Vec<LongTimeRecord>,
    /// Set when the run stopped before the last rotation.
    pub aborted: Option<Error>,
}

/// Integrates through `rotations` full periods and records the error after
/// each one. The first record is the initial state.
pub fn run_long_time<T: Real>(
    spec: &ExperimentSpec<T>,
    config: &SchemeConfig<T>,
    cells: usize,
    rotations: usize,
) -> Result<LongTimeRun> {
    let period = spec
        .period
        .ok_or_else(|| Error::Config(format!("experiment {} has no rotation period", spec.id)))?;
    let sim = Simulation::new(spec, config, cells)?;
    let mut field = sim.initial_field();
    let mut records = Vec::with_capacity(rotations + 1);
    let mut push = |k: usize, t: T, f: &MagneticField<T>| -> Result<()> {
        let rec = sim.record(f, t)?;
        records.push(LongTimeRecord {
            rotations: k,
            time: rec.time,
            error_percent: rec.error_percent,
            energy: rec.energy,
        });
        Ok(())
    };
    push(0, T::zero(), &field)?;
    let mut aborted = None;
    for k in 1..=rotations {
        let t0 = period * T::from_usize(k - 1);
        let t1 = period * T::from_usize(k);
        match sim.advance(field, t0, t1, 0, |_, _, _| {}) {
            Ok(f) => {
                push(k, t1, &f)?;
                field = f;
            }
            Err(a) => {
                aborted = Some(a.error);
                break;
            }
        }
    }
    Ok(LongTimeRun { records, aborted })
}
