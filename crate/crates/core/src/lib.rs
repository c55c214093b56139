//! Summation-by-parts finite differences for the two-dimensional magnetic
//! induction equation
//!
//! ```text
//! B_t + (u . grad) B = (B . grad) u - B (div u),
//! ```
//!
//! with weak (penalty) inflow boundary conditions, optional artificial
//! dissipation and explicit Runge-Kutta time stepping.
//!
//! Everything is generic over the scalar type. Operators can be built with
//! [`num_rational::Rational64`] to check the summation-by-parts identities
//! exactly; time integration and diagnostics need a floating-point type.
//!
//! ```
//! use induction_sbp::{experiment1, run_single, Scheme, SchemeConfig};
//!
//! let spec = experiment1::<f64>();
//! let cfg = SchemeConfig::from_scheme(Scheme::Sbp2);
//! let (_, record) = run_single(&spec, &cfg, 20, 0.1).unwrap();
//! assert!(record.error_percent.is_finite());
//! ```

pub mod diagnostics;
pub mod dissipation;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod induction;
pub mod sbp;
pub mod scalar;
pub mod stencil;
pub mod timestep;

pub use diagnostics::{convergence_rates, discrete_divergence, l2_norm, p_energy, rel_percent_error, ErrorRecord};
pub use dissipation::{build_dissipation, DissipationOperator, DissipationScaling};
pub use error::{Error, Result};
pub use experiments::{
    experiment, experiment1, experiment2, experiment3, run_convergence_study, run_long_time, run_single,
    BoundaryMode, ExperimentSpec, LongTimeRecord, LongTimeRun, Scheme, SchemeConfig, Simulation, StudyColumn,
    StudyRow,
};
pub use field::MagneticField;
pub use grid::{Grid2D, Side};
pub use induction::{
    boundary_trace, sample_velocity, sat_sigma, BoundaryData, BoundaryTable, FieldFn, InductionScheme, SatConfig,
    VelocityCoeffs, VelocityFn,
};
pub use sbp::{apply_dx, apply_dy, build_sbp, verify_sbp, SbpOperator, SbpOrder, SbpReport};
pub use scalar::{Real, Scalar};
pub use stencil::{BandedMatrix, StencilRow};
pub use timestep::{compute_dt, integrate, rk2_step, rk4_step, Aborted, Integration, Integrator, IntegratorConfig};

pub type Grid2D64 = Grid2D<f64>;
pub type SbpOperator64 = SbpOperator<f64>;
pub type DissipationOperator64 = DissipationOperator<f64>;
pub type MagneticField64 = MagneticField<f64>;
pub type InductionScheme64 = InductionScheme<f64>;
pub type SbpOperatorExact = SbpOperator<num_rational::Rational64>;
