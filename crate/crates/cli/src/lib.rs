//! Argument parsing, run orchestration and CSV output for the `induction`
//! binary.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};
use induction_sbp::{
    discrete_divergence, experiment, run_convergence_study, BoundaryMode, DissipationScaling, Error as CoreError,
    ErrorRecord, ExperimentSpec, Integrator, MagneticField, Scheme, SchemeConfig, Simulation,
};

const EXAMPLES: &str = "\
Examples:
  induction --experiment 1 --scheme sbp4 --nx 160 --ny 160
  induction --experiment 2 --scheme sbp2 --study --out results
  induction --experiment 3 --scheme sbp2 --dissipation accurate --out results
  induction --experiment 1 --scheme sbp4 --nx 100 --tfinal 31.4159265 --integrator rk4 --dump-every 500 --out results
";

#[derive(Parser, Debug)]
#[command(
    name = "induction",
    version,
    about = "SBP-SAT finite difference solver for the 2-D magnetic induction equations",
    after_help = EXAMPLES
)]
struct Args {
    /// Test case: 1 rotating hump on [-1,1]^2, 2 same on [0,1]^2, 3 moving discontinuity
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    experiment: u8,

    /// sbp2 / sbp4 are the plain schemes; sbp1 / sbp3 add upwind-scaled dissipation
    #[arg(long, default_value = "sbp2", value_parser = parse_scheme)]
    scheme: Scheme,

    /// Override the scheme's dissipation
    #[arg(long, value_enum)]
    dissipation: Option<DissipationArg>,

    /// Override how boundary data is supplied
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,

    /// Cells in x
    #[arg(long, conflicts_with = "study")]
    nx: Option<usize>,

    /// Cells in y (defaults to --nx)
    #[arg(long, conflicts_with = "study")]
    ny: Option<usize>,

    #[arg(long, default_value_t = 0.45)]
    cfl: f64,

    /// Final time (default depends on the experiment)
    #[arg(long)]
    tfinal: Option<f64>,

    #[arg(long, value_enum, default_value_t = IntegratorArg::Rk2)]
    integrator: IntegratorArg,

    /// SAT penalty strength, at least 1/2
    #[arg(long, default_value_t = 1.0)]
    theta: f64,

    /// Directory for CSV output; nothing is written without it
    #[arg(long)]
    out: Option<PathBuf>,

    /// Dump the field every N time steps
    #[arg(long, requires = "out", conflicts_with = "study")]
    dump_every: Option<usize>,

    /// Run the experiment's built-in grid sequence instead of a single grid
    #[arg(long)]
    study: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DissipationArg {
    None,
    Accurate,
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Zero,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegratorArg {
    Rk2,
    Rk4,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: u8,
    pub scheme: Scheme,
    pub dissipation: Option<DissipationScaling>,
    /// `None` keeps the experiment's own boundary mode.
    pub boundary: Option<BoundaryMode>,
    pub nx: usize,
    pub ny: usize,
    pub cfl: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub theta: f64,
    pub out: Option<PathBuf>,
    pub dump_every: Option<usize>,
    pub study: bool,
}

const DEFAULT_CELLS: usize = 100;

impl RunConfig {
    pub fn spec(&self) -> ExperimentSpec<f64> {
        let mut spec = experiment(self.experiment).expect("experiment id validated during parsing");
        if let Some(b) = self.boundary {
            spec.boundary = b;
        }
        spec
    }

    pub fn scheme_config(&self) -> SchemeConfig<f64> {
        let mut c = SchemeConfig::from_scheme(self.scheme)
            .with_dissipation(self.dissipation)
            .with_integrator(self.integrator);
        c.cfl = self.cfl;
        c.theta = self.theta;
        c
    }

    /// File name stem shared by every output of this run.
    pub fn stem(&self) -> String {
        let label = self.scheme_config().label().replace('+', "-");
        if self.study {
            format!("exp{}_{}_study", self.experiment, label)
        } else {
            format!("exp{}_{}_{}x{}", self.experiment, label, self.nx, self.ny)
        }
    }
}

/// Parses a full argument vector, program name first.
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let invalid = |msg: String| Args::command().error(ErrorKind::ValueValidation, msg);

    if !(args.cfl > 0.0 && args.cfl <= 1.0) {
        return Err(invalid(format!("--cfl must lie in (0, 1], got {}", args.cfl)));
    }
    if !(args.theta.is_finite() && args.theta >= 0.5) {
        return Err(invalid(format!("--theta must be at least 0.5, got {}", args.theta)));
    }
    if let Some(t) = args.tfinal {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!("--tfinal must be finite and non-negative, got {t}")));
        }
    }
    if args.dump_every == Some(0) {
        return Err(invalid("--dump-every must be positive".into()));
    }
    let nx = args.nx.unwrap_or(DEFAULT_CELLS);
    let ny = args.ny.unwrap_or(nx);
    if nx < 2 || ny < 2 {
        return Err(invalid(format!("need at least 2 cells per axis, got {nx}x{ny}")));
    }

    let spec = experiment::<f64>(args.experiment).map_err(|e| invalid(e.to_string()))?;
    let dissipation = match args.dissipation {
        None => args.scheme.default_dissipation(),
        Some(DissipationArg::None) => None,
        Some(DissipationArg::Accurate) => Some(DissipationScaling::Accurate),
        Some(DissipationArg::Upwind) => Some(DissipationScaling::Upwind),
    };
    Ok(RunConfig {
        experiment: args.experiment,
        scheme: args.scheme,
        dissipation,
        boundary: args.boundary.map(|b| match b {
            BoundaryArg::Zero => BoundaryMode::Zero,
            BoundaryArg::Exact => BoundaryMode::Exact,
        }),
        nx,
        ny,
        cfl: args.cfl,
        t_final: args.tfinal.unwrap_or(spec.t_final),
        integrator: match args.integrator {
            IntegratorArg::Rk2 => Integrator::Rk2,
            IntegratorArg::Rk4 => Integrator::Rk4,
        },
        theta: args.theta,
        out: args.out,
        dump_every: args.dump_every,
        study: args.study,
    })
}

/// Usage text including the examples block.
pub fn help_text() -> String {
    Args::command().render_help().to_string()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Unstable(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Unstable(_) => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Formats with six significant digits, switching to exponent form for
/// very small or large magnitudes.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Rounding can carry into a seventh digit (999999.5 -> 1000000).
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() <= 6 {
            return s;
        }
    }
    format!("{v:.5e}")
}

fn opt_sig6(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_default()
}

pub const ERROR_TABLE_HEADER: &str = "grid,error_percent,error_rate,div_l2,div_rate,energy,time";

/// CSV text of an error table, rows sorted by grid size.
pub fn render_error_table(records: &[ErrorRecord]) -> String {
    let mut rows: Vec<&ErrorRecord> = records.iter().collect();
    rows.sort_by_key(|r| r.cells);
    let mut s = String::new();
    s.push_str(ERROR_TABLE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.grid,
            sig6(r.error_percent),
            opt_sig6(r.error_rate),
            sig6(r.div_l2),
            opt_sig6(r.div_rate),
            sig6(r.energy),
            sig6(r.time)
        );
    }
    s
}

pub fn write_error_table(records: &[ErrorRecord], path: &Path) -> Result<(), CliError> {
    if records.is_empty() {
        return Err(CliError::Usage("error table needs at least one record".into()));
    }
    fs::write(path, render_error_table(records)).map_err(io_err(path))
}

/// What a field dump's sidecar line records.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpInfo {
    pub experiment: u8,
    pub scheme: String,
    pub t: f64,
}

/// Sidecar file holding the metadata line of the dump at `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta")
}

/// Writes `x,y,B1,B2,Bmag,divP` per node in storage order, plus a one-line
/// `#` sidecar next to it.
pub fn write_field_dump(
    field: &MagneticField<f64>,
    divergence: &[f64],
    info: &DumpInfo,
    path: &Path,
) -> Result<(), CliError> {
    let grid = field.grid();
    if divergence.len() != grid.len() {
        return Err(CliError::Usage(format!(
            "divergence has {} values for {} nodes",
            divergence.len(),
            grid.len()
        )));
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let (b1, b2) = (field.b1(), field.b2());
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "x,y,B1,B2,Bmag,divP")?;
        for i in 0..grid.npx {
            for j in 0..grid.npy {
                let k = grid.index(i, j);
                let mag = b1[k].hypot(b2[k]);
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    sig6(grid.x(i)),
                    sig6(grid.y(j)),
                    sig6(b1[k]),
                    sig6(b2[k]),
                    sig6(mag),
                    sig6(divergence[k])
                )?;
            }
        }
        w.flush()
    };
    body().map_err(io_err(path))?;

    let meta = sidecar_path(path);
    let line = format!(
        "# experiment={} scheme={} t={} grid={}\n",
        info.experiment,
        info.scheme,
        sig6(info.t),
        grid.label()
    );
    fs::write(&meta, line).map_err(io_err(&meta))
}

/// What a run produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub records: Vec<ErrorRecord>,
    pub files: Vec<PathBuf>,
    /// Grids that went unstable during a study.
    pub failures: Vec<String>,
}

fn classify(e: CoreError) -> CliError {
    match e {
        CoreError::Unstable { .. } | CoreError::NonFinite { .. } => CliError::Unstable(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// Executes the run described by `cfg`.
///
/// Studies keep going past unstable grids; the failures are listed in the
/// summary and the caller decides the exit status.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    if cfg.study {
        run_study(cfg)
    } else {
        run_one(cfg)
    }
}

fn run_study(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let spec = cfg.spec();
    let columns =
        run_convergence_study(&spec, &[cfg.scheme_config()], &spec.grids, cfg.t_final).map_err(classify)?;
    let mut summary = RunSummary::default();
    for col in &columns {
        for row in &col.rows {
            if let Err(msg) = &row.outcome {
                summary.failures.push(format!("{} on {}x{}: {msg}", col.scheme, row.cells, row.cells));
            }
        }
        summary.records.extend(col.records());
    }
    if let (Some(dir), false) = (&cfg.out, summary.records.is_empty()) {
        let path = dir.join(format!("{}.csv", cfg.stem()));
        write_error_table(&summary.records, &path)?;
        summary.files.push(path);
    }
    Ok(summary)
}

fn run_one(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let spec = cfg.spec();
    let scheme_cfg = cfg.scheme_config();
    let grid = spec.grid_xy(cfg.nx, cfg.ny).map_err(classify)?;
    let sim = Simulation::on_grid(&spec, &scheme_cfg, grid).map_err(classify)?;
    let stem = cfg.stem();
    let info = |t: f64| DumpInfo {
        experiment: cfg.experiment,
        scheme: scheme_cfg.label(),
        t,
    };
    let dump = |field: &MagneticField<f64>, t: f64, path: &Path| -> Result<(), CliError> {
        let div = discrete_divergence(field, sim.scheme().op_x(), sim.scheme().op_y()).map_err(classify)?;
        write_field_dump(field, &div, &info(t), path)
    };

    let mut summary = RunSummary::default();
    let mut dump_error = None;
    let every = cfg.dump_every.unwrap_or(0);
    let result = sim.advance(sim.initial_field(), 0.0, cfg.t_final, every, |step, t, field| {
        if every == 0 || dump_error.is_some() {
            return;
        }
        let dir = cfg.out.as_ref().expect("dump cadence requires an output directory");
        let path = dir.join(format!("{stem}_step{step:07}.csv"));
        match dump(field, t, &path) {
            Ok(()) => summary.files.push(path),
            Err(e) => dump_error = Some(e),
        }
    });
    if let Some(e) = dump_error {
        return Err(e);
    }
    let field = result.map_err(|a| classify(a.error))?;
    let record = sim.record(&field, cfg.t_final).map_err(classify)?;
    if !(record.energy.is_finite() && record.error_percent.is_finite()) {
        return Err(CliError::Unstable(format!("solution norm overflowed by t = {}", cfg.t_final)));
    }

    if let Some(dir) = &cfg.out {
        let table = dir.join(format!("{stem}_errors.csv"));
        write_error_table(std::slice::from_ref(&record), &table)?;
        summary.files.push(table);
        let last = dir.join(format!("{stem}_final.csv"));
        dump(&field, cfg.t_final, &last)?;
        summary.files.push(last);
    }
    summary.records.push(record);
    Ok(summary)
}
