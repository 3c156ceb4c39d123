//! Experiment runner behind the `apme` binary: config loading, the four
//! experiment kinds, artifact files and exit codes.

pub mod config;
pub mod verify;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{
    asymptotics, smoothing_fit, support_growth_fit, ConvergenceOptions, DiagnosticsError,
    RunRecord, Summary,
};
use crate::exponents::{derive_exponents, h2_bound, validate, HypothesisError, MediumParams};
use crate::grid::{box_average, total_mass, Field, Grid, GridError};
use crate::io::{self, IoError};
use crate::profile::{barenblatt, compute_profile, Profile, ProfileError, ProfileOptions};
use crate::solver::{Event, Solver, SolverError, StepReport};
use crate::support::radius_function;

pub use config::{ConfigError, ExperimentConfig, ExperimentSpec, GridSpec, InitialSpec};
pub use verify::{run_suite, SuiteOptions, SuiteReport, VerifyError};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Process exit codes of `run`.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    File(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("APME_THREADS: {0}")]
    Threads(String),
}

/// Caps the global thread pool at `APME_THREADS` when set. Returns the cap.
pub fn configure_threads() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var("APME_THREADS") else {
        return Ok(None);
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            CliError::Threads(format!("expected a positive integer, got {raw:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Threads(e.to_string()))?;
    Ok(Some(n))
}

/// Exponent table and hypothesis verdict. The flag is false when H1 or H2 fails.
pub fn info(m: &[f64]) -> (String, bool) {
    let mut out = String::new();
    let n = m.len();
    let verdict = validate(m);
    let _ = writeln!(out, "N      {n}");
    let _ = writeln!(out, "m      {}", fmt_list(m));
    if n == 0 {
        let _ = writeln!(out, "verdict FAIL: {}", HypothesisError::EmptyDimension);
        return (out, false);
    }
    let m_bar = m.iter().sum::<f64>() / n as f64;
    let _ = writeln!(out, "m_bar  {}", fmt(m_bar));
    if let Ok(()) = verdict {
        let e = derive_exponents(&MediumParams::new(m.to_vec()).expect("validated"));
        let _ = writeln!(out, "alpha  {}", fmt(e.alpha));
        let _ = writeln!(out, "sigma  {}", fmt_list(&e.sigma));
        let _ = writeln!(out, "a      {}", fmt_list(&e.a));
        let _ = writeln!(out, "nu     {}", fmt_list(&e.nu));
        let _ = writeln!(out, "beta   {}", fmt(e.beta));
    }
    let h1 = m.iter().all(|&v| v > 1.0);
    let bound = h2_bound(m);
    let h2 = m.iter().all(|&v| v < bound);
    let _ = writeln!(out, "H1     m_i > 1: {}", if h1 { "PASS" } else { "FAIL" });
    let _ = writeln!(
        out,
        "H2     m_i < m_bar + 2/N = {}: {}",
        fmt(bound),
        if h2 { "PASS" } else { "FAIL" }
    );
    match verdict {
        Ok(()) => {
            let _ = writeln!(out, "verdict PASS");
            (out, true)
        }
        Err(e) => {
            let _ = writeln!(out, "verdict FAIL: {e}");
            (out, false)
        }
    }
}

fn fmt(x: f64) -> String {
    let r = format!("{x:.6}");
    let r = r.trim_end_matches('0').trim_end_matches('.');
    r.to_string()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(", ")
}

/// Materializes the initial data of a config.
pub fn initial_field(cfg: &ExperimentConfig) -> Result<Field, CliError> {
    let grid = || -> Result<Arc<Grid>, CliError> {
        Ok(Grid::new(cfg.grid.half_width.clone(), cfg.grid.cells.clone())?.shared())
    };
    Ok(match &cfg.initial {
        InitialSpec::Plateau {
            mass,
            height,
            radius,
            center,
        } => plateau(*mass, *height, *radius, center, grid()?)?,
        InitialSpec::Barenblatt { m, mass } => {
            let mut f = barenblatt(*m, cfg.m.len(), *mass).sample(grid()?);
            f.time = 1.0;
            f
        }
        InitialSpec::File { path } => io::read_field(path)?,
    })
}

/// Plateau of mass `mass` and height `height` on a cube centered at `center`
/// that must fit in `Q(radius)` around it.
pub fn plateau(
    mass: f64,
    height: f64,
    radius: f64,
    center: &[f64],
    grid: Arc<Grid>,
) -> Result<Field, ProfileError> {
    let n = grid.dim() as i32;
    if !(mass > 0.0 && height > 0.0 && radius > 0.0) {
        return Err(ProfileError::Invalid(format!(
            "mass, height and radius must be positive (got {mass}, {height}, {radius})"
        )));
    }
    let capacity = 2f64.powi(n) * height * radius.powi(n);
    if mass > capacity * (1.0 + 1e-12) {
        return Err(ProfileError::Infeasible { mass, capacity });
    }
    let r1 = (mass / (2f64.powi(n) * height)).powf(1.0 / n as f64);
    if center
        .iter()
        .zip(grid.half_width())
        .any(|(c, l)| c.abs() + r1 > *l)
    {
        return Err(ProfileError::Invalid(format!(
            "plateau of half-width {r1} around {center:?} does not fit in the grid box"
        )));
    }
    let dim = grid.dim();
    Ok(box_average(grid, center, &vec![r1; dim], height))
}

/// Outcome of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub summary: Summary,
    pub outputs: Vec<PathBuf>,
    pub runtime_seconds: f64,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    version: &'a str,
    experiment: &'a str,
    seed: u64,
    passed: bool,
    runtime_seconds: f64,
    outputs: Vec<String>,
    config: &'a ExperimentConfig,
    config_text: &'a str,
}

/// Loads the config at `path`, runs it and returns the process exit code,
/// printing errors to stderr.
pub fn run(path: &Path) -> i32 {
    match run_config_file(path) {
        Ok(outcome) => {
            for (check, passed) in &outcome.summary.pass {
                println!("{} {check}", if *passed { "PASS" } else { "FAIL" });
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn run_config_file(path: &Path) -> Result<RunOutcome, CliError> {
    let (cfg, text) = ExperimentConfig::load(path)?;
    run_experiment(&cfg, &text)
}

/// Runs a parsed config and writes its artifacts plus `manifest.json`.
pub fn run_experiment(cfg: &ExperimentConfig, config_text: &str) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let params = cfg.params()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut out = Artifacts::new(&cfg.output_dir);
    let summary = match &cfg.experiment {
        ExperimentSpec::Evolve { t_end, checkpoints } => {
            evolve(cfg, &params, *t_end, checkpoints, &mut out)?
        }
        ExperimentSpec::Profile { mass, tau_max } => {
            profile(cfg, &params, *mass, *tau_max, &mut out)?
        }
        ExperimentSpec::Verify { checks, cases } => verify(cfg, &params, checks, *cases, &mut out)?,
        ExperimentSpec::Asymptotics {
            t_window,
            checkpoints,
        } => asymptotic(cfg, &params, *t_window, *checkpoints, &mut out)?,
    };
    out.json("summary.json", &summary)?;
    let runtime_seconds = start.elapsed().as_secs_f64();
    let manifest = Manifest {
        name: &cfg.name,
        version: VERSION,
        experiment: cfg.experiment.kind(),
        seed: cfg.seed,
        passed: summary.all_passed(),
        runtime_seconds,
        outputs: out
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        config: cfg,
        config_text,
    };
    out.json("manifest.json", &manifest)?;
    Ok(RunOutcome {
        summary,
        outputs: out.files,
        runtime_seconds,
    })
}

/// Files written into an output directory.
struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.text(name, &serde_json::to_string_pretty(value)?)
    }

    /// A CSV plus a gnuplot script plotting its columns.
    fn trace(&mut self, stem: &str, csv: &str, log_y: bool) -> Result<(), CliError> {
        let csv_name = format!("{stem}.csv");
        self.text(&csv_name, csv)?;
        let columns: Vec<&str> = csv.lines().next().unwrap_or("").split(',').collect();
        self.text(
            &format!("{stem}.gp"),
            &io::gnuplot_script(&csv_name, stem, &columns, log_y),
        )
    }
}

fn csv_columns(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn evolve(
    cfg: &ExperimentConfig,
    params: &MediumParams,
    t_end: f64,
    checkpoints: &[f64],
    out: &mut Artifacts,
) -> Result<Summary, CliError> {
    let u0 = initial_field(cfg)?;
    let solver = Solver::new(params.clone(), cfg.solver.clone())?;
    let mut summary = Summary::new(&cfg.name, params.m());
    let mut steps: Vec<StepReport> = Vec::new();
    let mut fields = vec![u0.clone()];
    let (_, run) = solver.evolve(&u0, t_end, checkpoints, |e| match e {
        Event::Step(r) => steps.push(*r),
        Event::Checkpoint(f) => fields.push(f.clone()),
    })?;
    for (k, f) in fields.iter().enumerate() {
        out.text(&format!("field_{k:03}.csv"), &io::field_to_csv(f))?;
    }
    out.text("steps.csv", &io::step_reports_to_csv(&steps))?;

    let mut record = RunRecord::new(params.m());
    for f in &fields {
        record.push(f);
    }
    let dim = params.dim();
    let mut header = String::from("t,sup,mass");
    for i in 0..dim {
        let _ = write!(header, ",extent_{}", i + 1);
    }
    let rows = (0..record.times.len()).map(|k| {
        let mut row = vec![record.times[k], record.sup[k], record.mass[k]];
        row.extend(&record.extents[k]);
        row
    });
    out.trace("run", &csv_columns(&header, rows), true)?;

    if let Ok(fit) = smoothing_fit(&record) {
        summary.fits.alpha_hat = Some(fit.exponent);
    }
    summary.fits.a_hat = (0..dim)
        .filter_map(|i| support_growth_fit(&record, i).ok().map(|f| f.exponent))
        .collect();
    let expected = run.initial_mass - run.boundary_flux + run.clamp_mass;
    let drift = (run.final_mass - expected).abs() / run.initial_mass.max(f64::MIN_POSITIVE);
    summary.record("mass_balance", drift <= 1e-10);
    Ok(summary)
}

fn profile_options(cfg: &ExperimentConfig, tau_max: f64) -> ProfileOptions {
    ProfileOptions {
        cells: cfg.grid.cells.iter().copied().max().unwrap_or(128),
        half_width: Some(cfg.grid.half_width.clone()),
        tau_max,
        ..ProfileOptions::default()
    }
}

fn write_profile(p: &Profile, out: &mut Artifacts) -> Result<(), CliError> {
    out.text("profile.csv", &io::field_to_csv(&p.field))?;
    out.json("profile.json", &p.manifest())?;
    out.text("profile_mask.csv", &io::mask_to_csv(&p.support))?;
    if let Ok(r) = radius_function(&p.support) {
        out.text("profile_radius.csv", &io::radius_to_csv(&r))?;
    }
    let history = csv_columns(
        "window,difference",
        p.history
            .iter()
            .enumerate()
            .map(|(k, d)| vec![(k + 1) as f64, *d]),
    );
    out.trace("profile_history", &history, true)
}

fn profile(
    cfg: &ExperimentConfig,
    params: &MediumParams,
    mass: f64,
    tau_max: f64,
    out: &mut Artifacts,
) -> Result<Summary, CliError> {
    let p = compute_profile(params, mass, &profile_options(cfg, tau_max))?;
    write_profile(&p, out)?;
    let mut summary = Summary::new(&cfg.name, params.m());
    summary.record("residual_below_tol", p.residual < p.tol);
    summary.record("checks", p.checks.failures(p.tol).is_empty());
    Ok(summary)
}

fn verify(
    cfg: &ExperimentConfig,
    params: &MediumParams,
    checks: &[String],
    cases: usize,
    out: &mut Artifacts,
) -> Result<Summary, CliError> {
    let opts = SuiteOptions {
        checks: checks.to_vec(),
        cases,
        seed: cfg.seed,
        m: Some(params.m().to_vec()),
        cells: cfg.grid.cells.iter().copied().min().unwrap_or(40),
    };
    let report = run_suite(&opts)?;
    out.json("verify.json", &report)?;
    let mut csv = String::from("check,case,passed,defect\n");
    let mut summary = Summary::new(&cfg.name, params.m());
    for c in &report.checks {
        for k in &c.cases {
            let _ = writeln!(csv, "{},{},{},{:.16e}", c.name, k.case, k.passed, k.defect);
        }
        summary.record(c.name.clone(), c.passed());
    }
    out.text("verify.csv", &csv)?;
    Ok(summary)
}

fn asymptotic(
    cfg: &ExperimentConfig,
    params: &MediumParams,
    t_window: f64,
    count: usize,
    out: &mut Artifacts,
) -> Result<Summary, CliError> {
    let u0 = initial_field(cfg)?;
    let mass = total_mass(&u0);
    let p = compute_profile(params, mass, &profile_options(cfg, 40.0))?;
    write_profile(&p, out)?;
    let count = count.max(1);
    let taus: Vec<f64> = (0..=count)
        .map(|k| t_window * k as f64 / count as f64)
        .collect();
    let opts = ConvergenceOptions {
        solver: cfg.solver.clone(),
        ..ConvergenceOptions::default()
    };
    let (norms, sets) = asymptotics(&u0, &p, &taus, &opts)?;
    let mut traces: Vec<_> = norms.traces.iter().collect();
    traces.push(&norms.core_linf);
    out.trace("norms", &io::traces_to_csv(&traces), true)?;
    out.trace(
        "sets",
        &io::traces_to_csv(&[&sets.omega, &sets.gamma]),
        false,
    )?;

    let mut summary = Summary::new(&cfg.name, params.m());
    if let Some(l1) = norms.trace(1.0) {
        summary.record(
            "l1_final_below_0.05M",
            l1.last().is_some_and(|v| v <= 0.05 * mass),
        );
        summary.record("l1_nonincreasing", l1.nonincreasing_after(0.2, 1e-3 * mass));
    }
    summary.record("interpolation", norms.interpolation_ok);
    summary.record(
        "hausdorff_within_3_cells",
        sets.omega.last().is_some_and(|d| d <= 3.0 * sets.cell)
            && sets.gamma.last().is_some_and(|d| d <= 3.0 * sets.cell),
    );
    summary.record("mass_bracket", sets.tau_eps.is_some());
    Ok(summary)
}
