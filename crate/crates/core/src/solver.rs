//! Conservative explicit finite-volume stepping for `u_t = Σ_i (u^{m_i})_{x_i x_i}`.
//!
//! The flux across a face is the difference of the Kirchhoff potential
//! `w_i = (u + ε)^{m_i} − ε^{m_i}` at the two adjacent cell centers, so the
//! update is conservative in the interior and monotone under the CFL bound
//! `dt ≤ cfl / (2 Σ_i D_i / h_i²)` with `D_i = m_i (u_max + ε)^{m_i − 1}`.
//!
//! With `ε > 0` the field holds the excess over the constant background `ε`
//! (the lifted solution is `u + ε`). Ghost cells beyond the box carry zero
//! excess: the lifted boundary value is `ε` in [`Boundary::Lift`] mode and the
//! plain Dirichlet zero in [`Boundary::Zero`] mode.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::MediumParams;
use crate::grid::{Field, Grid, GridError};
use crate::stencil::{box_mass, IndexBox, Kernel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("solver supports dimensions 1..=3, got {0}")]
    Dimension(usize),
    #[error("field dimension {field} does not match the medium dimension {medium}")]
    DimensionMismatch { field: usize, medium: usize },
    #[error("time step {dt} exceeds the stable step {stable}")]
    Cfl { dt: f64, stable: f64 },
    #[error("end time {t_end} is before the field time {time}")]
    Backwards { t_end: f64, time: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Zero,
    Lift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Regularizing lift `ε ≥ 0`.
    pub epsilon: f64,
    pub cfl_safety: f64,
    pub boundary: Boundary,
    pub max_dt: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            cfl_safety: 0.4,
            boundary: Boundary::Zero,
            max_dt: None,
        }
    }
}

impl SolverConfig {
    pub fn lifted(epsilon: f64) -> Self {
        Self {
            epsilon,
            boundary: Boundary::Lift,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SolverError::Config(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(SolverError::Config(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if self.boundary == Boundary::Lift && self.epsilon <= 0.0 {
            return Err(SolverError::Config(
                "boundary = lift requires epsilon > 0".into(),
            ));
        }
        if let Some(cap) = self.max_dt {
            if !(cap > 0.0) {
                return Err(SolverError::Config(format!(
                    "max_dt must be > 0, got {cap}"
                )));
            }
        }
        Ok(())
    }
}

/// Bookkeeping of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub time: f64,
    pub dt_used: f64,
    pub mass_before: f64,
    pub mass_after: f64,
    pub max_value: f64,
    /// Mass that left through the box boundary during this step.
    pub boundary_flux: f64,
    /// Net mass added by clamping negative undershoots to zero and by flushing
    /// values below the floor of the stencil (the latter removes mass).
    pub clamp_mass: f64,
}

impl StepReport {
    /// `mass_after − (mass_before − boundary_flux + clamp_mass)`, relative to `mass_before`.
    pub fn conservation_defect(&self) -> f64 {
        let expected = self.mass_before - self.boundary_flux + self.clamp_mass;
        let scale = self.mass_before.abs().max(f64::MIN_POSITIVE);
        (self.mass_after - expected).abs() / scale
    }
}

/// Things an observer sees during [`Solver::evolve`].
#[derive(Debug)]
pub enum Event<'a> {
    Step(&'a StepReport),
    Checkpoint(&'a Field),
}

/// Totals of an [`Solver::evolve`] run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub boundary_flux: f64,
    pub clamp_mass: f64,
    pub warnings: Vec<String>,
}

/// Which right-hand side the stepper integrates.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Operator {
    /// `Σ_i (u^{m_i})_{x_i x_i}`.
    Diffusion,
    /// `Σ_i [(v^{m_i})_{y_i y_i} + κ_i (y_i v)_{y_i}]`, optionally without the
    /// diffusion part.
    Rescaled { drift: Vec<f64>, diffusion: bool },
}

/// Explicit stepper for one medium and configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    params: MediumParams,
    cfg: SolverConfig,
    op: Operator,
}

impl Solver {
    pub fn new(params: MediumParams, cfg: SolverConfig) -> Result<Self, SolverError> {
        Self::with_operator(params, cfg, Operator::Diffusion)
    }

    pub(crate) fn with_operator(
        params: MediumParams,
        cfg: SolverConfig,
        op: Operator,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        if !(1..=3).contains(&params.dim()) {
            return Err(SolverError::Dimension(params.dim()));
        }
        Ok(Self { params, cfg, op })
    }

    pub fn params(&self) -> &MediumParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn check_field(&self, f: &Field) -> Result<(), SolverError> {
        if f.grid().dim() != self.params.dim() {
            return Err(SolverError::DimensionMismatch {
                field: f.grid().dim(),
                medium: self.params.dim(),
            });
        }
        Ok(())
    }

    /// Largest step keeping the scheme monotone (times the safety factor).
    pub fn stable_dt(&self, f: &Field) -> f64 {
        self.stable_dt_at(f.grid(), f.max())
    }

    pub(crate) fn stable_dt_at(&self, grid: &Grid, max_value: f64) -> f64 {
        match &self.op {
            Operator::Diffusion => stable_dt_for(&self.params, &self.cfg, grid, max_value),
            Operator::Rescaled { drift, diffusion } => {
                rescaled_dt_for(&self.params, &self.cfg, grid, max_value, drift, *diffusion)
            }
        }
    }

    pub(crate) fn kernel(&self, grid: &Grid) -> Kernel {
        match &self.op {
            Operator::Diffusion => Kernel::new(grid, self.params.m(), self.cfg.epsilon, None),
            Operator::Rescaled { drift, diffusion } => {
                let mut k = Kernel::new(grid, self.params.m(), self.cfg.epsilon, Some(drift));
                k.set_diffusion(*diffusion);
                k
            }
        }
    }

    /// One explicit step of size `dt`.
    pub fn step(&self, f: &Field, dt: f64) -> Result<(Field, StepReport), SolverError> {
        self.check_field(f)?;
        let stable = self.stable_dt(f);
        if dt > stable * (1.0 + 1e-12) || !(dt >= 0.0) {
            return Err(SolverError::Cfl { dt, stable });
        }
        let mut kernel = self.kernel(f.grid());
        let mut stepper = Stepper::new(&mut kernel, f.values().to_vec());
        let report = stepper.step(&mut kernel, f.time, dt);
        Ok((
            Field::from_parts(f.grid().clone(), stepper.values, f.time + dt),
            report,
        ))
    }

    /// Steps from `f.time` to `t_end`, landing exactly on each checkpoint in
    /// `(f.time, t_end]` and reporting it to `observer`.
    pub fn evolve(
        &self,
        f: &Field,
        t_end: f64,
        checkpoints: &[f64],
        mut observer: impl FnMut(Event<'_>),
    ) -> Result<(Field, RunSummary), SolverError> {
        self.check_field(f)?;
        if t_end < f.time {
            return Err(SolverError::Backwards {
                t_end,
                time: f.time,
            });
        }
        let grid = f.grid().clone();
        let mut kernel = self.kernel(&grid);
        let mut stepper = Stepper::new(&mut kernel, f.values().to_vec());
        let mut stops: Vec<f64> = checkpoints
            .iter()
            .cloned()
            .filter(|&c| c > f.time && c <= t_end)
            .collect();
        stops.sort_by(f64::total_cmp);
        stops.dedup();
        let initial_mass = stepper.mass;
        let mut summary = RunSummary {
            initial_mass,
            ..RunSummary::default()
        };
        let mut t = f.time;
        let mut next_stop = 0;
        while t < t_end {
            let target = stops.get(next_stop).copied().unwrap_or(t_end);
            let stable = self.stable_dt_at(&grid, stepper.max);
            let remaining = target - t;
            let (dt, lands) = if stable >= remaining {
                (remaining, true)
            } else {
                (stable, false)
            };
            let report = stepper.step(&mut kernel, t, dt);
            t = if lands { target } else { t + dt };
            summary.steps += 1;
            summary.boundary_flux += report.boundary_flux;
            summary.clamp_mass += report.clamp_mass;
            observer(Event::Step(&report));
            if lands && next_stop < stops.len() {
                next_stop += 1;
                let snapshot = Field::from_parts(grid.clone(), stepper.values.clone(), t);
                observer(Event::Checkpoint(&snapshot));
            }
        }
        summary.final_mass = stepper.mass;
        if initial_mass > 0.0 && summary.boundary_flux > 1e-8 * initial_mass {
            summary.warnings.push(format!(
                "boundary flux {:.3e} exceeds 1e-8 of the mass {:.3e}; enlarge the box",
                summary.boundary_flux, initial_mass
            ));
        }
        Ok((Field::from_parts(grid, stepper.values, t), summary))
    }
}

pub(crate) fn stable_dt_for(
    params: &MediumParams,
    cfg: &SolverConfig,
    grid: &Grid,
    max_value: f64,
) -> f64 {
    let mut denom = 0.0;
    for (a, &m) in params.m().iter().enumerate() {
        let base = max_value + cfg.epsilon;
        let d = if base > 0.0 {
            m * base.powf(m - 1.0)
        } else {
            0.0
        };
        let h = grid.spacing()[a];
        denom += d / (h * h);
    }
    let dt = if denom > 0.0 {
        cfg.cfl_safety / (2.0 * denom)
    } else {
        f64::INFINITY
    };
    match cfg.max_dt {
        Some(cap) => dt.min(cap),
        None => dt,
    }
}

/// `dτ = cfl · min_i min(h_i² / (2N D_i), h_i / (N κ_i L_i))`, capped by the joint
/// monotonicity bound `1 / Σ_i (2 D_i / h_i² + κ_i L_i / h_i)`.
pub(crate) fn rescaled_dt_for(
    params: &MediumParams,
    cfg: &SolverConfig,
    grid: &Grid,
    max_value: f64,
    drift: &[f64],
    diffusion: bool,
) -> f64 {
    let n = params.dim() as f64;
    let mut dt = f64::INFINITY;
    for (a, &m) in params.m().iter().enumerate() {
        let h = grid.spacing()[a];
        let base = max_value + cfg.epsilon;
        if diffusion && base > 0.0 {
            let d = m * base.powf(m - 1.0);
            dt = dt.min(h * h / (2.0 * n * d));
        }
        let speed = drift[a] * grid.half_width()[a];
        if speed > 0.0 {
            dt = dt.min(h / (n * speed));
        }
    }
    // the per-term bounds only add up to a monotone step for cfl ≤ 1/2; the
    // joint bound keeps every cfl in (0, 1] monotone
    let mut rate = 0.0;
    for (a, &m) in params.m().iter().enumerate() {
        let h = grid.spacing()[a];
        let base = max_value + cfg.epsilon;
        if diffusion && base > 0.0 {
            rate += 2.0 * m * base.powf(m - 1.0) / (h * h);
        }
        rate += drift[a] * grid.half_width()[a] / h;
    }
    let dt = (cfg.cfl_safety * dt).min(if rate > 0.0 {
        1.0 / rate
    } else {
        f64::INFINITY
    });
    match cfg.max_dt {
        Some(cap) => dt.min(cap),
        None => dt,
    }
}

/// Double-buffered state with the box of nonzero cells.
pub(crate) struct Stepper {
    pub values: Vec<f64>,
    scratch: Vec<f64>,
    support: IndexBox,
    scratch_support: IndexBox,
    pub mass: f64,
    pub max: f64,
}

impl Stepper {
    pub fn new(kernel: &mut Kernel, values: Vec<f64>) -> Self {
        let lay = &kernel.layout;
        let support = lay.nonzero_box(&values, &lay.full());
        let mass = box_mass(lay, &values, &support);
        let max = values.iter().cloned().fold(0.0, f64::max);
        let scratch = vec![0.0; values.len()];
        Self {
            values,
            scratch,
            support,
            scratch_support: IndexBox {
                lo: [0; 3],
                hi: [0; 3],
            },
            mass,
            max,
        }
    }

    pub fn step(&mut self, kernel: &mut Kernel, time: f64, dt: f64) -> StepReport {
        let (totals, next) = kernel.advance(
            &self.values,
            &self.support,
            &mut self.scratch,
            &self.scratch_support,
            dt,
        );
        let report = StepReport {
            time: time + dt,
            dt_used: dt,
            mass_before: self.mass,
            mass_after: totals.mass_after,
            max_value: totals.max_value,
            boundary_flux: totals.boundary_flux,
            clamp_mass: totals.clamp_mass,
        };
        std::mem::swap(&mut self.values, &mut self.scratch);
        self.scratch_support = self.support;
        self.support = next;
        self.mass = totals.mass_after;
        self.max = totals.max_value;
        report
    }

    /// Replaces the state (e.g. after symmetrization).
    pub fn reset(&mut self, kernel: &Kernel, values: Vec<f64>) {
        let lay = &kernel.layout;
        // scratch may hold nonzeros anywhere in the old boxes
        let stale = union(&self.support, &self.scratch_support);
        self.scratch_support = stale;
        self.values = values;
        self.support = lay.nonzero_box(&self.values, &lay.full());
        self.mass = box_mass(lay, &self.values, &self.support);
        self.max = self.values.iter().cloned().fold(0.0, f64::max);
    }
}

fn union(a: &IndexBox, b: &IndexBox) -> IndexBox {
    if a.is_empty() {
        return *b;
    }
    if b.is_empty() {
        return *a;
    }
    let mut out = *a;
    for k in 0..3 {
        out.lo[k] = a.lo[k].min(b.lo[k]);
        out.hi[k] = a.hi[k].max(b.hi[k]);
    }
    out
}

/// Free-function form of [`Solver::stable_dt`].
pub fn stable_dt(f: &Field, params: &MediumParams, cfg: &SolverConfig) -> f64 {
    stable_dt_for(params, cfg, f.grid(), f.max())
}

/// Free-function form of [`Solver::step`].
pub fn step(
    f: &Field,
    params: &MediumParams,
    cfg: &SolverConfig,
    dt: f64,
) -> Result<(Field, StepReport), SolverError> {
    Solver::new(params.clone(), cfg.clone())?.step(f, dt)
}

/// One-sided `L¹` distance `∫ (u₁ − u₂)_+` at each checkpoint of a
/// synchronized run of two solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionTrace {
    pub times: Vec<f64>,
    pub positive_part: Vec<f64>,
    /// Largest increase between consecutive recorded values.
    pub max_increase: f64,
    /// Increase tolerance `1e-10 · initial mass`.
    pub tolerance: f64,
    /// Set when some increase exceeded the tolerance.
    pub violated: bool,
}

/// Evolves `f1` and `f2` with a shared step (the smaller stable step of the two)
/// and records `∫ (u₁ − u₂)_+` after every step whose end time is a checkpoint
/// (every step when `checkpoints` is empty).
pub fn compare_evolutions(
    f1: &Field,
    f2: &Field,
    solver: &Solver,
    t_end: f64,
    checkpoints: &[f64],
) -> Result<ContractionTrace, SolverError> {
    if !f1.same_grid(f2) {
        return Err(GridError::GridMismatch.into());
    }
    solver.check_field(f1)?;
    let grid = f1.grid().clone();
    let mut k1 = solver.kernel(&grid);
    let mut k2 = solver.kernel(&grid);
    let mut s1 = Stepper::new(&mut k1, f1.values().to_vec());
    let mut s2 = Stepper::new(&mut k2, f2.values().to_vec());
    let vol = grid.cell_volume();
    let positive =
        |a: &[f64], b: &[f64]| -> f64 { crate::sum::sum_map(a, |i, x| (x - b[i]).max(0.0)) * vol };
    let tolerance = 1e-10 * s1.mass.max(s2.mass);
    let mut times = vec![f1.time];
    let mut values = vec![positive(&s1.values, &s2.values)];
    let mut stops: Vec<f64> = checkpoints
        .iter()
        .cloned()
        .filter(|&c| c > f1.time && c <= t_end)
        .collect();
    stops.sort_by(f64::total_cmp);
    let every_step = stops.is_empty();
    let mut t = f1.time;
    let mut next_stop = 0;
    while t < t_end {
        let target = stops.get(next_stop).copied().unwrap_or(t_end);
        let stable = solver.stable_dt_at(&grid, s1.max.max(s2.max));
        let remaining = target - t;
        let (dt, lands) = if stable >= remaining {
            (remaining, true)
        } else {
            (stable, false)
        };
        s1.step(&mut k1, t, dt);
        s2.step(&mut k2, t, dt);
        t = if lands { target } else { t + dt };
        let record = every_step || (lands && next_stop < stops.len());
        if lands && next_stop < stops.len() {
            next_stop += 1;
        }
        if record {
            times.push(t);
            values.push(positive(&s1.values, &s2.values));
        }
    }
    let max_increase = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(ContractionTrace {
        times,
        positive_part: values,
        max_increase,
        tolerance,
        violated: max_increase > tolerance,
    })
}
