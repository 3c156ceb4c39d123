//! Self-similar variables
//!
//! `v(y, τ) = (t + t0)^α u(x, t)`, `τ = log(t + t0)`, `y_i = x_i (t + t0)^{−σ_i α}`,
//! and the rescaled equation `v_τ = Σ_i [(v^{m_i})_{y_i y_i} + α σ_i (y_i v)_{y_i}]`
//! whose stationary states are the self-similar profiles.
//!
//! Fields in self-similar variables store `τ` in [`Field::time`].

use std::sync::Arc;

use crate::exponents::{derive_exponents, Exponents, MediumParams};
use crate::grid::{Field, Grid};
use crate::solver::{Event, Operator, RunSummary, Solver, SolverConfig, SolverError, StepReport};

/// Change of variables between `(x, t, u)` and `(y, τ, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaleMap {
    pub exponents: Exponents,
    /// Time shift `t0 > 0`; `τ = log(t + t0)`.
    pub t0: f64,
}

impl RescaleMap {
    pub fn new(exponents: Exponents) -> Self {
        Self { exponents, t0: 1.0 }
    }

    pub fn with_shift(exponents: Exponents, t0: f64) -> Self {
        assert!(t0 > 0.0, "time shift must be positive");
        Self { exponents, t0 }
    }

    pub fn tau(&self, t: f64) -> f64 {
        (t + self.t0).ln()
    }

    pub fn time(&self, tau: f64) -> f64 {
        tau.exp() - self.t0
    }
}

/// A resampled field plus the mass that fell outside the target box.
#[derive(Debug, Clone)]
pub struct Mapped {
    pub field: Field,
    pub mass_deficit: f64,
    /// Set when part of the mapped support lies outside the target grid.
    pub truncated: bool,
}

/// Physical field at time `f.time` to self-similar variables on `target`.
pub fn to_selfsimilar(f: &Field, map: &RescaleMap, target: Arc<Grid>) -> Mapped {
    let s = f.time + map.t0;
    let scale: Vec<f64> = map.exponents.a.iter().map(|&a| s.powf(a)).collect();
    let amp = s.powf(map.exponents.alpha);
    let deficit = outside_mass(f, &target, |x, a| x / scale[a]);
    let field = resample(f, target, |y, a| y * scale[a], amp, map.tau(f.time));
    Mapped {
        field,
        truncated: deficit > 0.0,
        mass_deficit: deficit,
    }
}

/// Self-similar field at `τ = v.time` back to physical variables on `target`.
pub fn from_selfsimilar(v: &Field, map: &RescaleMap, target: Arc<Grid>) -> Mapped {
    let s = v.time.exp();
    let scale: Vec<f64> = map.exponents.a.iter().map(|&a| s.powf(a)).collect();
    let amp = s.powf(-map.exponents.alpha);
    let deficit = outside_mass(v, &target, |y, a| y * scale[a]);
    let field = resample(v, target, |x, a| x / scale[a], amp, s - map.t0);
    Mapped {
        field,
        truncated: deficit > 0.0,
        mass_deficit: deficit,
    }
}

fn resample(
    src: &Field,
    target: Arc<Grid>,
    to_src: impl Fn(f64, usize) -> f64,
    amp: f64,
    time: f64,
) -> Field {
    let dim = target.dim();
    let mut point = vec![0.0; dim];
    let values = (0..target.len())
        .map(|flat| {
            for (a, p) in point.iter_mut().enumerate() {
                *p = to_src(target.center(a, target.axis_index(flat, a)), a);
            }
            amp * src.interpolate(&point)
        })
        .collect();
    Field::from_parts(target, values, time)
}

fn outside_mass(src: &Field, target: &Grid, to_target: impl Fn(f64, usize) -> f64) -> f64 {
    let g = src.grid();
    let mut lost = 0.0;
    for (flat, &v) in src.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let outside = (0..g.dim()).any(|a| {
            let y = to_target(g.center(a, g.axis_index(flat, a)), a);
            y.abs() > target.half_width()[a]
        });
        if outside {
            lost += v;
        }
    }
    lost * g.cell_volume()
}

/// Solver for the rescaled equation of `params`.
pub fn rescaled_solver(params: &MediumParams, cfg: SolverConfig) -> Result<Solver, SolverError> {
    let e = derive_exponents(params);
    Solver::with_operator(
        params.clone(),
        cfg,
        Operator::Rescaled {
            drift: e.a,
            diffusion: true,
        },
    )
}

/// Solver for the confining drift `κ_i (y_i v)_{y_i}` alone.
pub fn drift_solver(params: &MediumParams, cfg: SolverConfig) -> Result<Solver, SolverError> {
    let e = derive_exponents(params);
    Solver::with_operator(
        params.clone(),
        cfg,
        Operator::Rescaled {
            drift: e.a,
            diffusion: false,
        },
    )
}

/// One conservative step of the rescaled equation: central degenerate
/// diffusion plus first-order upwinding of the drift.
pub fn step_rescaled(
    v: &Field,
    params: &MediumParams,
    cfg: &SolverConfig,
    dtau: f64,
) -> Result<(Field, StepReport), SolverError> {
    rescaled_solver(params, cfg.clone())?.step(v, dtau)
}

/// Evolves `v` in `τ` up to `tau_end`, reporting checkpoints exactly.
pub fn evolve_rescaled(
    v: &Field,
    params: &MediumParams,
    cfg: &SolverConfig,
    tau_end: f64,
    checkpoints: &[f64],
    observer: impl FnMut(Event<'_>),
) -> Result<(Field, RunSummary), SolverError> {
    rescaled_solver(params, cfg.clone())?.evolve(v, tau_end, checkpoints, observer)
}
