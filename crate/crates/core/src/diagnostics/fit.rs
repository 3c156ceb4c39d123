//! Power-law fits on log-log checkpoints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Field;
use crate::solver::{Event, RunSummary, Solver, SolverError};
use crate::support::{front_extents, SupportSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("fit window rejected: {0}")]
    Window(String),
}

/// Least-squares slope of `log q` against `log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub stderr: f64,
    pub window: [f64; 2],
    pub points: usize,
}

impl RateFit {
    /// Whether the window spans at least one decade.
    pub fn spans_decade(&self) -> bool {
        self.window[1] >= 10.0 * self.window[0]
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        (self.exponent - target).abs() / target.abs()
    }
}

/// Fits `q ~ t^p`, discarding the first 20% of the log-time window.
///
/// Requires at least 5 retained points with positive `t` and `q`, a window of
/// at least one decade, and a quantity that actually varies.
pub fn fit_power_law(times: &[f64], values: &[f64]) -> Result<RateFit, FitError> {
    if times.len() != values.len() {
        return Err(FitError::Window("times and values differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, q)| **t > 0.0 && **q > 0.0)
        .map(|(t, q)| (t.ln(), q.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(FitError::Window(format!("{} usable points", pts.len())));
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let cut = lo + 0.2 * (hi - lo);
    let kept: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.0 >= cut - 1e-12).collect();
    if kept.len() < 5 {
        return Err(FitError::Window(format!(
            "{} points after discarding the transient, need 5",
            kept.len()
        )));
    }
    let t0 = kept.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t1 = kept.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if t1 - t0 < std::f64::consts::LN_10 - 1e-9 {
        return Err(FitError::Window(format!(
            "window [{:.3e}, {:.3e}] spans less than a decade",
            t0.exp(),
            t1.exp()
        )));
    }
    let qmin = kept.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let qmax = kept.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if qmax - qmin < 1e-12 {
        return Err(FitError::Window(
            "quantity is constant over the window".into(),
        ));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = kept
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    Ok(RateFit {
        exponent: slope,
        stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        window: [t0.exp(), t1.exp()],
        points: kept.len(),
    })
}

/// Sup norm, mass and support extents of a physical run at its checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Exponents of the medium, used for the sub-cell front estimate.
    pub m: Vec<f64>,
    pub times: Vec<f64>,
    pub sup: Vec<f64>,
    pub mass: Vec<f64>,
    /// `extents[k][i]`: mask half-width along axis `i` at checkpoint `k`.
    pub extents: Vec<Vec<f64>>,
    /// `fronts[k][i]`: sub-cell front position from [`front_extents`].
    pub fronts: Vec<Vec<f64>>,
    pub summary: RunSummary,
}

impl RunRecord {
    pub fn new(m: &[f64]) -> Self {
        Self {
            m: m.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, f: &Field) {
        self.times.push(f.time);
        self.sup.push(f.max());
        self.mass.push(f.total_mass());
        self.extents.push(SupportSet::of(f).extents());
        self.fronts.push(front_extents(f, &self.m));
    }

    pub fn extent_series(&self, axis: usize) -> Vec<f64> {
        self.extents.iter().map(|e| e[axis]).collect()
    }

    pub fn front_series(&self, axis: usize) -> Vec<f64> {
        self.fronts.iter().map(|e| e[axis]).collect()
    }
}

/// Evolves `u0` and records every checkpoint.
pub fn record_run(
    u0: &Field,
    solver: &Solver,
    checkpoints: &[f64],
) -> Result<RunRecord, SolverError> {
    let t_end = checkpoints.iter().cloned().fold(u0.time, f64::max);
    let mut record = RunRecord::new(solver.params().m());
    let (_, summary) = solver.evolve(u0, t_end, checkpoints, |e| {
        if let Event::Checkpoint(f) = e {
            record.push(f);
        }
    })?;
    record.summary = summary;
    Ok(record)
}

/// `‖u(t)‖_∞ ~ t^{−α̂}`; the returned exponent is `α̂`.
pub fn smoothing_fit(run: &RunRecord) -> Result<RateFit, FitError> {
    let mut fit = fit_power_law(&run.times, &run.sup)?;
    fit.exponent = -fit.exponent;
    Ok(fit)
}

/// Support half-width along `axis` `~ t^{â_i}`, using the sub-cell fronts.
pub fn support_growth_fit(run: &RunRecord, axis: usize) -> Result<RateFit, FitError> {
    fit_power_law(&run.times, &run.front_series(axis))
}

/// Geometric checkpoints `t_0 · r^k` covering `[t_0, t_1]`.
pub fn geometric_checkpoints(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    assert!(t0 > 0.0 && t1 > t0 && count >= 2);
    let r = (t1 / t0).ln() / (count - 1) as f64;
    (0..count).map(|k| t0 * (r * k as f64).exp()).collect()
}
