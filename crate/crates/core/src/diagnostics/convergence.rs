//! Convergence of rescaled solutions towards the profile of the same mass.
//!
//! The rescaled flow is started directly from the data, which corresponds to
//! the time shift `t0 = 1`: `v(y, 0) = u_0(y)`.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::grid::{lp_distance, lp_distance_on, sample, total_mass, Field};
use crate::profile::{rescale_mass, Profile};
use crate::rescale::rescaled_solver;
use crate::solver::{Event, SolverConfig};
use crate::support::{hausdorff, SupportSet};

/// Values recorded at strictly increasing checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub label: String,
    pub checkpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConvergenceTrace {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, tau: f64, value: f64) {
        debug_assert!(self.checkpoints.last().map_or(true, |&t| tau > t));
        self.checkpoints.push(tau);
        self.values.push(value);
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Value at the latest checkpoint not after `tau`.
    pub fn at(&self, tau: f64) -> Option<f64> {
        let k = self.checkpoints.iter().rposition(|&t| t <= tau + 1e-12)?;
        Some(self.values[k])
    }

    /// Whether the values never grow by more than `tol` once the first
    /// `transient` fraction of the checkpoint window has passed.
    pub fn nonincreasing_after(&self, transient: f64, tol: f64) -> bool {
        let (Some(&t0), Some(&t1)) = (self.checkpoints.first(), self.checkpoints.last()) else {
            return true;
        };
        let start = t0 + transient * (t1 - t0);
        let tail: Vec<f64> = self
            .checkpoints
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= start - 1e-12)
            .map(|(_, v)| *v)
            .collect();
        tail.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    /// `tau,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = format!("tau,{}\n", self.label);
        for (t, v) in self.checkpoints.iter().zip(&self.values) {
            out.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOptions {
    /// Exponents `p` of the recorded `‖v − F‖_p`; `f64::INFINITY` for the sup norm.
    pub ps: Vec<f64>,
    /// Core region `{F ≥ core_fraction · peak}` of the separate sup-norm trace.
    pub core_fraction: f64,
    /// Mass bracket half-width as a fraction of `M`.
    pub bracket: f64,
    pub solver: SolverConfig,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            ps: vec![1.0, 2.0, f64::INFINITY],
            core_fraction: 0.05,
            bracket: 0.1,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// One trace per requested `p`.
    pub traces: Vec<ConvergenceTrace>,
    /// Sup norm on `{F ≥ core_fraction · peak}`.
    pub core_linf: ConvergenceTrace,
    /// Sup norm on the complement, dominated by the free boundary.
    pub front_linf: ConvergenceTrace,
    /// `‖d‖₂² ≤ ‖d‖₁ ‖d‖_∞` held at every checkpoint.
    pub interpolation_ok: bool,
}

impl ConvergenceReport {
    pub fn trace(&self, p: f64) -> Option<&ConvergenceTrace> {
        self.traces.iter().find(|t| t.label == norm_label(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportConvergenceReport {
    /// `d_H(Ω(v, τ), Ω(F))`.
    pub omega: ConvergenceTrace,
    /// `d_H(Γ(v, τ), Γ(F))` between the edge cells of the masks.
    pub gamma: ConvergenceTrace,
    /// Smallest grid spacing, the resolution floor of both traces.
    pub cell: f64,
    /// `Ω(F_{M−εM}) ⊆ Ω(v, τ) ⊆ Ω(F_{M+εM})` per checkpoint.
    pub bracket: Vec<bool>,
    /// First checkpoint from which the bracket holds for good.
    pub tau_eps: Option<f64>,
}

fn norm_label(p: f64) -> String {
    if p.is_infinite() {
        "Linf".to_string()
    } else {
        format!("L{p}")
    }
}

/// Puts `u0` on the profile grid and checks its mass.
fn prepare(u0: &Field, profile: &Profile) -> Result<Field, DiagnosticsError> {
    let grid = profile.grid().clone();
    let mut v = if u0.same_grid(&profile.field) {
        u0.clone()
    } else {
        sample(|y| u0.interpolate(y), grid, 0.0).field
    };
    v.time = 0.0;
    let (data, target) = (total_mass(&v), profile.mass);
    if (data - target).abs() > 1e-3 * target {
        return Err(DiagnosticsError::MassMismatch {
            data,
            profile: target,
        });
    }
    Ok(v)
}

/// Evolves the rescaled flow from `u0` and hands every checkpoint (and the
/// initial state when `0` is requested) to `visit`.
fn observe(
    u0: &Field,
    profile: &Profile,
    taus: &[f64],
    cfg: &SolverConfig,
    mut visit: impl FnMut(&Field) -> Result<(), DiagnosticsError>,
) -> Result<(), DiagnosticsError> {
    if taus.windows(2).any(|w| w[1] <= w[0]) || taus.first().is_some_and(|&t| t < 0.0) {
        return Err(DiagnosticsError::Invalid(
            "checkpoints must be nonnegative and strictly increasing".into(),
        ));
    }
    let v = prepare(u0, profile)?;
    if taus.first() == Some(&0.0) {
        visit(&v)?;
    }
    let Some(&tau_end) = taus.last() else {
        return Ok(());
    };
    let solver = rescaled_solver(&profile.params, cfg.clone())?;
    let mut failure = None;
    solver.evolve(&v, tau_end, taus, |e| {
        if let Event::Checkpoint(f) = e {
            if failure.is_none() {
                if let Err(err) = visit(f) {
                    failure = Some(err);
                }
            }
        }
    })?;
    failure.map_or(Ok(()), Err)
}

/// Records `‖v(τ) − F_M‖_p` for the requested `p` at the checkpoints `taus`.
pub fn convergence_to_profile(
    u0: &Field,
    profile: &Profile,
    taus: &[f64],
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport, DiagnosticsError> {
    let mut norms = NormTracker::new(profile, opts);
    observe(u0, profile, taus, &opts.solver, |v| norms.visit(v))?;
    Ok(norms.finish())
}

/// Records the Hausdorff distances of positivity sets and free boundaries and
/// checks the mass bracket at the checkpoints `taus`.
pub fn support_convergence(
    u0: &Field,
    profile: &Profile,
    taus: &[f64],
    opts: &ConvergenceOptions,
) -> Result<SupportConvergenceReport, DiagnosticsError> {
    let mut sets = SetTracker::new(profile, opts)?;
    observe(u0, profile, taus, &opts.solver, |v| sets.visit(v))?;
    Ok(sets.finish())
}

/// Both reports from a single evolution.
pub fn asymptotics(
    u0: &Field,
    profile: &Profile,
    taus: &[f64],
    opts: &ConvergenceOptions,
) -> Result<(ConvergenceReport, SupportConvergenceReport), DiagnosticsError> {
    let mut norms = NormTracker::new(profile, opts);
    let mut sets = SetTracker::new(profile, opts)?;
    observe(u0, profile, taus, &opts.solver, |v| {
        norms.visit(v)?;
        sets.visit(v)
    })?;
    Ok((norms.finish(), sets.finish()))
}

struct NormTracker<'a> {
    profile: &'a Profile,
    ps: Vec<f64>,
    traces: Vec<ConvergenceTrace>,
    core: Vec<bool>,
    front: Vec<bool>,
    core_linf: ConvergenceTrace,
    front_linf: ConvergenceTrace,
    interpolation_ok: bool,
}

impl<'a> NormTracker<'a> {
    fn new(profile: &'a Profile, opts: &ConvergenceOptions) -> Self {
        let level = opts.core_fraction * profile.peak();
        let core: Vec<bool> = profile.field.values().iter().map(|&f| f >= level).collect();
        let front = core.iter().map(|c| !c).collect();
        Self {
            profile,
            ps: opts.ps.clone(),
            traces: opts
                .ps
                .iter()
                .map(|&p| ConvergenceTrace::new(norm_label(p)))
                .collect(),
            core,
            front,
            core_linf: ConvergenceTrace::new("Linf_core"),
            front_linf: ConvergenceTrace::new("Linf_front"),
            interpolation_ok: true,
        }
    }

    fn visit(&mut self, v: &Field) -> Result<(), DiagnosticsError> {
        let f = &self.profile.field;
        for (trace, &p) in self.traces.iter_mut().zip(&self.ps) {
            trace.push(v.time, lp_distance(v, f, p)?);
        }
        let l1 = lp_distance(v, f, 1.0)?;
        let l2 = lp_distance(v, f, 2.0)?;
        let linf = lp_distance(v, f, f64::INFINITY)?;
        if l2 * l2 > l1 * linf * (1.0 + 1e-12) + 1e-300 {
            self.interpolation_ok = false;
        }
        self.core_linf
            .push(v.time, lp_distance_on(v, f, f64::INFINITY, &self.core)?);
        self.front_linf
            .push(v.time, lp_distance_on(v, f, f64::INFINITY, &self.front)?);
        Ok(())
    }

    fn finish(self) -> ConvergenceReport {
        ConvergenceReport {
            traces: self.traces,
            core_linf: self.core_linf,
            front_linf: self.front_linf,
            interpolation_ok: self.interpolation_ok,
        }
    }
}

struct SetTracker {
    omega_f: SupportSet,
    gamma_f: SupportSet,
    lower: SupportSet,
    upper: SupportSet,
    omega: ConvergenceTrace,
    gamma: ConvergenceTrace,
    bracket: Vec<bool>,
    cell: f64,
}

impl SetTracker {
    fn new(profile: &Profile, opts: &ConvergenceOptions) -> Result<Self, DiagnosticsError> {
        if !(opts.bracket > 0.0 && opts.bracket < 1.0) {
            return Err(DiagnosticsError::Invalid(format!(
                "bracket fraction {} outside (0, 1)",
                opts.bracket
            )));
        }
        let beta = profile.exponents.beta;
        let lower = rescale_mass(profile, (1.0 - opts.bracket).powf(1.0 / beta))?;
        let upper = rescale_mass(profile, (1.0 + opts.bracket).powf(1.0 / beta))?;
        Ok(Self {
            omega_f: profile.support.clone(),
            gamma_f: profile.support.boundary(),
            lower: lower.support,
            upper: upper.support,
            omega: ConvergenceTrace::new("dH_support"),
            gamma: ConvergenceTrace::new("dH_free_boundary"),
            bracket: Vec::new(),
            cell: profile.grid().min_spacing(),
        })
    }

    fn visit(&mut self, v: &Field) -> Result<(), DiagnosticsError> {
        let omega = SupportSet::of(v);
        let gamma = omega.boundary();
        self.omega.push(v.time, hausdorff(&omega, &self.omega_f)?);
        self.gamma.push(v.time, hausdorff(&gamma, &self.gamma_f)?);
        self.bracket
            .push(self.lower.is_subset_of(&omega) && omega.is_subset_of(&self.upper));
        Ok(())
    }

    fn finish(self) -> SupportConvergenceReport {
        let tau_eps = match self.bracket.iter().rposition(|&b| !b) {
            None => self.omega.checkpoints.first().copied(),
            Some(k) => self.omega.checkpoints.get(k + 1).copied(),
        };
        SupportConvergenceReport {
            omega: self.omega,
            gamma: self.gamma,
            cell: self.cell,
            bracket: self.bracket,
            tau_eps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_monotonicity() {
        let mut t = ConvergenceTrace::new("L1");
        for (k, v) in [5.0, 6.0, 3.0, 2.0, 1.0, 1.0].iter().enumerate() {
            t.push(k as f64, *v);
        }
        assert!(!t.nonincreasing_after(0.0, 0.0));
        assert!(t.nonincreasing_after(0.2, 0.0));
        assert_eq!(t.at(3.5), Some(2.0));
        assert!(t.to_csv().starts_with("tau,L1\n"));
    }

    #[test]
    fn labels() {
        assert_eq!(norm_label(f64::INFINITY), "Linf");
        assert_eq!(norm_label(2.0), "L2");
    }
}
