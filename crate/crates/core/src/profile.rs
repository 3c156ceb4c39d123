//! Self-similar fundamental profiles `F_M`.
//!
//! A profile is computed as the long-time limit of the rescaled flow started
//! from admissible data: nonnegative, symmetric and nonincreasing in every
//! `|y_i|`, bounded by a height `L`, supported in a box `Q(R)` and of mass `M`.
//! The isotropic Barenblatt profile is available in closed form as an oracle.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta, gamma::gamma};
use thiserror::Error;

use crate::diagnostics::checks::{ssni_check, SsniReport};
use crate::exponents::{derive_exponents, Exponents, MediumParams};
use crate::grid::{box_average, lp_distance, sample, total_mass, Field, Grid, GridError};
use crate::rescale::rescaled_solver;
use crate::solver::{SolverConfig, SolverError, Stepper};
use crate::sum;
use crate::support::SupportSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("infeasible admissible data: mass {mass} exceeds 2^N L R^N = {capacity}")]
    Infeasible { mass: f64, capacity: f64 },
    #[error("invalid profile input: {0}")]
    Invalid(String),
    #[error(
        "rescaled flow did not settle by tau = {tau_max}; last window differences {history:?}"
    )]
    NotConverged { tau_max: f64, history: Vec<f64> },
    #[error("converged profile failed a post-check: {0}")]
    Verification(String),
    #[error("rescaled support {needed:?} exceeds the grid box {available:?}")]
    OutsideBox {
        needed: Vec<f64>,
        available: Vec<f64>,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Closed-form isotropic profile `F(y) = (C − k|y|²)_+^{1/(m−1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barenblatt {
    pub m: f64,
    pub dim: usize,
    pub mass: f64,
    pub alpha: f64,
    /// `k = α (m − 1) / (2 m N)`.
    pub k: f64,
    /// Free constant fixing the mass.
    pub c: f64,
    /// Support radius `(C/k)^{1/2}`.
    pub radius: f64,
}

/// Isotropic Barenblatt profile of mass `mass`.
pub fn barenblatt(m: f64, dim: usize, mass: f64) -> Barenblatt {
    assert!(m > 1.0 && dim >= 1 && mass > 0.0);
    let n = dim as f64;
    let alpha = n / (n * (m - 1.0) + 2.0);
    let k = alpha * (m - 1.0) / (2.0 * m * n);
    let c = barenblatt_constant(m, dim, mass, k);
    Barenblatt {
        m,
        dim,
        mass,
        alpha,
        k,
        c,
        radius: (c / k).sqrt(),
    }
}

/// Solves `M = |S^{N−1}| C^{p+N/2} k^{−N/2} B(N/2, p+1) / 2` for `C`, `p = 1/(m−1)`.
fn barenblatt_constant(m: f64, dim: usize, mass: f64, k: f64) -> f64 {
    let n = dim as f64;
    let p = 1.0 / (m - 1.0);
    let sphere = 2.0 * PI.powf(n / 2.0) / gamma(n / 2.0);
    let unit = sphere * k.powf(-n / 2.0) * beta(n / 2.0, p + 1.0) / 2.0;
    (mass / unit).powf(1.0 / (p + n / 2.0))
}

impl Barenblatt {
    pub fn value(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let base = self.c - self.k * r2;
        if base <= 0.0 {
            0.0
        } else {
            base.powf(1.0 / (self.m - 1.0))
        }
    }

    pub fn peak(&self) -> f64 {
        self.c.powf(1.0 / (self.m - 1.0))
    }

    /// Self-similar solution `U(x, t) = t^{−α} F(x t^{−α/N})`.
    pub fn solution(&self, x: &[f64], t: f64) -> f64 {
        let s = t.powf(-self.alpha / self.dim as f64);
        let y: Vec<f64> = x.iter().map(|v| v * s).collect();
        t.powf(-self.alpha) * self.value(&y)
    }

    /// Support radius of `U(·, t)`.
    pub fn radius_at(&self, t: f64) -> f64 {
        self.radius * t.powf(self.alpha / self.dim as f64)
    }

    pub fn sample(&self, grid: Arc<Grid>) -> Field {
        sample(|y| self.value(y), grid, 0.0).field
    }
}

/// Initial shape of the admissible data fed to the rescaled flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialShape {
    /// Constant height `L` on the box `Q(R₁)` with `R₁ = (M / (2^N L))^{1/N}`.
    Plateau { height: f64 },
    /// Gaussian-like bump `exp(−|y|² / (2w²))` cut to `Q(R)` and normalized to mass `M`.
    Bump { width: f64 },
}

/// Constants of the admissible set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleData {
    pub mass: f64,
    pub height: f64,
    pub radius: f64,
    pub shape: InitialShape,
}

/// Plateau of height `height` on `Q(R₁)`, sampled by exact cell averages.
pub fn make_admissible(
    mass: f64,
    height: f64,
    radius: f64,
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
    if grid.half_width().iter().any(|&l| l < r1) {
        return Err(ProfileError::Invalid(format!(
            "plateau radius {r1} does not fit in the grid box"
        )));
    }
    let dim = grid.dim();
    Ok(box_average(grid, &vec![0.0; dim], &vec![r1; dim], height))
}

/// Normalized bump of mass `mass` and width `width`, cut to `Q(radius)`.
pub fn make_bump(
    mass: f64,
    width: f64,
    radius: f64,
    grid: Arc<Grid>,
) -> Result<Field, ProfileError> {
    let raw = sample(
        |y| {
            if y.iter().all(|v| v.abs() < radius) {
                (-y.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp()
            } else {
                0.0
            }
        },
        grid,
        0.0,
    )
    .field;
    let m = total_mass(&raw);
    if m <= 0.0 {
        return Err(ProfileError::Invalid(
            "bump has no mass on this grid".into(),
        ));
    }
    Ok(raw.scaled(mass / m))
}

/// Knobs of [`compute_profile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Cells per axis.
    pub cells: usize,
    /// Box half-widths; estimated from a coarse pilot run when `None`.
    pub half_width: Option<Vec<f64>>,
    /// Stationarity tolerance on `‖v(τ+1) − v(τ)‖₁`; defaults to `1e-6 · M`.
    pub tol: Option<f64>,
    /// Budget in `τ` per grid level.
    pub tau_max: f64,
    /// Width of the convergence probe window in `τ`.
    pub window: f64,
    /// CFL factor of the rescaled step (the step is also capped by the joint
    /// monotonicity bound of diffusion plus drift).
    pub cfl_safety: f64,
    /// Coarsest grid of the warm-start cascade: the profile is first settled on
    /// grids halved down to this size and each result seeds the next level.
    pub warm_start_cells: usize,
    /// Steps between explicit symmetrizations (0 disables).
    pub symmetrize_every: usize,
    pub shape: InitialShape,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            cells: 128,
            half_width: None,
            tol: None,
            tau_max: 40.0,
            window: 1.0,
            cfl_safety: 0.95,
            warm_start_cells: 128,
            symmetrize_every: 100,
            shape: InitialShape::Plateau { height: 1.0 },
        }
    }
}

/// Post-hoc verification of a converged profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileChecks {
    pub ssni: SsniReport,
    pub support_inside: bool,
    /// `L¹` norm of the centered stationary operator applied to the profile.
    pub stationary_residual: f64,
    /// `L¹` size of the upwind numerical diffusion on the profile.
    pub truncation_estimate: f64,
}

impl ProfileChecks {
    pub fn failures(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if !self.support_inside {
            out.push("support touches the grid box".to_string());
        }
        let peak = self.ssni.peak;
        if self.ssni.symmetry_mismatch > 1e-9 * peak {
            out.push(format!(
                "symmetry mismatch {:.3e}",
                self.ssni.symmetry_mismatch
            ));
        }
        if self.ssni.monotonicity_violation > 1e-9 * peak + tol {
            out.push(format!(
                "axis monotonicity violation {:.3e}",
                self.ssni.monotonicity_violation
            ));
        }
        if self.stationary_residual > 10.0 * self.truncation_estimate + 10.0 * tol {
            out.push(format!(
                "stationary residual {:.3e} above 10x truncation {:.3e}",
                self.stationary_residual, self.truncation_estimate
            ));
        }
        out
    }
}

/// A converged profile.
#[derive(Debug, Clone)]
pub struct Profile {
    pub params: MediumParams,
    pub exponents: Exponents,
    /// The profile field; its `time` is the `τ` at which it settled.
    pub field: Field,
    pub mass: f64,
    /// `‖v(τ) − v(τ − Δτ)‖₁ / Δτ` over the last probe window.
    pub residual: f64,
    pub tol: f64,
    /// Window differences, one per probe.
    pub history: Vec<f64>,
    pub support: SupportSet,
    pub checks: ProfileChecks,
    pub runtime_seconds: f64,
}

/// JSON manifest persisted next to the profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileManifest {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: Vec<f64>,
    #[serde(rename = "M")]
    pub mass: f64,
    pub residual: f64,
    pub tol: f64,
    pub grid: GridManifest,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridManifest {
    pub half_width: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Profile {
    pub fn grid(&self) -> &Arc<Grid> {
        self.field.grid()
    }

    pub fn peak(&self) -> f64 {
        self.field.max()
    }

    pub fn manifest(&self) -> ProfileManifest {
        ProfileManifest {
            n: self.params.dim(),
            m: self.params.m().to_vec(),
            mass: self.mass,
            residual: self.residual,
            tol: self.tol,
            grid: GridManifest {
                half_width: self.grid().half_width().to_vec(),
                cells: self.grid().cells().to_vec(),
            },
            runtime_seconds: self.runtime_seconds,
        }
    }
}

/// Initial data for the profile iteration on `grid`.
pub fn admissible_field(
    mass: f64,
    shape: InitialShape,
    grid: Arc<Grid>,
) -> Result<Field, ProfileError> {
    let r = grid
        .half_width()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    match shape {
        InitialShape::Plateau { height } => make_admissible(mass, height, r, grid),
        InitialShape::Bump { width } => make_bump(mass, width, r, grid),
    }
}

/// Profile of mass `mass` as the stationary limit of the rescaled flow.
pub fn compute_profile(
    params: &MediumParams,
    mass: f64,
    opts: &ProfileOptions,
) -> Result<Profile, ProfileError> {
    if !(mass > 0.0) {
        return Err(ProfileError::Invalid(format!(
            "mass must be positive, got {mass}"
        )));
    }
    let start = Instant::now();
    let dim = params.dim();
    let half_width = match &opts.half_width {
        Some(h) => h.clone(),
        None => pilot_box(params, mass, opts)?,
    };
    let mut levels = vec![opts.cells];
    while levels[0] % 2 == 0 && levels[0] / 2 >= opts.warm_start_cells.max(8) {
        levels.insert(0, levels[0] / 2);
    }
    let mut seed: Option<Field> = None;
    let mut profile = None;
    for &cells in &levels {
        let grid = Grid::new(half_width.clone(), vec![cells; dim])?.shared();
        let initial = match seed.take() {
            None => admissible_field(mass, opts.shape, grid)?,
            Some(coarse) => refine(&coarse, grid, mass),
        };
        let p = settle(params, initial, opts)?;
        seed = Some(p.field.clone());
        profile = Some(p);
    }
    let mut profile = profile.expect("at least one level");
    profile.runtime_seconds = start.elapsed().as_secs_f64();
    let failures = profile.checks.failures(profile.tol);
    if !failures.is_empty() {
        return Err(ProfileError::Verification(failures.join("; ")));
    }
    Ok(profile)
}

/// Runs the rescaled flow from `initial` until the window difference drops
/// below the tolerance. No post-checks are enforced.
pub fn settle(
    params: &MediumParams,
    initial: Field,
    opts: &ProfileOptions,
) -> Result<Profile, ProfileError> {
    let exponents = derive_exponents(params);
    let mass = total_mass(&initial);
    let tol = opts.tol.unwrap_or(1e-6 * mass);
    let cfg = SolverConfig {
        cfl_safety: opts.cfl_safety,
        ..SolverConfig::default()
    };
    let solver = rescaled_solver(params, cfg)?;
    let grid = initial.grid().clone();
    let symmetric = ssni_check(&initial).symmetry_mismatch == 0.0;
    let mut kernel = solver.kernel(&grid);
    let mut stepper = Stepper::new(&mut kernel, initial.values().to_vec());
    let vol = grid.cell_volume();
    let mut anchor = stepper.values.clone();
    let start = initial.time;
    let mut tau = start;
    let mut next_probe = tau + opts.window;
    let mut history = Vec::new();
    let mut since_sym = 0usize;
    loop {
        let stable = solver.stable_dt_at(&grid, stepper.max);
        let remaining = next_probe - tau;
        let (dt, lands) = if stable >= remaining {
            (remaining, true)
        } else {
            (stable, false)
        };
        stepper.step(&mut kernel, tau, dt);
        tau = if lands { next_probe } else { tau + dt };
        since_sym += 1;
        if symmetric && opts.symmetrize_every > 0 && since_sym >= opts.symmetrize_every {
            let sym = symmetrize(&grid, &stepper.values);
            stepper.reset(&kernel, sym);
            since_sym = 0;
        }
        if lands {
            if symmetric {
                let sym = symmetrize(&grid, &stepper.values);
                stepper.reset(&kernel, sym);
                since_sym = 0;
            }
            let diff =
                sum::sum_map(&stepper.values, |i, v| (v - anchor[i]).abs()) * vol / opts.window;
            history.push(diff);
            if diff < tol {
                break;
            }
            if tau - start >= opts.tau_max - 1e-12 {
                return Err(ProfileError::NotConverged {
                    tau_max: opts.tau_max,
                    history,
                });
            }
            anchor.copy_from_slice(&stepper.values);
            next_probe = tau + opts.window;
        }
    }
    let field = Field::from_parts(grid, stepper.values, tau);
    let residual = *history.last().unwrap_or(&0.0);
    Ok(finish(
        params.clone(),
        exponents,
        field,
        residual,
        tol,
        history,
    ))
}

fn finish(
    params: MediumParams,
    exponents: Exponents,
    field: Field,
    residual: f64,
    tol: f64,
    history: Vec<f64>,
) -> Profile {
    let support = SupportSet::of(&field);
    let checks = ProfileChecks {
        ssni: ssni_check(&field),
        support_inside: !support.touches_box(),
        stationary_residual: stationary_residual(&field, &exponents),
        truncation_estimate: truncation_estimate(&field, &exponents),
    };
    Profile {
        mass: total_mass(&field),
        params,
        exponents,
        field,
        residual,
        tol,
        history,
        support,
        checks,
        runtime_seconds: 0.0,
    }
}

/// Interpolates a coarse field onto `grid` and restores the mass exactly.
fn refine(coarse: &Field, grid: Arc<Grid>, mass: f64) -> Field {
    let mut f = sample(|y| coarse.interpolate(y), grid, coarse.time).field;
    let m = total_mass(&f);
    if m > 0.0 {
        f = f.scaled(mass / m);
    }
    f.time = coarse.time;
    f
}

/// Coarse run to size the box: 1.5 times the support extent per axis.
fn pilot_box(
    params: &MediumParams,
    mass: f64,
    opts: &ProfileOptions,
) -> Result<Vec<f64>, ProfileError> {
    let dim = params.dim();
    let guess = barenblatt(params.m_bar(), dim, mass).radius;
    let mut half = vec![3.0 * guess; dim];
    for _ in 0..6 {
        let grid = Grid::new(half.clone(), vec![64; dim])?.shared();
        let initial = admissible_field(mass, opts.shape, grid)?;
        let pilot_opts = ProfileOptions {
            tol: Some(1e-4 * mass),
            ..opts.clone()
        };
        let p = settle(params, initial, &pilot_opts)?;
        if p.support.touches_box() {
            half.iter_mut().for_each(|h| *h *= 2.0);
            continue;
        }
        return Ok(p.support.extents().iter().map(|e| 1.5 * e).collect());
    }
    Err(ProfileError::Invalid(
        "pilot run could not contain the support".into(),
    ))
}

/// Average over the reflections `y_i ↦ −y_i`.
pub fn symmetrize(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let mut cur = values.to_vec();
    for a in 0..grid.dim() {
        cur = (0..cur.len())
            .map(|flat| 0.5 * (cur[flat] + cur[grid.reflect(flat, a)]))
            .collect();
    }
    cur
}

/// `‖Σ_i [δ_i²(F^{m_i}) + α σ_i δ_i(y_i F)]‖₁` with centered differences and
/// zero values outside the box.
pub fn stationary_residual(f: &Field, e: &Exponents) -> f64 {
    let (diff, drift_c, _) = operator_parts(f, e);
    let r: Vec<f64> = diff.iter().zip(&drift_c).map(|(a, b)| a + b).collect();
    sum::sum_map(&r, |_, v| v.abs()) * f.grid().cell_volume()
}

/// `L¹` size of the difference between the upwind drift of the stepping
/// scheme and the centered drift, i.e. the first-order numerical diffusion.
pub fn truncation_estimate(f: &Field, e: &Exponents) -> f64 {
    let (_, drift_c, drift_u) = operator_parts(f, e);
    sum::sum_map(&drift_c, |i, v| (v - drift_u[i]).abs()) * f.grid().cell_volume()
}

/// Diffusion part, centered drift and upwind drift of the stationary operator.
fn operator_parts(f: &Field, e: &Exponents) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let g = &**f.grid();
    let v = f.values();
    let n = g.len();
    let mut diff = vec![0.0; n];
    let mut central = vec![0.0; n];
    let mut upwind = vec![0.0; n];
    for a in 0..g.dim() {
        let w: Vec<f64> = v.iter().map(|&x| x.powf(e.m[a])).collect();
        let s = g.strides()[a];
        let h = g.spacing()[a];
        let na = g.cells()[a];
        let kappa = e.a[a];
        for c in 0..n {
            let j = g.axis_index(c, a);
            let (wl, vl, yl) = if j > 0 {
                (w[c - s], v[c - s], g.center(a, j - 1))
            } else {
                (0.0, 0.0, 0.0)
            };
            let (wr, vr, yr) = if j + 1 < na {
                (w[c + s], v[c + s], g.center(a, j + 1))
            } else {
                (0.0, 0.0, 0.0)
            };
            diff[c] += (wr - 2.0 * w[c] + wl) / (h * h);
            central[c] += kappa * (yr * vr - yl * vl) / (2.0 * h);
            let y_left = -g.half_width()[a] + j as f64 * h;
            let y_right = y_left + h;
            let b_left = -kappa * y_left;
            let b_right = -kappa * y_right;
            let f_left = if b_left > 0.0 {
                b_left * vl
            } else {
                b_left * v[c]
            };
            let f_right = if b_right > 0.0 {
                b_right * v[c]
            } else {
                b_right * vr
            };
            upwind[c] -= (f_right - f_left) / h;
        }
    }
    (diff, central, upwind)
}

/// `T_k F(y) = k F(k^{−ν_1} y_1, …, k^{−ν_N} y_N)`, resampled on the same grid.
/// The new mass is `k^β M`.
pub fn rescale_mass(p: &Profile, k: f64) -> Result<Profile, ProfileError> {
    if !(k > 0.0) {
        return Err(ProfileError::Invalid(format!(
            "scaling factor must be positive, got {k}"
        )));
    }
    let e = &p.exponents;
    let factors: Vec<f64> = e.nu.iter().map(|&nu| k.powf(nu)).collect();
    let needed: Vec<f64> = p
        .support
        .extents()
        .iter()
        .zip(&factors)
        .map(|(x, f)| x * f)
        .collect();
    let available = p.grid().half_width().to_vec();
    if needed.iter().zip(&available).any(|(n, a)| n > a) {
        return Err(ProfileError::OutsideBox { needed, available });
    }
    let grid = p.grid().clone();
    let src = &p.field;
    let field = if k == 1.0 {
        src.clone()
    } else {
        let mut z = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                for (a, zi) in z.iter_mut().enumerate() {
                    *zi = grid.center(a, grid.axis_index(flat, a)) / factors[a];
                }
                k * src.interpolate(&z)
            })
            .collect();
        Field::from_parts(grid, values, src.time)
    };
    let scale = k.powf(e.beta);
    let mut out = finish(
        p.params.clone(),
        e.clone(),
        field,
        p.residual * scale,
        p.tol * scale,
        p.history.iter().map(|h| h * scale).collect(),
    );
    out.runtime_seconds = p.runtime_seconds;
    Ok(out)
}

/// `L¹` distance between two profiles on the same grid.
pub fn profile_distance(a: &Profile, b: &Profile) -> Result<f64, ProfileError> {
    Ok(lp_distance(&a.field, &b.field, 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barenblatt_constant_plane() {
        let b = barenblatt(2.0, 2, 1.0);
        let c = (1.0 / (8.0 * PI)).sqrt();
        assert!((b.c - c).abs() < 1e-14);
        assert!((b.radius - 4.0 * c.sqrt()).abs() < 1e-13);
        assert!((b.peak() - c).abs() < 1e-14);
        assert_eq!(b.value(&[b.radius, 0.0]), 0.0);
        assert_eq!(b.value(&[0.0, 1.01 * b.radius]), 0.0);
    }

    #[test]
    fn plateau_radius() {
        let g = Grid::uniform(2, 2.0, 64).unwrap().shared();
        let f = make_admissible(1.0, 1.0, 1.0, g).unwrap();
        assert!((total_mass(&f) - 1.0).abs() < 1e-12);
        let s = SupportSet::of(&f);
        assert!((s.extent(0) - 0.5).abs() < 1e-12);
        let r = ssni_check(&f);
        assert_eq!(r.symmetry_mismatch, 0.0);
        assert_eq!(r.monotonicity_violation, 0.0);
    }

    #[test]
    fn infeasible_triple() {
        let g = Grid::uniform(2, 2.0, 16).unwrap().shared();
        assert!(matches!(
            make_admissible(5.0, 1.0, 1.0, g),
            Err(ProfileError::Infeasible { .. })
        ));
    }

    #[test]
    fn symmetrize_is_projection() {
        let g = Grid::uniform(2, 1.0, 8).unwrap();
        let v: Vec<f64> = (0..64).map(|i| (i * 37 % 11) as f64).collect();
        let s = symmetrize(&g, &v);
        assert_eq!(symmetrize(&g, &s), s);
        assert!((s.iter().sum::<f64>() - v.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn zero_field_residual() {
        let e = derive_exponents(&MediumParams::new(vec![2.0, 3.0]).unwrap());
        let f = Field::zeros(Grid::uniform(2, 1.0, 16).unwrap().shared(), 0.0);
        assert_eq!(stationary_residual(&f, &e), 0.0);
    }
}
