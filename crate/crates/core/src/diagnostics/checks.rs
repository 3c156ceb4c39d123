//! Structural property checks on fields and runs.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::grid::{Field, Grid};
use crate::solver::Solver;
use crate::sum;
use crate::support::SupportSet;

/// Symmetry and axis monotonicity of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsniReport {
    pub peak: f64,
    /// `max |f(y) − f(R_i y)|` over the coordinate reflections `R_i`.
    pub symmetry_mismatch: f64,
    /// Largest increase when stepping outward along an axis away from `y_i = 0`.
    pub monotonicity_violation: f64,
}

impl SsniReport {
    /// Both defects at most `rel · peak + abs`.
    pub fn passes(&self, rel: f64, abs: f64) -> bool {
        let tol = rel * self.peak + abs;
        self.symmetry_mismatch <= tol && self.monotonicity_violation <= tol
    }
}

pub fn ssni_check(f: &Field) -> SsniReport {
    let g = &**f.grid();
    let v = f.values();
    let mut sym = 0.0f64;
    let mut mono = 0.0f64;
    for a in 0..g.dim() {
        let half = g.cells()[a] / 2;
        for c in 0..v.len() {
            sym = sym.max((v[c] - v[g.reflect(c, a)]).abs());
            if let Some(out) = outward(g, c, a, half) {
                mono = mono.max(v[out] - v[c]);
            }
        }
    }
    SsniReport {
        peak: f.max(),
        symmetry_mismatch: sym,
        monotonicity_violation: mono,
    }
}

/// Neighbour of `c` one cell further from `y_a = 0`, if inside the grid.
fn outward(g: &Grid, c: usize, a: usize, half: usize) -> Option<usize> {
    let j = g.axis_index(c, a);
    let s = g.strides()[a];
    if j >= half {
        (j + 1 < g.cells()[a]).then(|| c + s)
    } else {
        (j > 0).then(|| c - s)
    }
}

/// Monotonicity outside a box `Q(a)` containing the initial support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialMonotonicityReport {
    pub peak: f64,
    /// Largest outward increase along an axis among cells with `|y_i| > a_i`.
    pub axis_violation: f64,
    /// Largest outward increase along lattice directions into the corner cones.
    pub cone_violation: f64,
}

impl PartialMonotonicityReport {
    pub fn passes(&self, rel: f64, abs: f64) -> bool {
        let tol = rel * self.peak + abs;
        self.axis_violation <= tol && self.cone_violation <= tol
    }
}

/// Axis monotonicity in `{|y_i| > a_i}` and monotonicity along every outward
/// lattice direction in the corner regions `{|y_j| > a_j for all j}`.
/// Cells inside `Q(a)` are never inspected.
pub fn partial_monotonicity_check(
    f: &Field,
    a: &[f64],
) -> Result<PartialMonotonicityReport, DiagnosticsError> {
    let g = &**f.grid();
    let dim = g.dim();
    if a.len() != dim {
        return Err(DiagnosticsError::Invalid(format!(
            "box has {} half-widths for a {dim}-dimensional field",
            a.len()
        )));
    }
    let v = f.values();
    let mut axis = 0.0f64;
    let mut cone = 0.0f64;
    let mut y = vec![0.0; dim];
    for c in 0..v.len() {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = g.center(i, g.axis_index(c, i));
        }
        let outside: Vec<bool> = (0..dim).map(|i| y[i].abs() > a[i]).collect();
        for i in 0..dim {
            if outside[i] {
                if let Some(n) = step_out(g, c, &y, 1 << i) {
                    axis = axis.max(v[n] - v[c]);
                }
            }
        }
        if outside.iter().all(|&o| o) {
            for subset in 1..(1usize << dim) {
                if let Some(n) = step_out(g, c, &y, subset) {
                    cone = cone.max(v[n] - v[c]);
                }
            }
        }
    }
    Ok(PartialMonotonicityReport {
        peak: f.max(),
        axis_violation: axis.max(0.0),
        cone_violation: cone.max(0.0),
    })
}

/// Steps away from the origin along every axis in the bit set `axes`.
fn step_out(g: &Grid, c: usize, y: &[f64], axes: usize) -> Option<usize> {
    let mut n = c;
    for (i, &yi) in y.iter().enumerate() {
        if axes & (1 << i) == 0 {
            continue;
        }
        let j = g.axis_index(c, i);
        let s = g.strides()[i];
        if yi > 0.0 {
            if j + 1 >= g.cells()[i] {
                return None;
            }
            n += s;
        } else {
            if j == 0 {
                return None;
            }
            n -= s;
        }
    }
    Some(n)
}

/// Offset `K = R + L^{m−1} / (c A)`, `c = (m − 1)/m`, of the travelling wave
/// that dominates data bounded by `height` and supported in `|x_i| ≤ radius`.
pub fn travelling_wave_offset(m: f64, height: f64, speed: f64, radius: f64) -> f64 {
    let c = (m - 1.0) / m;
    radius + height.powf(m - 1.0) / (c * speed)
}

/// Travelling wave `U(x, t) = (c A (A t + K − x))_+^{1/(m−1)}` along one axis.
pub fn travelling_wave(m: f64, speed: f64, offset: f64, x: f64, t: f64) -> f64 {
    let c = (m - 1.0) / m;
    let s = c * speed * (speed * t + offset - x);
    if s <= 0.0 {
        0.0
    } else {
        s.powf(1.0 / (m - 1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSample {
    pub time: f64,
    /// Largest cell center of the support mask along the axis.
    pub front: f64,
    /// Barrier position `K + A t`.
    pub barrier: f64,
    /// Mass in cells whose center lies at or beyond the barrier.
    pub mass_beyond: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    pub axis: usize,
    pub speed: f64,
    pub offset: f64,
    pub samples: Vec<BarrierSample>,
    pub passed: bool,
}

/// Checks that no support cell has its center at `x_axis ≥ K + A t`, with `K`
/// from [`travelling_wave_offset`]. `height` and `radius` bound the initial data.
pub fn barrier_check(
    fields: &[Field],
    axis: usize,
    m: f64,
    height: f64,
    radius: f64,
    speed: f64,
) -> Result<BarrierReport, DiagnosticsError> {
    if !(speed > 0.0 && m > 1.0) {
        return Err(DiagnosticsError::Invalid(format!(
            "barrier needs speed > 0 and m > 1 (got {speed}, {m})"
        )));
    }
    let offset = travelling_wave_offset(m, height, speed, radius);
    let mut samples = Vec::with_capacity(fields.len());
    for f in fields {
        let g = f.grid();
        if axis >= g.dim() {
            return Err(DiagnosticsError::Invalid(format!(
                "axis {axis} out of range"
            )));
        }
        let barrier = offset + speed * f.time;
        let mask = SupportSet::of(f);
        let mut front = f64::NEG_INFINITY;
        for (c, &inside) in mask.mask().iter().enumerate() {
            if inside {
                front = front.max(g.center(axis, g.axis_index(c, axis)));
            }
        }
        let beyond = sum::sum_map(f.values(), |c, v| {
            if g.center(axis, g.axis_index(c, axis)) >= barrier {
                v
            } else {
                0.0
            }
        }) * g.cell_volume();
        samples.push(BarrierSample {
            time: f.time,
            front,
            barrier,
            mass_beyond: beyond,
        });
    }
    let passed = samples.iter().all(|s| s.front < s.barrier);
    Ok(BarrierReport {
        axis,
        speed,
        offset,
        samples,
        passed,
    })
}

/// Empirical lower bound of a rescaled solution on a small box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// `min v` over the box and over checkpoints with `τ ≥ τ₁`.
    pub c: f64,
    pub r0: f64,
    pub tau1: f64,
    pub checkpoints: usize,
    pub passed: bool,
}

/// Lower bound of rescaled fields on `Q_{r0}` for `τ ≥ tau1`. With `shift =
/// Some(x0)` the box follows the image `x0_i e^{−a_i τ}` of the symmetry center.
pub fn positivity_floor_check(
    fields: &[Field],
    a: &[f64],
    r0: f64,
    tau1: f64,
    shift: Option<&[f64]>,
) -> Result<PositivityReport, DiagnosticsError> {
    let mut c = f64::INFINITY;
    let mut used = 0;
    for f in fields.iter().filter(|f| f.time >= tau1) {
        let g = f.grid();
        if f.max() == 0.0 {
            return Err(DiagnosticsError::Invalid(
                "zero data has no positivity floor".into(),
            ));
        }
        let center: Vec<f64> = match shift {
            Some(x0) => x0
                .iter()
                .zip(a)
                .map(|(x, ai)| x * (-ai * f.time).exp())
                .collect(),
            None => vec![0.0; g.dim()],
        };
        let mut found = false;
        for (cell, &v) in f.values().iter().enumerate() {
            let inside =
                (0..g.dim()).all(|i| (g.center(i, g.axis_index(cell, i)) - center[i]).abs() <= r0);
            if inside {
                found = true;
                c = c.min(v);
            }
        }
        if !found {
            return Err(DiagnosticsError::Invalid(format!(
                "box of radius {r0} holds no cell centers"
            )));
        }
        used += 1;
    }
    if used == 0 {
        return Err(DiagnosticsError::Invalid(format!(
            "no checkpoint at or after tau = {tau1}"
        )));
    }
    Ok(PositivityReport {
        c,
        r0,
        tau1,
        checkpoints: used,
        passed: c > 0.0,
    })
}

/// Dissipation against energy drop per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `Σ_steps dt · ‖δ_i u^{m_i}‖²` with trapezoidal weights.
    pub dissipated: Vec<f64>,
    /// `E_i(u_0) − E_i(u(T))`, `E_i(u) = ∫ u^{m_i+1}/(m_i+1)`.
    pub drop: Vec<f64>,
    pub steps: usize,
}

impl EnergyReport {
    /// `dissipated_i ≤ (1 + slack) · drop_i` on every axis.
    pub fn passes(&self, slack: f64) -> bool {
        self.dissipated
            .iter()
            .zip(&self.drop)
            .all(|(d, e)| *d <= (1.0 + slack) * e)
    }
}

pub fn energy_functional(f: &Field, m: f64) -> f64 {
    sum::sum_map(f.values(), |_, v| v.powf(m + 1.0) / (m + 1.0)) * f.grid().cell_volume()
}

/// `Σ_faces ((w_{j+1} − w_j)/h)² · vol` along `axis`, `w = u^m`, zero outside.
pub fn face_dissipation(f: &Field, axis: usize, m: f64) -> f64 {
    let g = &**f.grid();
    let v = f.values();
    let s = g.strides()[axis];
    let n = g.cells()[axis];
    let h = g.spacing()[axis];
    let terms = sum::sum_map(v, |c, x| {
        let w = x.powf(m);
        let j = g.axis_index(c, axis);
        let right = if j + 1 < n { v[c + s].powf(m) } else { 0.0 };
        let mut t = (right - w).powi(2);
        if j == 0 {
            t += w * w;
        }
        t
    });
    terms / (h * h) * g.cell_volume()
}

/// Runs the physical solver to `t_end` and accumulates the discrete energy
/// balance of every axis.
pub fn energy_check(
    u0: &Field,
    solver: &Solver,
    t_end: f64,
) -> Result<EnergyReport, DiagnosticsError> {
    if solver.config().epsilon != 0.0 {
        return Err(DiagnosticsError::Invalid(
            "energy balance needs epsilon = 0".into(),
        ));
    }
    let m = solver.params().m().to_vec();
    let dim = m.len();
    let e0: Vec<f64> = m.iter().map(|&mi| energy_functional(u0, mi)).collect();
    let mut dissipated = vec![0.0; dim];
    let mut rate: Vec<f64> = (0..dim).map(|i| face_dissipation(u0, i, m[i])).collect();
    let mut u = u0.clone();
    let mut steps = 0;
    while u.time < t_end {
        let dt = solver.stable_dt(&u).min(t_end - u.time);
        let (next, _) = solver.step(&u, dt)?;
        u = next;
        for i in 0..dim {
            let r = face_dissipation(&u, i, m[i]);
            dissipated[i] += 0.5 * dt * (rate[i] + r);
            rate[i] = r;
        }
        steps += 1;
    }
    let drop = m
        .iter()
        .zip(&e0)
        .map(|(&mi, e)| e - energy_functional(&u, mi))
        .collect();
    Ok(EnergyReport {
        dissipated,
        drop,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::MediumParams;
    use crate::grid::{box_average, Grid};
    use crate::solver::SolverConfig;

    fn plateau(center: &[f64]) -> Field {
        let g = Grid::uniform(2, 2.0, 32).unwrap().shared();
        box_average(g, center, &[0.5, 0.5], 1.0)
    }

    #[test]
    fn plateau_is_ssni() {
        let r = ssni_check(&plateau(&[0.0, 0.0]));
        assert_eq!(r.symmetry_mismatch, 0.0);
        assert_eq!(r.monotonicity_violation, 0.0);
        assert!(r.passes(0.0, 0.0));
    }

    #[test]
    fn shifted_plateau_fails() {
        let r = ssni_check(&plateau(&[0.6, 0.0]));
        assert!(r.symmetry_mismatch > 0.5);
        assert!(r.monotonicity_violation > 0.5);
        assert!(!r.passes(1e-9, 0.0));
    }

    #[test]
    fn violation_inside_box_is_ignored() {
        let mut f = plateau(&[0.0, 0.0]);
        let g = f.grid().clone();
        let c = g.locate(&[0.1, 0.1]).unwrap();
        f.values_mut()[c] = 5.0;
        let r = partial_monotonicity_check(&f, &[0.5, 0.5]).unwrap();
        assert_eq!(r.axis_violation, 0.0);
        assert_eq!(r.cone_violation, 0.0);
        let outside = g.locate(&[1.2, 0.1]).unwrap();
        f.values_mut()[outside] = 0.5;
        let r = partial_monotonicity_check(&f, &[0.5, 0.5]).unwrap();
        assert!(r.axis_violation > 0.4);
    }

    #[test]
    fn offset_matches_closed_form() {
        assert!((travelling_wave_offset(2.0, 1.0, 1.0, 1.0) - 3.0).abs() < 1e-15);
        assert_eq!(travelling_wave(2.0, 1.0, 3.0, 4.0, 1.0), 0.0);
        assert!(travelling_wave(2.0, 1.0, 3.0, 3.9, 1.0) > 0.0);
    }

    #[test]
    fn zero_data_passes_barrier() {
        let g = Grid::uniform(2, 2.0, 16).unwrap().shared();
        let z = Field::zeros(g, 0.5);
        let r = barrier_check(&[z], 0, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.samples[0].mass_beyond, 0.0);
    }

    #[test]
    fn energy_balance_short_run() {
        let p = MediumParams::new(vec![2.0, 3.0]).unwrap();
        let s = Solver::new(p, SolverConfig::default()).unwrap();
        let g = Grid::uniform(2, 2.0, 32).unwrap().shared();
        let u0 = box_average(g, &[0.0, 0.0], &[0.5, 0.3], 1.0);
        let r = energy_check(&u0, &s, 0.05).unwrap();
        assert!(r.passes(0.05), "{r:?}");
        assert!(r.drop.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn positivity_needs_data() {
        let g = Grid::uniform(2, 2.0, 16).unwrap().shared();
        let z = Field::zeros(g, 1.0);
        assert!(positivity_floor_check(&[z], &[0.25, 0.25], 0.2, 0.0, None).is_err());
    }
}
