//! Positivity sets, free boundaries and their geometry.
//!
//! A support set is the mask of cells whose value exceeds a small threshold.
//! Distances are measured between cell centers, so sets on different grids
//! can be compared directly.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Field, Grid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupportError {
    #[error("support set is empty")]
    Empty,
    #[error("mask is not star-shaped around the origin along {} ray(s): {rays:?}", rays.len())]
    NotStarShaped { rays: Vec<usize> },
    #[error("support sets live on grids of different dimension")]
    DimensionMismatch,
}

/// Cells with value above `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    grid: Arc<Grid>,
    mask: Vec<bool>,
    pub threshold: f64,
}

/// Default cutoff `max(1e-10, 1e-6 · peak)`.
pub fn default_threshold(f: &Field) -> f64 {
    (1e-6 * f.max()).max(1e-10)
}

/// Positivity set of `f` above `threshold`.
pub fn extract_support(f: &Field, threshold: f64) -> SupportSet {
    SupportSet {
        grid: f.grid().clone(),
        mask: f.values().iter().map(|&v| v > threshold).collect(),
        threshold,
    }
}

impl SupportSet {
    /// Positivity set with the default relative threshold.
    pub fn of(f: &Field) -> Self {
        extract_support(f, default_threshold(f))
    }

    pub fn from_mask(grid: Arc<Grid>, mask: Vec<bool>) -> Self {
        assert_eq!(grid.len(), mask.len());
        Self {
            grid,
            mask,
            threshold: 0.0,
        }
    }

    /// Mask of all cells whose center satisfies `pred`.
    pub fn from_predicate(grid: Arc<Grid>, pred: impl Fn(&[f64]) -> bool) -> Self {
        let mask = (0..grid.len())
            .map(|flat| pred(&grid.point(flat)))
            .collect();
        Self::from_mask(grid, mask)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.grid.cell_volume()
    }

    /// True when the cell containing `point` belongs to the set.
    pub fn contains(&self, point: &[f64]) -> bool {
        self.grid.locate(point).is_some_and(|flat| self.mask[flat])
    }

    /// Outer extent `max |x_i| + h_i/2` over the set along `axis` (0 when empty).
    pub fn extent(&self, axis: usize) -> f64 {
        let h = self.grid.spacing()[axis];
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(flat, _)| {
                self.grid
                    .center(axis, self.grid.axis_index(flat, axis))
                    .abs()
                    + h / 2.0
            })
            .fold(0.0, f64::max)
    }

    pub fn extents(&self) -> Vec<f64> {
        (0..self.grid.dim()).map(|a| self.extent(a)).collect()
    }

    /// True when some cell of the set touches the outer boundary of the grid.
    pub fn touches_box(&self) -> bool {
        self.mask
            .iter()
            .enumerate()
            .any(|(flat, &b)| b && self.grid.is_boundary_cell(flat))
    }

    fn is_edge_cell(&self, flat: usize) -> bool {
        if !self.mask[flat] {
            return false;
        }
        let g = &*self.grid;
        (0..g.dim()).any(|a| {
            let j = g.axis_index(flat, a);
            let s = g.strides()[a];
            j == 0 || j + 1 == g.cells()[a] || !self.mask[flat - s] || !self.mask[flat + s]
        })
    }

    /// Free boundary: cells of the set with a face neighbour outside it.
    pub fn boundary(&self) -> SupportSet {
        let mask = (0..self.mask.len()).map(|f| self.is_edge_cell(f)).collect();
        SupportSet {
            grid: self.grid.clone(),
            mask,
            threshold: self.threshold,
        }
    }

    /// Number of cells of `self` missing from `other` (same grid).
    pub fn excess_over(&self, other: &SupportSet) -> usize {
        self.mask
            .iter()
            .zip(&other.mask)
            .filter(|(&a, &b)| a && !b)
            .count()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.excess_over(other) == 0
    }

    /// Set of cells whose center `y` satisfies `preimage(y) ∈ self`.
    pub fn pull_back(&self, preimage: impl Fn(&[f64], &mut [f64]) + Sync) -> SupportSet {
        let g = &*self.grid;
        let mask = (0..g.len())
            .into_par_iter()
            .map(|flat| {
                let y = g.point(flat);
                let mut z = vec![0.0; y.len()];
                preimage(&y, &mut z);
                self.contains(&z)
            })
            .collect();
        SupportSet {
            grid: self.grid.clone(),
            mask,
            threshold: self.threshold,
        }
    }

    /// Cells that are in the set, as a 0/1 field.
    pub fn to_field(&self) -> Field {
        let values = self
            .mask
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        Field::new(self.grid.clone(), values, 0.0).expect("indicator is nonnegative")
    }

    /// Cells lying in the box `Π [−half_i, half_i]` enlarged by `slack_cells`
    /// cell widths on each side.
    pub fn within_box(&self, half: &[f64], slack_cells: f64) -> bool {
        let g = &*self.grid;
        self.mask.iter().enumerate().all(|(flat, &b)| {
            !b || (0..g.dim()).all(|a| {
                let x = g.center(a, g.axis_index(flat, a)).abs();
                x <= half[a] + slack_cells * g.spacing()[a]
            })
        })
    }
}

/// `E_λ`: points `y` with `y/λ` in the set.
pub fn expand_linear(s: &SupportSet, lambda: f64) -> SupportSet {
    s.pull_back(|y, z| {
        for (zi, yi) in z.iter_mut().zip(y) {
            *zi = yi / lambda;
        }
    })
}

/// `S⁽¹⁾_k`: image under `z_i = k^{ν_i} y_i`.
pub fn scale_mass_set(s: &SupportSet, k: f64, nu: &[f64]) -> SupportSet {
    let f: Vec<f64> = nu.iter().map(|&n| k.powf(n)).collect();
    s.pull_back(|y, z| {
        for i in 0..y.len() {
            z[i] = y[i] / f[i];
        }
    })
}

/// `S⁽²⁾_t`: image under `x_i = t^{a_i} y_i`.
pub fn scale_time_set(s: &SupportSet, t: f64, a: &[f64]) -> SupportSet {
    scale_mass_set(s, t, a)
}

/// Outcome of the two-sided inclusion `E_{1+c₁ε}(S) ⊆ Φ_{1+ε}(S) ⊆ E_{1+c₂ε}(S)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
    /// Cells of the inner expansion missing from the anisotropic image.
    pub lower_violations: usize,
    /// Cells of the anisotropic image missing from the outer expansion.
    pub upper_violations: usize,
    /// `c₁ < min rate` and `max rate < c₂`.
    pub constants_admissible: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.constants_admissible && self.lower_violations == 0 && self.upper_violations == 0
    }
}

/// Checks the set equivalence between linear expansions and the anisotropic
/// scaling with exponents `rates` (`ν_i` for mass changes, `a_i` for time).
pub fn sandwich_constants(
    s: &SupportSet,
    epsilon: f64,
    rates: &[f64],
    c1: f64,
    c2: f64,
) -> SandwichReport {
    let lo = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inner = expand_linear(s, 1.0 + c1 * epsilon);
    let middle = scale_mass_set(s, 1.0 + epsilon, rates);
    let outer = expand_linear(s, 1.0 + c2 * epsilon);
    SandwichReport {
        epsilon,
        c1,
        c2,
        lower_violations: inner.excess_over(&middle),
        upper_violations: middle.excess_over(&outer),
        constants_admissible: c1 < lo && hi < c2,
    }
}

/// Growth of support extents against the box `Π_i [−c_i t^{a_i}, c_i t^{a_i}]`
/// with `c_i` fitted on the first field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxBoundReport {
    pub c: Vec<f64>,
    pub times: Vec<f64>,
    /// `extent_i(t) − c_i t^{a_i}` per later field and axis, in cells.
    pub excess_cells: Vec<Vec<f64>>,
}

impl BoxBoundReport {
    /// Every excess at most `cells` grid cells.
    pub fn holds_within(&self, cells: f64) -> bool {
        self.excess_cells.iter().flatten().all(|&e| e <= cells)
    }
}

/// Fits `c_i = extent_i(t_1) / t_1^{a_i}` on `fields[0]` and measures how far
/// the later supports reach past the scaled box.
pub fn box_bound_check(fields: &[Field], a: &[f64]) -> Result<BoxBoundReport, SupportError> {
    let first = fields.first().ok_or(SupportError::Empty)?;
    let s0 = SupportSet::of(first);
    if s0.is_empty() || first.time <= 0.0 {
        return Err(SupportError::Empty);
    }
    let c: Vec<f64> = s0
        .extents()
        .iter()
        .zip(a)
        .map(|(e, ai)| e / first.time.powf(*ai))
        .collect();
    let mut times = Vec::new();
    let mut excess_cells = Vec::new();
    for f in &fields[1..] {
        let ext = SupportSet::of(f).extents();
        let h = f.grid().spacing();
        excess_cells.push(
            (0..ext.len())
                .map(|i| (ext[i] - c[i] * f.time.powf(a[i])) / h[i])
                .collect(),
        );
        times.push(f.time);
    }
    Ok(BoxBoundReport {
        c,
        times,
        excess_cells,
    })
}

/// Sub-cell support half-widths along each axis.
///
/// On every grid line the pressure `p = u^{m_i − 1}` is followed outward to
/// where it crosses 1% of its peak (linear interpolation between the last cell
/// above that level and its outer neighbour); from there the local pressure
/// slope is extrapolated to `p = 0`, at most four cells further. The
/// numerical precursor of exponentially small values ahead of the front never
/// enters the estimate, so the result moves continuously in time.
pub fn front_extents(f: &Field, m: &[f64]) -> Vec<f64> {
    let g = &**f.grid();
    let v = f.values();
    (0..g.dim())
        .map(|a| {
            let s = g.strides()[a];
            let n = g.cells()[a];
            let h = g.spacing()[a];
            let p: Vec<f64> = v.iter().map(|&u| u.powf(m[a] - 1.0)).collect();
            let level = 0.01 * p.iter().cloned().fold(0.0, f64::max);
            if level == 0.0 {
                return 0.0;
            }
            let mut reach = 0.0f64;
            for (c, &pc) in p.iter().enumerate() {
                if pc < level {
                    continue;
                }
                let j = g.axis_index(c, a);
                let x = g.center(a, j);
                let (outer, inner) = if x > 0.0 {
                    ((j + 1 < n).then(|| c + s), (j > 0).then(|| c - s))
                } else {
                    ((j > 0).then(|| c - s), (j + 1 < n).then(|| c + s))
                };
                let po = outer.map_or(0.0, |o| p[o]);
                if po >= level {
                    continue;
                }
                let crossing = h * (pc - level) / (pc - po);
                let d = match inner {
                    Some(k) if p[k] > pc => crossing + (h * level / (p[k] - pc)).min(4.0 * h),
                    _ => h / 2.0,
                };
                reach = reach.max(x.abs() + d);
            }
            reach
        })
        .collect()
}

/// Symmetric Hausdorff distance between two sets, measured between cell centers.
pub fn hausdorff(a: &SupportSet, b: &SupportSet) -> Result<f64, SupportError> {
    if a.grid.dim() != b.grid.dim() {
        return Err(SupportError::DimensionMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(SupportError::Empty);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// `sup_{x ∈ A} dist(x, B)`. Points of `A` outside `B` are closest to an edge
/// cell of `B`, so only those are scanned.
pub fn directed(a: &SupportSet, b: &SupportSet) -> f64 {
    let edge: Vec<Vec<f64>> = b
        .boundary()
        .mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(flat, _)| b.grid.point(flat))
        .collect();
    let ga = &*a.grid;
    let outside: Vec<usize> = (0..ga.len())
        .filter(|&flat| a.mask[flat] && !b.contains(&ga.point(flat)))
        .collect();
    outside
        .par_iter()
        .map(|&flat| {
            let p = ga.point(flat);
            edge.iter()
                .map(|q| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .reduce(|| 0.0, f64::max)
}

/// Directional radius `R(e)` of a star-shaped set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusFn {
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
}

impl RadiusFn {
    /// Angles describing each direction: `θ` in 2D, `(θ, φ)` in 3D, `0`/`π` in 1D.
    pub fn angles(&self, index: usize) -> Vec<f64> {
        let e = &self.directions[index];
        match e.len() {
            1 => vec![if e[0] > 0.0 {
                0.0
            } else {
                std::f64::consts::PI
            }],
            2 => vec![e[1].atan2(e[0])],
            _ => vec![e[1].atan2(e[0]), e[2].clamp(-1.0, 1.0).acos()],
        }
    }

    pub fn max_spread(&self) -> f64 {
        let lo = self.radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.radii.iter().cloned().fold(0.0, f64::max);
        hi - lo
    }

    /// Radius along the direction closest to `e`.
    pub fn along(&self, e: &[f64]) -> f64 {
        let best = self
            .directions
            .iter()
            .enumerate()
            .max_by(|(_, d1), (_, d2)| dot(d1, e).total_cmp(&dot(d2, e)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.radii[best]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Default ray set: ±e₁ in 1D, 360 uniform angles in 2D, the 26 lattice
/// directions of the unit cube in 3D.
pub fn default_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => uniform_directions_2d(360),
        _ => {
            let mut out = Vec::new();
            for i in -1i32..=1 {
                for j in -1i32..=1 {
                    for k in -1i32..=1 {
                        if i == 0 && j == 0 && k == 0 {
                            continue;
                        }
                        let v = [i as f64, j as f64, k as f64];
                        let n = dot(&v, &v).sqrt();
                        out.push(v.iter().map(|x| x / n).collect());
                    }
                }
            }
            out
        }
    }
}

pub fn uniform_directions_2d(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            vec![th.cos(), th.sin()]
        })
        .collect()
}

/// `R(e)` with the default ray set.
pub fn radius_function(s: &SupportSet) -> Result<RadiusFn, SupportError> {
    radius_function_along(s, default_directions(s.grid.dim()))
}

/// `R(e)` = largest `r` whose point `r e` lies in a cell of the set, found by
/// marching at half the smallest spacing and refining the last crossing by
/// bisection. Each ray may contain at most one stray cell past its first exit.
pub fn radius_function_along(
    s: &SupportSet,
    directions: Vec<Vec<f64>>,
) -> Result<RadiusFn, SupportError> {
    if s.is_empty() {
        return Err(SupportError::Empty);
    }
    let g = &*s.grid;
    let step = g.min_spacing() / 2.0;
    let reach = g.half_width().iter().map(|l| l * l).sum::<f64>().sqrt();
    let samples = (reach / step).ceil() as usize + 2;
    let at = |e: &[f64], r: f64| -> Option<usize> {
        let p: Vec<f64> = e.iter().map(|x| x * r).collect();
        g.locate(&p)
    };
    let inside = |e: &[f64], r: f64| at(e, r).is_some_and(|f| s.mask[f]);
    let mut bad = Vec::new();
    let mut radii = Vec::with_capacity(directions.len());
    for (ray, e) in directions.iter().enumerate() {
        let mut exited = false;
        let mut strays: Vec<usize> = Vec::new();
        let mut last_in: Option<usize> = None;
        for k in 0..samples {
            let r = k as f64 * step;
            let Some(cell) = at(e, r) else { break };
            if s.mask[cell] {
                if exited && !strays.contains(&cell) {
                    strays.push(cell);
                }
                last_in = Some(k);
            } else {
                exited = true;
            }
        }
        if strays.len() > 1 || (last_in.is_none() && !strays.is_empty()) {
            bad.push(ray);
            radii.push(0.0);
            continue;
        }
        let Some(k) = last_in else {
            radii.push(0.0);
            continue;
        };
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(e, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        radii.push(lo);
    }
    if !bad.is_empty() {
        return Err(SupportError::NotStarShaped { rays: bad });
    }
    Ok(RadiusFn { directions, radii })
}
