//! Cell-centered tensor-product meshes on symmetric boxes `Π [−L_i, L_i]`
//! and the nonnegative density fields sampled on them.

use std::sync::Arc;

use thiserror::Error;

use crate::sum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least one axis")]
    NoAxes,
    #[error("half_width and cells have different lengths ({0} vs {1})")]
    AxisMismatch(usize, usize),
    #[error("half width on axis {axis} must be positive and finite, got {value}")]
    BadHalfWidth { axis: usize, value: f64 },
    #[error("cell count on axis {axis} must be even and at least 8, got {value}")]
    BadCellCount { axis: usize, value: usize },
    #[error("field has {got} values but the grid has {expected} cells")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value at cell {index} is negative or not finite: {value}")]
    BadValue { index: usize, value: f64 },
    #[error("Lp norm needs p >= 1, got {0}")]
    BadExponent(f64),
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Geometry only: box half-widths, cell counts and spacings. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: Vec<f64>,
    cells: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(half_width: Vec<f64>, cells: Vec<usize>) -> Result<Self, GridError> {
        if half_width.is_empty() {
            return Err(GridError::NoAxes);
        }
        if half_width.len() != cells.len() {
            return Err(GridError::AxisMismatch(half_width.len(), cells.len()));
        }
        for (axis, &value) in half_width.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GridError::BadHalfWidth { axis, value });
            }
        }
        for (axis, &value) in cells.iter().enumerate() {
            if value < 8 || value % 2 != 0 {
                return Err(GridError::BadCellCount { axis, value });
            }
        }
        let spacing = half_width
            .iter()
            .zip(&cells)
            .map(|(&l, &n)| 2.0 * l / n as f64)
            .collect();
        let mut strides = vec![1; cells.len()];
        for a in (0..cells.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * cells[a + 1];
        }
        Ok(Self {
            half_width,
            cells,
            spacing,
            strides,
        })
    }

    /// Same half-width and cell count on every axis.
    pub fn uniform(dim: usize, half_width: f64, cells: usize) -> Result<Self, GridError> {
        Self::new(vec![half_width; dim], vec![cells; dim])
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn half_width(&self) -> &[f64] {
        &self.half_width
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Coordinate of the center of cell `j` along `axis`.
    #[inline]
    pub fn center(&self, axis: usize, j: usize) -> f64 {
        -self.half_width[axis] + (j as f64 + 0.5) * self.spacing[axis]
    }

    /// Cell-center coordinates along one axis.
    pub fn centers(&self, axis: usize) -> Vec<f64> {
        (0..self.cells[axis])
            .map(|j| self.center(axis, j))
            .collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in 0..self.dim() {
            out[a] = flat / self.strides[a];
            flat %= self.strides[a];
        }
        out
    }

    /// Index of `axis` for a flat cell index.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.cells[axis]
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.center(a, self.axis_index(flat, a)))
            .collect()
    }

    /// Cell index containing `x` along `axis`, or `None` outside the box.
    #[inline]
    pub fn locate_axis(&self, axis: usize, x: f64) -> Option<usize> {
        let s = (x + self.half_width[axis]) / self.spacing[axis];
        if s < 0.0 || !s.is_finite() {
            return None;
        }
        let j = s.floor() as usize;
        (j < self.cells[axis]).then_some(j)
    }

    /// Flat index of the cell containing `point`, or `None` outside the box.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        let mut flat = 0;
        for (a, &x) in point.iter().enumerate() {
            flat += self.locate_axis(a, x)? * self.strides[a];
        }
        Some(flat)
    }

    /// Index of the cell mirrored across the hyperplane `x_axis = 0`.
    #[inline]
    pub fn reflect(&self, flat: usize, axis: usize) -> usize {
        let j = self.axis_index(flat, axis);
        let r = self.cells[axis] - 1 - j;
        flat - j * self.strides[axis] + r * self.strides[axis]
    }

    /// True when the cell touches the outer boundary of the box.
    pub fn is_boundary_cell(&self, flat: usize) -> bool {
        (0..self.dim()).any(|a| {
            let j = self.axis_index(flat, a);
            j == 0 || j + 1 == self.cells[a]
        })
    }
}

/// Nonnegative density on a grid at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, time: f64) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(GridError::BadValue { index, value });
        }
        Ok(Self { grid, values, time })
    }

    /// Skips the nonnegativity scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, time }
    }

    pub fn zeros(grid: Arc<Grid>, time: f64) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![0.0; n], time)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Mutable access; negative values written here are clamped by [`Field::clamp`].
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Replaces negative entries by zero and returns the mass that was added.
    pub fn clamp(&mut self) -> f64 {
        let vol = self.grid.cell_volume();
        let mut added = 0.0;
        for v in &mut self.values {
            if *v < 0.0 || v.is_nan() {
                if v.is_finite() {
                    added -= *v * vol;
                }
                *v = 0.0;
            }
        }
        added
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn total_mass(&self) -> f64 {
        total_mass(self)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Multiplies every value by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Field {
        Field::from_parts(
            self.grid.clone(),
            self.values.iter().map(|v| v * c).collect(),
            self.time,
        )
    }

    /// Multilinear interpolation between cell centers. Values beyond the
    /// outermost centers blend toward zero ghost cells; outside the box the
    /// result is zero.
    pub fn interpolate(&self, point: &[f64]) -> f64 {
        let g = &*self.grid;
        let dim = g.dim();
        let mut lo = vec![0i64; dim];
        let mut frac = vec![0.0; dim];
        for a in 0..dim {
            let s = (point[a] + g.half_width[a]) / g.spacing[a] - 0.5;
            if !(s > -1.0 && s < g.cells[a] as f64) {
                return 0.0;
            }
            let f = s.floor();
            lo[a] = f as i64;
            frac[a] = s - f;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            let mut inside = true;
            for a in 0..dim {
                let up = (corner >> a) & 1 == 1;
                let j = lo[a] + up as i64;
                weight *= if up { frac[a] } else { 1.0 - frac[a] };
                if j < 0 || j >= g.cells[a] as i64 {
                    inside = false;
                    break;
                }
                flat += j as usize * g.strides[a];
            }
            if inside && weight != 0.0 {
                acc += weight * self.values[flat];
            }
        }
        acc
    }
}

/// `Σ value · cell volume`.
pub fn total_mass(f: &Field) -> f64 {
    sum::sum_map(&f.values, |_, v| v) * f.grid.cell_volume()
}

/// Discrete `L^p` norm with cell-volume weights; `p = ∞` is the max value.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64, GridError> {
    norm_of(&f.values, f.grid.cell_volume(), p)
}

pub(crate) fn norm_of(values: &[f64], vol: f64, p: f64) -> Result<f64, GridError> {
    if p.is_nan() || p < 1.0 {
        return Err(GridError::BadExponent(p));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let s = if p == 1.0 {
        sum::sum_map(values, |_, v| v.abs())
    } else if p == 2.0 {
        sum::sum_map(values, |_, v| v * v)
    } else {
        sum::sum_map(values, |_, v| v.abs().powf(p))
    };
    Ok((s * vol).powf(1.0 / p))
}

/// `‖f − g‖_p` over the whole grid.
pub fn lp_distance(f: &Field, g: &Field, p: f64) -> Result<f64, GridError> {
    if !f.same_grid(g) {
        return Err(GridError::GridMismatch);
    }
    let diff: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a - b).collect();
    norm_of(&diff, f.grid.cell_volume(), p)
}

/// `‖f − g‖_p` restricted to the cells where `region` is true.
pub fn lp_distance_on(f: &Field, g: &Field, p: f64, region: &[bool]) -> Result<f64, GridError> {
    if !f.same_grid(g) {
        return Err(GridError::GridMismatch);
    }
    let diff: Vec<f64> = f
        .values
        .iter()
        .zip(&g.values)
        .zip(region)
        .map(|((a, b), &r)| if r { a - b } else { 0.0 })
        .collect();
    norm_of(&diff, f.grid.cell_volume(), p)
}

/// Result of sampling a function on a grid.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub field: Field,
    /// Set when the function is nonzero in the outermost layer of cells, so
    /// its support is probably not contained in the box.
    pub truncated: bool,
    /// Mass carried by the outermost cell layer; a lower bound on the deficit
    /// scale when `truncated` is set.
    pub boundary_mass: f64,
}

/// Evaluates `f` at every cell center; negative values are clamped to zero.
pub fn sample<F>(f: F, grid: Arc<Grid>, time: f64) -> Sampled
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::with_capacity(grid.len());
    let mut point = vec![0.0; grid.dim()];
    let mut truncated = false;
    let mut boundary = 0.0;
    for flat in 0..grid.len() {
        for (a, p) in point.iter_mut().enumerate() {
            *p = grid.center(a, grid.axis_index(flat, a));
        }
        let v = f(&point);
        let v = if v > 0.0 && v.is_finite() { v } else { 0.0 };
        if v > 0.0 && grid.is_boundary_cell(flat) {
            truncated = true;
            boundary += v;
        }
        values.push(v);
    }
    let boundary_mass = boundary * grid.cell_volume();
    Sampled {
        field: Field::from_parts(grid, values, time),
        truncated,
        boundary_mass,
    }
}

/// Exact cell averages of the indicator of the box `Π [c_i − r_i, c_i + r_i]`
/// times `height`.
pub fn box_average(grid: Arc<Grid>, center: &[f64], radius: &[f64], height: f64) -> Field {
    let dim = grid.dim();
    let per_axis: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            let h = grid.spacing()[a];
            (0..grid.cells()[a])
                .map(|j| {
                    let x0 = grid.center(a, j) - h / 2.0;
                    let lo = x0.max(center[a] - radius[a]);
                    let hi = (x0 + h).min(center[a] + radius[a]);
                    ((hi - lo) / h).max(0.0)
                })
                .collect()
        })
        .collect();
    let values = (0..grid.len())
        .map(|flat| {
            (0..dim)
                .map(|a| per_axis[a][grid.axis_index(flat, a)])
                .product::<f64>()
                * height
        })
        .collect();
    Field::from_parts(grid, values, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2(l: f64, n: usize) -> Arc<Grid> {
        Grid::uniform(2, l, n).unwrap().shared()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            Grid::uniform(2, 1.0, 7),
            Err(GridError::BadCellCount { .. })
        ));
        assert!(matches!(
            Grid::uniform(2, 1.0, 6),
            Err(GridError::BadCellCount { .. })
        ));
        assert!(matches!(
            Grid::uniform(1, -1.0, 8),
            Err(GridError::BadHalfWidth { .. })
        ));
        assert!(matches!(
            Grid::new(vec![1.0], vec![8, 8]),
            Err(GridError::AxisMismatch(1, 2))
        ));
    }

    #[test]
    fn centers_are_symmetric() {
        let g = Grid::new(vec![2.0, 3.0], vec![8, 12]).unwrap();
        for a in 0..2 {
            let c = g.centers(a);
            for j in 0..c.len() {
                assert!((c[j] + c[c.len() - 1 - j]).abs() < 1e-15);
            }
        }
        let flat = g.flat_index(&[1, 4]);
        assert_eq!(g.multi_index(g.reflect(flat, 0)), vec![6, 4]);
        assert_eq!(g.multi_index(g.reflect(flat, 1)), vec![1, 7]);
    }

    #[test]
    fn zero_field_mass() {
        assert_eq!(total_mass(&Field::zeros(g2(1.0, 8), 0.0)), 0.0);
    }

    #[test]
    fn indicator_mass_and_norm() {
        let g = g2(2.0, 16);
        let f = sample(
            |x| {
                if x[0].abs() < 1.0 && x[1].abs() < 1.0 {
                    1.0
                } else {
                    0.0
                }
            },
            g,
            0.0,
        )
        .field;
        assert!((total_mass(&f) - 4.0).abs() < 1e-12);
        assert!((lp_norm(&f, 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(lp_norm(&f, 0.5), Err(GridError::BadExponent(_))));
    }

    #[test]
    fn sample_flags_truncation() {
        let s = sample(|_| 1.0, g2(1.0, 8), 0.0);
        assert!(s.truncated);
        assert!(s.boundary_mass > 0.0);
        let s = sample(|x| (0.5 - x[0].hypot(x[1])).max(0.0), g2(1.0, 8), 0.0);
        assert!(!s.truncated);
        let s = sample(|_| 0.0, g2(1.0, 8), 0.0);
        assert_eq!(s.field.max(), 0.0);
    }

    #[test]
    fn negative_samples_clamp() {
        let s = sample(|x| x[0], g2(1.0, 8), 0.0);
        assert!(s.field.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn box_average_is_exact() {
        let f = box_average(g2(1.0, 10), &[0.0, 0.0], &[0.33, 0.5], 2.0);
        assert!((total_mass(&f) - 2.0 * 0.66 * 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_linear_data_inside() {
        let g = g2(1.0, 16);
        let f = sample(|x| 2.0 + x[0] - 0.5 * x[1], g, 0.0).field;
        let v = f.interpolate(&[0.1234, -0.321]);
        assert!((v - (2.0 + 0.1234 + 0.5 * 0.321)).abs() < 1e-12);
        assert_eq!(f.interpolate(&[1.5, 0.0]), 0.0);
    }

    #[test]
    fn field_rejects_negative() {
        let g = g2(1.0, 8);
        let mut v = vec![0.0; 64];
        v[3] = -1.0;
        assert!(matches!(
            Field::new(g, v, 0.0),
            Err(GridError::BadValue { index: 3, .. })
        ));
    }
}
