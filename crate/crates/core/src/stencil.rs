//! Explicit conservative update kernel shared by the physical and rescaled
//! solvers.
//!
//! The kernel works on grids of dimension 1..=3 padded to three axes. It only
//! touches the index box around the nonzero cells: outside that box the
//! density, the Kirchhoff potential and the drift flux all vanish, so the
//! update is exactly zero there.

use rayon::prelude::*;

use crate::grid::Grid;
use crate::sum::pairwise;

const PAR_ROWS: usize = 64;

/// Updated values below this are set to zero. The map is monotone, keeps
/// `u^m` out of the subnormal range and stops the far tail from inflating the
/// update box; the removed mass is booked with the clamp mass.
pub(crate) const FLUSH: f64 = 1e-150;

/// Evaluation rule for `x ↦ x^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Power {
    Two,
    Three,
    General(f64),
}

impl Power {
    pub fn new(m: f64) -> Self {
        if m == 2.0 {
            Power::Two
        } else if m == 3.0 {
            Power::Three
        } else {
            Power::General(m)
        }
    }

    #[inline(always)]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Power::Two => x * x,
            Power::Three => x * x * x,
            Power::General(m) => x.powf(m),
        }
    }
}

/// Inclusive-exclusive index box on the padded three-axis layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct IndexBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl IndexBox {
    pub fn is_empty(&self) -> bool {
        (0..3).any(|a| self.lo[a] >= self.hi[a])
    }

    pub fn grow(&self, by: usize, dims: &[usize; 3]) -> IndexBox {
        if self.is_empty() {
            return *self;
        }
        let mut out = *self;
        for a in 0..3 {
            out.lo[a] = self.lo[a].saturating_sub(by);
            out.hi[a] = (self.hi[a] + by).min(dims[a]);
        }
        out
    }

    pub fn contains_box(&self, other: &IndexBox) -> bool {
        other.is_empty() || (0..3).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    pub fn contains_row(&self, i0: usize, i1: usize) -> bool {
        i0 >= self.lo[0] && i0 < self.hi[0] && i1 >= self.lo[1] && i1 < self.hi[1]
    }
}

/// Grid layout padded to three axes (leading axes of length one).
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub dims: [usize; 3],
    pub strides: [usize; 3],
    /// `1/h²` per padded axis (0 on padding axes).
    pub inv_h2: [f64; 3],
    /// `1/h` per padded axis (0 on padding axes).
    pub inv_h: [f64; 3],
    pub half_width: [f64; 3],
    pub spacing: [f64; 3],
    /// Grid axis for each padded axis.
    pub axis_of: [Option<usize>; 3],
    pub volume: f64,
}

impl Layout {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.dim();
        assert!((1..=3).contains(&n), "stencil supports dimensions 1..=3");
        let off = 3 - n;
        let mut dims = [1; 3];
        let mut inv_h2 = [0.0; 3];
        let mut inv_h = [0.0; 3];
        let mut half_width = [0.0; 3];
        let mut spacing = [0.0; 3];
        let mut axis_of = [None; 3];
        for a in 0..n {
            dims[off + a] = grid.cells()[a];
            let h = grid.spacing()[a];
            inv_h2[off + a] = 1.0 / (h * h);
            inv_h[off + a] = 1.0 / h;
            half_width[off + a] = grid.half_width()[a];
            spacing[off + a] = h;
            axis_of[off + a] = Some(a);
        }
        let strides = [dims[1] * dims[2], dims[2], 1];
        Self {
            dims,
            strides,
            inv_h2,
            inv_h,
            half_width,
            spacing,
            axis_of,
            volume: grid.cell_volume(),
        }
    }

    pub fn full(&self) -> IndexBox {
        IndexBox {
            lo: [0; 3],
            hi: self.dims,
        }
    }

    pub fn row_len(&self) -> usize {
        self.dims[2]
    }

    /// Smallest box containing every cell with a nonzero value, searched
    /// inside `within`.
    pub fn nonzero_box(&self, values: &[f64], within: &IndexBox) -> IndexBox {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let nl = self.row_len();
        for i0 in within.lo[0]..within.hi[0] {
            for i1 in within.lo[1]..within.hi[1] {
                let base = (i0 * self.dims[1] + i1) * nl;
                let row = &values[base + within.lo[2]..base + within.hi[2]];
                let first = row.iter().position(|&v| v != 0.0);
                if let Some(f) = first {
                    let last = row.iter().rposition(|&v| v != 0.0).unwrap();
                    lo[0] = lo[0].min(i0);
                    hi[0] = hi[0].max(i0 + 1);
                    lo[1] = lo[1].min(i1);
                    hi[1] = hi[1].max(i1 + 1);
                    lo[2] = lo[2].min(within.lo[2] + f);
                    hi[2] = hi[2].max(within.lo[2] + last + 1);
                }
            }
        }
        if lo[0] == usize::MAX {
            IndexBox {
                lo: [0; 3],
                hi: [0; 3],
            }
        } else {
            IndexBox { lo, hi }
        }
    }

    pub fn zero_box(&self, values: &mut [f64], region: &IndexBox) {
        if region.is_empty() {
            return;
        }
        let nl = self.row_len();
        for i0 in region.lo[0]..region.hi[0] {
            for i1 in region.lo[1]..region.hi[1] {
                let base = (i0 * self.dims[1] + i1) * nl;
                values[base + region.lo[2]..base + region.hi[2]].fill(0.0);
            }
        }
    }
}

/// Per-step totals returned by the kernel.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KernelTotals {
    pub mass_after: f64,
    pub boundary_flux: f64,
    pub clamp_mass: f64,
    pub max_value: f64,
}

/// Reusable buffers and the box bookkeeping of an explicit time stepper.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub layout: Layout,
    /// Which potential buffer each padded axis reads.
    potential_of: [usize; 3],
    /// Distinct exponents (one potential buffer each).
    distinct: Vec<Power>,
    potentials: Vec<Vec<f64>>,
    /// `ε^m` per distinct exponent.
    eps_pow: Vec<f64>,
    epsilon: f64,
    /// Drift coefficients per padded axis, `None` for pure diffusion.
    drift: Option<[f64; 3]>,
    /// Face velocities `−κ y_f` per padded axis (empty without drift).
    faces: [Vec<f64>; 3],
    /// Drift along the contiguous axis.
    row_drift: DriftStencil,
    /// Zero row used for neighbours outside the grid.
    zeros: Vec<f64>,
    diffusion: bool,
}

impl Kernel {
    pub fn new(grid: &Grid, m: &[f64], epsilon: f64, drift: Option<&[f64]>) -> Self {
        let layout = Layout::new(grid);
        let off = 3 - grid.dim();
        let mut potential_of = [0; 3];
        let mut distinct: Vec<Power> = Vec::new();
        let mut exps: Vec<f64> = Vec::new();
        for (a, &mi) in m.iter().enumerate() {
            let k = match exps.iter().position(|&e| e == mi) {
                Some(k) => k,
                None => {
                    exps.push(mi);
                    distinct.push(Power::new(mi));
                    exps.len() - 1
                }
            };
            potential_of[off + a] = k;
        }
        let len = grid.len();
        let potentials = vec![vec![0.0; len]; distinct.len()];
        let eps_pow = distinct.iter().map(|p| p.eval(epsilon)).collect();
        let drift = drift.map(|d| {
            let mut out = [0.0; 3];
            for (a, &k) in d.iter().enumerate() {
                out[off + a] = k;
            }
            out
        });
        let mut faces: [Vec<f64>; 3] = Default::default();
        if let Some(k) = drift {
            for a in 0..3 {
                if layout.axis_of[a].is_some() {
                    faces[a] = (0..=layout.dims[a])
                        .map(|j| -k[a] * (-layout.half_width[a] + j as f64 * layout.spacing[a]))
                        .collect();
                }
            }
        }
        let row_drift = if faces[2].is_empty() {
            DriftStencil::new(&vec![0.0; layout.dims[2] + 1])
        } else {
            DriftStencil::new(&faces[2])
        };
        let zeros = vec![0.0; layout.row_len()];
        Self {
            layout,
            potential_of,
            distinct,
            potentials,
            eps_pow,
            epsilon,
            drift,
            faces,
            row_drift,
            zeros,
            diffusion: true,
        }
    }

    pub fn set_diffusion(&mut self, on: bool) {
        self.diffusion = on;
    }

    /// Kirchhoff potential `(u + ε)^m − ε^m` on `region` for each distinct exponent.
    fn fill_potentials(&mut self, values: &[f64], region: &IndexBox) {
        if !self.diffusion {
            return;
        }
        let lay = &self.layout;
        let nl = lay.row_len();
        let n1 = lay.dims[1];
        let eps = self.epsilon;
        for (k, buf) in self.potentials.iter_mut().enumerate() {
            let pw = self.distinct[k];
            let shift = self.eps_pow[k];
            let work = |(row, chunk): (usize, &mut [f64])| {
                let (i0, i1) = (row / n1, row % n1);
                if !region.contains_row(i0, i1) {
                    return;
                }
                let base = row * nl;
                let src = &values[base + region.lo[2]..base + region.hi[2]];
                let dst = &mut chunk[region.lo[2]..region.hi[2]];
                match (pw, eps == 0.0) {
                    (Power::Two, true) => dst.iter_mut().zip(src).for_each(|(w, &u)| *w = u * u),
                    (Power::Three, true) => {
                        dst.iter_mut().zip(src).for_each(|(w, &u)| *w = u * u * u)
                    }
                    _ => dst.iter_mut().zip(src).for_each(|(w, &u)| {
                        let x = if u == 0.0 {
                            0.0
                        } else {
                            pw.eval(u + eps) - shift
                        };
                        *w = if x < f64::MIN_POSITIVE { 0.0 } else { x };
                    }),
                }
            };
            if region_rows(region) >= PAR_ROWS {
                buf.par_chunks_mut(nl).enumerate().for_each(work);
            } else {
                buf.chunks_mut(nl).enumerate().for_each(work);
            }
        }
    }

    /// One explicit step `out = u + dt · L(u)` where `L` is the diffusion
    /// operator plus the optional upwinded confining drift. `support` is a box
    /// containing every nonzero of `values`; `out_support` is a box containing
    /// every nonzero of `out` on entry. Returns the totals and the new nonzero
    /// box of `out`.
    pub fn advance(
        &mut self,
        values: &[f64],
        support: &IndexBox,
        out: &mut [f64],
        out_support: &IndexBox,
        dt: f64,
    ) -> (KernelTotals, IndexBox) {
        let dims = self.layout.dims;
        let update = support.grow(1, &dims);
        if !update.contains_box(out_support) {
            self.layout.zero_box(out, out_support);
        }
        if update.is_empty() {
            return (KernelTotals::default(), update);
        }
        let potential_box = support.grow(2, &dims);
        self.fill_potentials(values, &potential_box);

        let lay = &self.layout;
        let nl = lay.row_len();
        let n1 = dims[1];
        let potentials = &self.potentials;
        let potential_of = self.potential_of;
        let faces = &self.faces;
        let row_drift = &self.row_drift;
        let zeros = &self.zeros;
        let drift = self.drift;
        let diffusion = self.diffusion;
        let (lo, hi) = (update.lo[2], update.hi[2]);
        let plane = lay.axis_of[0].is_none() && lay.axis_of[1].is_some();
        let len = hi - lo;

        let work = |(row, chunk): (usize, &mut [f64])| -> RowTotals {
            let (i0, i1) = (row / n1, row % n1);
            if !update.contains_row(i0, i1) {
                return RowTotals::default();
            }
            let pos = [i0, i1];
            let c0 = row * nl + lo;
            let near = |a: usize| (pos[a] > 0, pos[a] + 1 < dims[a], lay.strides[a]);
            let zero = &zeros[..len];
            let mut rate = vec![0.0; len];
            let mut t = RowTotals::default();
            if plane && len >= 3 {
                let w1 = &potentials[potential_of[1]];
                let w2 = &potentials[potential_of[2]][row * nl..(row + 1) * nl];
                let w1c = &w1[c0..c0 + len];
                let (w1u, w1d) = neighbour_rows(w1, zero, c0, near(1));
                let vrow = &values[row * nl..(row + 1) * nl];
                let (vu, vd) = neighbour_rows(values, zero, c0, near(1));
                let (k21, k22) = if diffusion {
                    (lay.inv_h2[1], lay.inv_h2[2])
                } else {
                    (0.0, 0.0)
                };
                let (bl, br) = match drift {
                    Some(_) => (faces[1][pos[1]], faces[1][pos[1] + 1]),
                    None => (0.0, 0.0),
                };
                let (ll, lc) = if bl > 0.0 { (bl, 0.0) } else { (0.0, bl) };
                let (rc, rr) = if br > 0.0 { (br, 0.0) } else { (0.0, br) };
                let row_cells = PlaneRow {
                    w1u,
                    w1c,
                    w1d,
                    w2,
                    vu,
                    vrow,
                    vd,
                    drift: row_drift,
                    lo,
                    k21,
                    k22,
                    kh1: lay.inv_h[1],
                    kh2: lay.inv_h[2],
                    axis1: [ll, lc, rc, rr],
                };
                row_cells.rate(&mut rate);
                if diffusion {
                    if pos[1] == 0 || pos[1] + 1 == dims[1] {
                        let edges = 1 + usize::from(dims[1] == 1);
                        t.flux += edges as f64 * w1c.iter().sum::<f64>() * k21;
                    }
                    if lo == 0 {
                        t.flux += w2[0] * k22;
                    }
                    if hi == nl {
                        t.flux += w2[nl - 1] * k22;
                    }
                }
            } else {
                if diffusion {
                    for a in 0..2 {
                        if lay.axis_of[a].is_none() {
                            continue;
                        }
                        let w = &potentials[potential_of[a]];
                        let wc = &w[c0..c0 + len];
                        let (wl, wr) = neighbour_rows(w, zero, c0, near(a));
                        let k2 = lay.inv_h2[a];
                        for (((r, &c), &l), &rt) in rate.iter_mut().zip(wc).zip(wl).zip(wr) {
                            *r += (rt - 2.0 * c + l) * k2;
                        }
                        if pos[a] == 0 || pos[a] + 1 == dims[a] {
                            let edges = 1 + usize::from(dims[a] == 1);
                            t.flux += edges as f64 * wc.iter().sum::<f64>() * k2;
                        }
                    }
                    let w = &potentials[potential_of[2]][row * nl..(row + 1) * nl];
                    second_difference(w, lo, hi, lay.inv_h2[2], &mut rate);
                    if lo == 0 {
                        t.flux += w[0] * lay.inv_h2[2];
                    }
                    if hi == nl {
                        t.flux += w[nl - 1] * lay.inv_h2[2];
                    }
                }
                if let Some(kappa) = drift {
                    let v = &values[c0..c0 + len];
                    for a in 0..2 {
                        if lay.axis_of[a].is_none() || kappa[a] == 0.0 {
                            continue;
                        }
                        let (vl, vr) = neighbour_rows(values, zero, c0, near(a));
                        let (bl, br) = (faces[a][pos[a]], faces[a][pos[a] + 1]);
                        // upwind weights of the left and right face fluxes
                        let (ll, lc) = if bl > 0.0 { (bl, 0.0) } else { (0.0, bl) };
                        let (rc, rr) = if br > 0.0 { (br, 0.0) } else { (0.0, br) };
                        let kh = lay.inv_h[a];
                        for (((r, &c), &l), &rt) in rate.iter_mut().zip(v).zip(vl).zip(vr) {
                            let f_left = ll * l + lc * c;
                            let f_right = rc * c + rr * rt;
                            *r -= (f_right - f_left) * kh;
                        }
                    }
                    if kappa[2] != 0.0 {
                        let vrow = &values[row * nl..(row + 1) * nl];
                        row_drift.apply(vrow, lo, hi, lay.inv_h[2], &mut rate);
                    }
                }
            }
            let v = &values[c0..c0 + len];
            let out = &mut chunk[lo..hi];
            let (mut mass, mut clamp, mut max) = (0.0, 0.0, 0.0f64);
            for ((o, &x), &r) in out.iter_mut().zip(v).zip(&rate) {
                let next = x + dt * r;
                let kept = if next < FLUSH { 0.0 } else { next };
                clamp += kept - next;
                *o = kept;
                mass += kept;
                max = max.max(kept);
            }
            t.mass = mass;
            t.clamp = clamp;
            t.max = max;
            t
        };

        let rows: Vec<RowTotals> = if region_rows(&update) >= PAR_ROWS {
            out.par_chunks_mut(nl).enumerate().map(work).collect()
        } else {
            out.chunks_mut(nl).enumerate().map(work).collect()
        };
        let vol = lay.volume;
        let masses: Vec<f64> = rows.iter().map(|r| r.mass).collect();
        let fluxes: Vec<f64> = rows.iter().map(|r| r.flux).collect();
        let clamps: Vec<f64> = rows.iter().map(|r| r.clamp).collect();
        let totals = KernelTotals {
            mass_after: pairwise(&masses) * vol,
            boundary_flux: pairwise(&fluxes) * vol * dt,
            clamp_mass: pairwise(&clamps) * vol,
            max_value: rows.iter().fold(0.0, |m, r| m.max(r.max)),
        };
        let next_support = lay.nonzero_box(out, &update);
        (totals, next_support)
    }
}

/// Adds `(w_{j+1} − 2 w_j + w_{j−1}) k2` for `j` in `lo..hi` of one row,
/// with zeros beyond the row ends.
fn second_difference(w: &[f64], lo: usize, hi: usize, k2: f64, rate: &mut [f64]) {
    let nl = w.len();
    let at = |j: isize| -> f64 {
        if j < 0 || j as usize >= nl {
            0.0
        } else {
            w[j as usize]
        }
    };
    let len = hi - lo;
    if len <= 2 {
        for (k, r) in rate.iter_mut().enumerate() {
            let j = (lo + k) as isize;
            *r += (at(j + 1) - 2.0 * at(j) + at(j - 1)) * k2;
        }
        return;
    }
    let j = lo as isize;
    rate[0] += (at(j + 1) - 2.0 * at(j) + at(j - 1)) * k2;
    for (r, win) in rate[1..len - 1].iter_mut().zip(w[lo..hi].windows(3)) {
        *r += (win[2] - 2.0 * win[1] + win[0]) * k2;
    }
    let j = (hi - 1) as isize;
    rate[len - 1] += (at(j + 1) - 2.0 * at(j) + at(j - 1)) * k2;
}

/// Upwind drift along one axis as a three-point stencil: the flux divergence
/// at cell `j` is `l_j v_{j−1} + c_j v_j + r_j v_{j+1}`. The end faces carry no flux.
#[derive(Debug, Clone, Default)]
struct DriftStencil {
    left: Vec<f64>,
    center: Vec<f64>,
    right: Vec<f64>,
}

impl DriftStencil {
    fn new(faces: &[f64]) -> Self {
        let n = faces.len() - 1;
        let plus = |f: usize| {
            if f == 0 || f == n {
                0.0
            } else {
                faces[f].max(0.0)
            }
        };
        let minus = |f: usize| {
            if f == 0 || f == n {
                0.0
            } else {
                faces[f].min(0.0)
            }
        };
        Self {
            left: (0..n).map(|j| -plus(j)).collect(),
            center: (0..n).map(|j| plus(j + 1) - minus(j)).collect(),
            right: (0..n).map(|j| minus(j + 1)).collect(),
        }
    }

    /// Subtracts `kh` times the divergence for `j` in `lo..hi` of one row.
    fn apply(&self, v: &[f64], lo: usize, hi: usize, kh: f64, rate: &mut [f64]) {
        let nl = v.len();
        let at = |j: usize, k: isize| -> f64 {
            let i = j as isize + k;
            if i < 0 || i as usize >= nl {
                0.0
            } else {
                v[i as usize]
            }
        };
        let one =
            |j: usize| self.left[j] * at(j, -1) + self.center[j] * v[j] + self.right[j] * at(j, 1);
        let len = hi - lo;
        if len <= 2 {
            for (k, r) in rate.iter_mut().enumerate() {
                *r -= one(lo + k) * kh;
            }
            return;
        }
        rate[0] -= one(lo) * kh;
        let inner = lo + 1..hi - 1;
        let coeffs = self.left[inner.clone()]
            .iter()
            .zip(&self.center[inner.clone()])
            .zip(&self.right[inner]);
        for ((r, win), ((l, c), rt)) in rate[1..len - 1]
            .iter_mut()
            .zip(v[lo..hi].windows(3))
            .zip(coeffs)
        {
            *r -= (l * win[0] + c * win[1] + rt * win[2]) * kh;
        }
        rate[len - 1] -= one(hi - 1) * kh;
    }
}

/// One row of a two-dimensional grid: potentials and densities of the row and
/// its two neighbours along the outer axis, for the fused single-pass update.
struct PlaneRow<'a> {
    w1u: &'a [f64],
    w1c: &'a [f64],
    w1d: &'a [f64],
    /// Whole row of the contiguous-axis potential.
    w2: &'a [f64],
    vu: &'a [f64],
    /// Whole row of densities.
    vrow: &'a [f64],
    vd: &'a [f64],
    drift: &'a DriftStencil,
    lo: usize,
    k21: f64,
    k22: f64,
    kh1: f64,
    kh2: f64,
    /// Upwind weights `(left·v_up, left·v, right·v, right·v_down)` of the outer axis.
    axis1: [f64; 4],
}

impl PlaneRow<'_> {
    /// Rate of the `rate.len()` cells starting at `lo`; needs at least 3 cells.
    fn rate(&self, rate: &mut [f64]) {
        let len = rate.len();
        let nl = self.vrow.len();
        let lo = self.lo;
        let [ll, lc, rc, rr] = self.axis1;
        let (k21, k22, kh1, kh2) = (self.k21, self.k22, self.kh1, self.kh2);
        let d = self.drift;
        let at = |row: &[f64], i: isize| -> f64 {
            if i < 0 || i as usize >= nl {
                0.0
            } else {
                row[i as usize]
            }
        };
        let cell = |k: usize| -> f64 {
            let i = (lo + k) as isize;
            let v = self.vrow[lo + k];
            (self.w1u[k] + self.w1d[k] - 2.0 * self.w1c[k]) * k21
                + (at(self.w2, i + 1) - 2.0 * self.w2[lo + k] + at(self.w2, i - 1)) * k22
                - ((rc * v + rr * self.vd[k]) - (ll * self.vu[k] + lc * v)) * kh1
                - (d.left[lo + k] * at(self.vrow, i - 1)
                    + d.center[lo + k] * v
                    + d.right[lo + k] * at(self.vrow, i + 1))
                    * kh2
        };
        rate[0] = cell(0);
        rate[len - 1] = cell(len - 1);
        let n = len - 2;
        let out = &mut rate[1..1 + n];
        let (w1u, w1c, w1d) = (
            &self.w1u[1..1 + n],
            &self.w1c[1..1 + n],
            &self.w1d[1..1 + n],
        );
        let (vu, vd) = (&self.vu[1..1 + n], &self.vd[1..1 + n]);
        let (w2l, w2c, w2r) = (
            &self.w2[lo..lo + n],
            &self.w2[lo + 1..lo + 1 + n],
            &self.w2[lo + 2..lo + 2 + n],
        );
        let (vl, vc, vr) = (
            &self.vrow[lo..lo + n],
            &self.vrow[lo + 1..lo + 1 + n],
            &self.vrow[lo + 2..lo + 2 + n],
        );
        let (dl, dc, dr) = (
            &d.left[lo + 1..lo + 1 + n],
            &d.center[lo + 1..lo + 1 + n],
            &d.right[lo + 1..lo + 1 + n],
        );
        for k in 0..n {
            let v = vc[k];
            out[k] = (w1u[k] + w1d[k] - 2.0 * w1c[k]) * k21
                + (w2r[k] - 2.0 * w2c[k] + w2l[k]) * k22
                - ((rc * v + rr * vd[k]) - (ll * vu[k] + lc * v)) * kh1
                - (dl[k] * vl[k] + dc[k] * v + dr[k] * vr[k]) * kh2;
        }
    }
}

/// Rows at `c0 ∓ stride`, or `zeros` where the neighbour lies outside the grid.
fn neighbour_rows<'a>(
    buf: &'a [f64],
    zeros: &'a [f64],
    c0: usize,
    (has_left, has_right, s): (bool, bool, usize),
) -> (&'a [f64], &'a [f64]) {
    let len = zeros.len();
    let left = if has_left {
        &buf[c0 - s..c0 - s + len]
    } else {
        zeros
    };
    let right = if has_right {
        &buf[c0 + s..c0 + s + len]
    } else {
        zeros
    };
    (left, right)
}

#[derive(Debug, Clone, Copy, Default)]
struct RowTotals {
    mass: f64,
    flux: f64,
    clamp: f64,
    max: f64,
}

fn region_rows(b: &IndexBox) -> usize {
    if b.is_empty() {
        0
    } else {
        (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1])
    }
}

/// Row-ordered mass of values restricted to a box (same order as the kernel).
pub(crate) fn box_mass(layout: &Layout, values: &[f64], region: &IndexBox) -> f64 {
    if region.is_empty() {
        return 0.0;
    }
    let nl = layout.row_len();
    let n1 = layout.dims[1];
    let rows: Vec<f64> = values
        .chunks(nl)
        .enumerate()
        .map(|(row, chunk)| {
            let (i0, i1) = (row / n1, row % n1);
            if !region.contains_row(i0, i1) {
                return 0.0;
            }
            chunk[region.lo[2]..region.hi[2]].iter().sum()
        })
        .collect();
    pairwise(&rows) * layout.volume
}
