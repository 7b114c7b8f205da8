//! Lines in the plane, sinogram grids, and point sampling of fields.
//!
//! A line is labelled by `(s, θ)`: direction `ξ = (cos θ, sin θ)`, normal `η = (−sin θ, cos θ)`, and it passes
//! through `s·η`. Points on it are `s·η + t·ξ`.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::tensor::{MixedTensorField, SymmetricTensorField};

pub fn direction(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

pub fn normal(theta: f64) -> [f64; 2] {
    [-theta.sin(), theta.cos()]
}

pub fn line_point(s: f64, theta: f64, t: f64) -> [f64; 2] {
    let (xi, eta) = (direction(theta), normal(theta));
    [s * eta[0] + t * xi[0], s * eta[1] + t * xi[1]]
}

/// Sampling of the line manifold: `ns` offsets on `[−s_max, s_max]` (endpoints included), `ntheta` angles on
/// `[0, 2π)`, and the trapezoid nodes used along each line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramGrid {
    pub ns: usize,
    pub s_max: f64,
    pub ntheta: usize,
    pub t_step: f64,
    pub t_max: f64,
}

impl SinogramGrid {
    pub fn new(ns: usize, s_max: f64, ntheta: usize, t_step: f64, t_max: f64) -> Result<Self> {
        let g = SinogramGrid { ns, s_max, ntheta, t_step, t_max };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns < 2 {
            return Err(Error::Grid(format!("need at least 2 offsets, got {}", self.ns)));
        }
        if self.ntheta < 2 || !self.ntheta.is_multiple_of(2) {
            return Err(Error::Grid(format!("ntheta must be even and positive, got {}", self.ntheta)));
        }
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return Err(Error::Grid(format!("s_max must be positive, got {}", self.s_max)));
        }
        if !(self.t_step > 0.0 && self.t_step.is_finite()) {
            return Err(Error::Grid(format!("t_step must be positive, got {}", self.t_step)));
        }
        if !(self.t_max >= self.s_max) {
            return Err(Error::Grid(format!("t_max {} is shorter than s_max {}", self.t_max, self.s_max)));
        }
        Ok(())
    }

    /// Lines covering `grid`: `s_max = t_max` = circumradius, `t_step = h/2`, and an odd offset count
    /// giving `Δs ≤ h`.
    pub fn for_field(grid: &GridSpec, ntheta: usize) -> Result<Self> {
        let r = grid.circumradius();
        let mut ns = (2.0 * r / grid.h()).ceil() as usize + 1;
        if ns.is_multiple_of(2) {
            ns += 1;
        }
        Self::new(ns, r, ntheta, 0.5 * grid.h(), r)
    }

    /// Same lines, with `ns` offsets (kept as given) on `[−s_max, s_max]`.
    pub fn with_offsets(grid: &GridSpec, ns: usize, s_max: f64, ntheta: usize) -> Result<Self> {
        Self::new(ns, s_max, ntheta, 0.5 * grid.h(), s_max.max(grid.circumradius()))
    }

    pub fn ds(&self) -> f64 {
        2.0 * self.s_max / (self.ns - 1) as f64
    }

    /// Offsets are symmetric about zero, so `s(ns−1−i) == −s(i)` exactly.
    pub fn s(&self, i: usize) -> f64 {
        let c = (self.ns - 1) as f64 / 2.0;
        (i as f64 - c) / c * self.s_max
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.ns).map(|i| self.s(i)).collect()
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ntheta as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    /// `ξ` for angle `j`. The second half of the circle reuses the negated first half, so antipodal
    /// directions are exact negatives of each other.
    pub fn xi(&self, j: usize) -> [f64; 2] {
        let half = self.ntheta / 2;
        if j < half {
            direction(self.theta(j))
        } else {
            let d = direction(self.theta(j - half));
            [-d[0], -d[1]]
        }
    }

    pub fn eta(&self, j: usize) -> [f64; 2] {
        let x = self.xi(j);
        [-x[1], x[0]]
    }

    /// Number of trapezoid nodes along a line and the index of `t = 0`.
    pub fn t_nodes(&self) -> (usize, usize) {
        let c = (self.t_max / self.t_step - 1e-9).ceil().max(0.0) as usize;
        (2 * c + 1, c)
    }

    pub fn t(&self, j: usize) -> f64 {
        let (_, c) = self.t_nodes();
        (j as f64 - c as f64) * self.t_step
    }

    /// Trapezoid weights in `s` (for moments and inner products).
    pub fn s_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.ns {
            0.5 * self.ds()
        } else {
            self.ds()
        }
    }
}

/// Ray-transform samples on a [`SinogramGrid`], rows indexed by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub grid: SinogramGrid,
    k: usize,
    l: usize,
    data: Array2<f64>,
}

impl Sinogram {
    pub fn zeros(grid: SinogramGrid, k: usize, l: usize) -> Self {
        Sinogram { grid, k, l, data: Array2::zeros((grid.ntheta, grid.ns)) }
    }

    pub fn from_array(grid: SinogramGrid, k: usize, l: usize, data: Array2<f64>) -> Result<Self> {
        grid.validate()?;
        if data.dim() != (grid.ntheta, grid.ns) {
            return Err(Error::Shape(format!("sinogram array {:?} vs grid ({}, {})", data.dim(), grid.ntheta, grid.ns)));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("sinogram contains NaN or infinite samples".into()));
        }
        Ok(Sinogram { grid, k, l, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation in `s` along row `j`; zero outside `[−s_max, s_max]`.
    pub fn interp(&self, j: usize, s: f64) -> f64 {
        interp_row(self.data.row(j).as_slice().expect("row-major"), &self.grid, s)
    }

    /// `∫∫ φ ψ ds dθ`, trapezoid in `s`, uniform in `θ`.
    pub fn inner(&self, other: &Sinogram) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Shape("sinograms on different grids".into()));
        }
        let mut total = 0.0;
        for (ra, rb) in self.data.outer_iter().zip(other.data.outer_iter()) {
            let mut row = 0.0;
            for i in 0..self.grid.ns {
                row += self.grid.s_weight(i) * ra[i] * rb[i];
            }
            total += row;
        }
        Ok(total * self.grid.dtheta())
    }

    pub fn sub(&self, other: &Sinogram) -> Result<Sinogram> {
        if self.grid != other.grid {
            return Err(Error::Shape("sinograms on different grids".into()));
        }
        Ok(Sinogram { data: &self.data - &other.data, ..self.clone() })
    }
}

pub(crate) fn interp_row(row: &[f64], grid: &SinogramGrid, s: f64) -> f64 {
    let u = (s + grid.s_max) / grid.ds();
    if !(u >= 0.0 && u <= (grid.ns - 1) as f64) {
        return 0.0;
    }
    let i0 = (u.floor() as usize).min(grid.ns - 2);
    let a = u - i0 as f64;
    (1.0 - a) * row[i0] + a * row[i0 + 1]
}

/// Bilinear interpolation of one plane with zero padding beyond the outermost nodes; zero outside the extent.
pub fn bilinear(plane: ArrayView2<'_, f64>, grid: &GridSpec, x: [f64; 2]) -> f64 {
    if !grid.contains(x) {
        return 0.0;
    }
    let slice = plane.as_slice().expect("planes are row-major");
    bilinear_slice(slice, grid.nx, grid.x_min, 1.0 / grid.h(), x)
}

#[inline]
pub(crate) fn bilinear_slice(plane: &[f64], n: usize, x_min: f64, inv_h: f64, x: [f64; 2]) -> f64 {
    let u = (x[0] - x_min) * inv_h - 0.5;
    let v = (x[1] - x_min) * inv_h - 0.5;
    let (j0, i0) = (u.floor(), v.floor());
    let (a, b) = (u - j0, v - i0);
    let (j0, i0) = (j0 as isize, i0 as isize);
    let n = n as isize;
    let at = |i: isize, j: isize| -> f64 {
        if i >= 0 && i < n && j >= 0 && j < n {
            plane[(i * n + j) as usize]
        } else {
            0.0
        }
    };
    (1.0 - b) * ((1.0 - a) * at(i0, j0) + a * at(i0, j0 + 1)) + b * ((1.0 - a) * at(i0 + 1, j0) + a * at(i0 + 1, j0 + 1))
}

/// Anything the forward transform can integrate along lines.
pub trait FieldSource: Sync {
    /// `(k, ℓ)` as seen by the transform weights; symmetric fields report `(m, 0)`.
    fn orders(&self) -> (usize, usize);

    /// All stored components at `x`, in plane order.
    fn sample(&self, x: [f64; 2]) -> Vec<f64>;

    /// Writes `∫ Σ_c w_c f_c(s·η + t·ξ) dt` for every offset of row `j` into `out`.
    fn project_row(&self, weights: &[f64], grid: &SinogramGrid, j: usize, out: &mut [f64]);
}

/// Parameter interval where the line `base + t·dir` lies inside the square `[lo, hi]²`.
fn clip_line(base: [f64; 2], dir: [f64; 2], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for d in 0..2 {
        if dir[d].abs() < 1e-300 {
            if base[d] < lo || base[d] > hi {
                return None;
            }
        } else {
            let a = (lo - base[d]) / dir[d];
            let b = (hi - base[d]) / dir[d];
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

fn project_planes(planes: &[ArrayView2<'_, f64>], area: &GridSpec, weights: &[f64], grid: &SinogramGrid, j: usize, out: &mut [f64]) {
    let mut contracted = Array2::<f64>::zeros((area.ny, area.nx));
    for (w, p) in weights.iter().zip(planes) {
        contracted.scaled_add(*w, p);
    }
    let plane = contracted.as_slice().expect("fresh array");
    let (xi, eta) = (grid.xi(j), grid.eta(j));
    let (nt, _) = grid.t_nodes();
    let inv_h = 1.0 / area.h();
    for (i, o) in out.iter_mut().enumerate() {
        let s = grid.s(i);
        let base = [s * eta[0], s * eta[1]];
        let mut acc = 0.0;
        if let Some((ta, tb)) = clip_line(base, xi, area.x_min, area.x_max) {
            let lo = ((ta / grid.t_step).floor() as isize + (nt as isize - 1) / 2).max(0) as usize;
            let hi = ((tb / grid.t_step).ceil() as isize + (nt as isize - 1) / 2).min(nt as isize - 1);
            if hi >= lo as isize {
                for n in lo..=hi as usize {
                    let t = grid.t(n);
                    let x = [base[0] + t * xi[0], base[1] + t * xi[1]];
                    if !area.contains(x) {
                        continue;
                    }
                    let w = if n == 0 || n + 1 == nt { 0.5 } else { 1.0 };
                    acc += w * bilinear_slice(plane, area.nx, area.x_min, inv_h, x);
                }
            }
        }
        *o = acc * grid.t_step;
    }
}

impl FieldSource for MixedTensorField {
    fn orders(&self) -> (usize, usize) {
        (self.k(), self.l())
    }

    fn sample(&self, x: [f64; 2]) -> Vec<f64> {
        self.data().outer_iter().map(|p| bilinear(p, self.grid(), x)).collect()
    }

    fn project_row(&self, weights: &[f64], grid: &SinogramGrid, j: usize, out: &mut [f64]) {
        let planes: Vec<_> = self.data().outer_iter().collect();
        project_planes(&planes, self.grid(), weights, grid, j, out);
    }
}

impl FieldSource for SymmetricTensorField {
    fn orders(&self) -> (usize, usize) {
        (self.m(), 0)
    }

    fn sample(&self, x: [f64; 2]) -> Vec<f64> {
        self.data().outer_iter().map(|p| bilinear(p, self.grid(), x)).collect()
    }

    fn project_row(&self, weights: &[f64], grid: &SinogramGrid, j: usize, out: &mut [f64]) {
        let planes: Vec<_> = self.data().outer_iter().collect();
        project_planes(&planes, self.grid(), weights, grid, j, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_basics() {
        let p = line_point(0.0, 0.0, 1.0);
        assert_eq!(p, [1.0, 0.0]);
        let p = line_point(1.0, 0.0, 0.0);
        assert!((p[0]).abs() < 1e-16 && (p[1] - 1.0).abs() < 1e-16);
    }

    #[test]
    fn offsets_are_antisymmetric() {
        let g = SinogramGrid::new(101, 1.7, 8, 0.01, 2.0).unwrap();
        for i in 0..101 {
            assert_eq!(g.s(i), -g.s(100 - i));
        }
        assert_eq!(g.s(0), -1.7);
        for j in 0..4 {
            assert_eq!(g.xi(j + 4), [-g.xi(j)[0], -g.xi(j)[1]]);
        }
    }

    #[test]
    fn rejects_odd_ntheta() {
        assert!(SinogramGrid::new(11, 1.0, 7, 0.1, 1.0).is_err());
        assert!(SinogramGrid::new(11, 1.0, 8, 0.1, 0.5).is_err());
    }

    #[test]
    fn bilinear_nodes_midpoints_outside() {
        let g = GridSpec::centered(4, 1.0).unwrap();
        let f = MixedTensorField::from_fn(0, 0, g, |_, x, y| 3.0 * x - y * y);
        let xs = g.coords();
        assert_eq!(bilinear(f.plane(0, 0), &g, [xs[1], xs[2]]), f.plane(0, 0)[[2, 1]]);
        let mid = bilinear(f.plane(0, 0), &g, [0.5 * (xs[1] + xs[2]), 0.5 * (xs[0] + xs[1])]);
        let p = f.plane(0, 0);
        let mean = 0.25 * (p[[0, 1]] + p[[0, 2]] + p[[1, 1]] + p[[1, 2]]);
        assert!((mid - mean).abs() < 1e-15);
        assert_eq!(f.sample([1.5, 0.0]), vec![0.0]);
    }
}
