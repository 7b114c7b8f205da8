//! The normal operator `N = L*L` as a convolution with homogeneous kernels of degree −1.
//!
//! Between output component `(p, q)` and input `(p′, q′)` the kernel is
//! `2·(−1)^{(ℓ−q)+(ℓ−q′)} x₁^a x₂^{2m−a} / |x|^{2m+1}` with `a = (k−p)+q+(k−p′)+q′` and `m = k+ℓ`, so only
//! `2m+1` distinct planes exist. They are sampled on the `(2n−1)²` displacement grid and applied by
//! zero-padded FFT convolution.

use ndarray::{s, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft2::{next_fast_len, Fft2};
use crate::grid::GridSpec;
use crate::tensor::{apply_a, binom, expand_symmetric, sym_full, ComponentIndex, MixedTensorField, SymmetricTensorField};

/// How the kernel is sampled near its singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Sub-samples per axis when averaging the kernel over a cell.
    pub supersample: usize,
    /// Nodes within this many cells of the origin take the cell average of the kernel instead of its point
    /// value. `0` averages only the origin cell.
    pub near_radius: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { supersample: 8, near_radius: 3 }
    }
}

/// Odd, origin-centred grid of displacements `x − x′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementGrid {
    pub n: usize,
    pub h: f64,
}

impl DisplacementGrid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::Grid(format!("displacement grid needs an odd sample count so the origin is a node, got {n}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Grid(format!("bad spacing {h}")));
        }
        Ok(DisplacementGrid { n, h })
    }

    /// Every difference of two nodes of `grid`.
    pub fn for_field(grid: &GridSpec) -> Self {
        DisplacementGrid { n: 2 * grid.nx - 1, h: grid.h() }
    }

    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }
}

/// Exponent of `x₁` in the kernel coupling output `out` with input `inp`.
pub fn kernel_exponent(k: usize, out: ComponentIndex, inp: ComponentIndex) -> usize {
    (k - out.p) + out.q + (k - inp.p) + inp.q
}

pub fn kernel_sign(l: usize, out: ComponentIndex, inp: ComponentIndex) -> f64 {
    if ((l - out.q) + (l - inp.q)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `2 x₁^a x₂^{2m−a} / |x|^{2m+1}` at a nonzero point.
pub fn monomial_kernel(a: usize, m: usize, x: [f64; 2]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    2.0 * x[0].powi(a as i32) * x[1].powi((2 * m - a) as i32) / (r2.powi(m as i32) * r2.sqrt())
}

/// Point value of the `(out, inp)` kernel of `N_{k,ℓ}` at a nonzero displacement.
pub fn kernel_value(k: usize, l: usize, out: ComponentIndex, inp: ComponentIndex, x: [f64; 2]) -> f64 {
    kernel_sign(l, out, inp) * monomial_kernel(kernel_exponent(k, out, inp), k + l, x)
}

fn monomial_plane(a: usize, m: usize, dg: &DisplacementGrid, opts: &KernelOptions) -> Array2<f64> {
    let c = dg.center() as isize;
    let h = dg.h;
    let mut plane = Array2::from_shape_fn((dg.n, dg.n), |(i, j)| {
        let x = [(j as isize - c) as f64 * h, (i as isize - c) as f64 * h];
        if i as isize == c && j as isize == c {
            0.0
        } else {
            monomial_kernel(a, m, x)
        }
    });
    let ss = opts.supersample.max(1);
    let r = opts.near_radius as isize;
    let offs: Vec<f64> = (0..ss).map(|u| ((u as f64 + 0.5) / ss as f64 - 0.5) * h).collect();
    for di in -r..=r {
        for dj in -r..=r {
            if di * di + dj * dj > r * r && (di, dj) != (0, 0) {
                continue;
            }
            let (i, j) = (c + di, c + dj);
            if i < 0 || j < 0 || i >= dg.n as isize || j >= dg.n as isize {
                continue;
            }
            let mut acc = 0.0;
            for oy in &offs {
                for ox in &offs {
                    acc += monomial_kernel(a, m, [dj as f64 * h + ox, di as f64 * h + oy]);
                }
            }
            plane[[i as usize, j as usize]] = acc / (ss * ss) as f64;
        }
    }
    plane
}

/// Sampled kernel plane coupling output `out` to input `inp`, origin (and near field) cell-averaged.
pub fn kernel_build(
    k: usize,
    l: usize,
    out: ComponentIndex,
    inp: ComponentIndex,
    dg: &DisplacementGrid,
    opts: &KernelOptions,
) -> Result<Array2<f64>> {
    DisplacementGrid::new(dg.n, dg.h)?;
    if out.p > k || inp.p > k || out.q > l || inp.q > l {
        return Err(Error::Invalid(format!("component index outside the ({k}, {l}) layout")));
    }
    let plane = monomial_plane(kernel_exponent(k, out, inp), k + l, dg, opts);
    Ok(plane * kernel_sign(l, out, inp))
}

/// FFTs of the `2m+1` kernel planes for one grid, reusable for every `(k, ℓ)` with `k + ℓ = m`.
pub struct KernelBank {
    m: usize,
    grid: GridSpec,
    size: usize,
    plan: Fft2,
    spectra: Vec<Array2<Complex64>>,
}

impl KernelBank {
    pub fn new(m: usize, grid: &GridSpec, opts: &KernelOptions) -> Result<Self> {
        grid.validate()?;
        let n = grid.nx;
        let dg = DisplacementGrid::for_field(grid);
        let size = next_fast_len(2 * n - 1);
        let plan = Fft2::new(size, size);
        let spectra = (0..=2 * m)
            .into_par_iter()
            .map(|a| {
                let plane = monomial_plane(a, m, &dg, opts);
                let mut buf = Array2::<Complex64>::zeros((size, size));
                buf.slice_mut(s![..dg.n, ..dg.n]).assign(&plane.mapv(|v| Complex64::new(v, 0.0)));
                plan.forward(&mut buf);
                buf
            })
            .collect();
        Ok(KernelBank { m, grid: *grid, size, plan, spectra })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `N_{k,ℓ} f` for any `k + ℓ = m` field on this bank's grid.
    pub fn apply(&self, f: &MixedTensorField) -> Result<MixedTensorField> {
        let (k, l) = (f.k(), f.l());
        if k + l != self.m {
            return Err(Error::Order { what: "k + l equal to the kernel bank order", k, l });
        }
        if f.grid() != &self.grid {
            return Err(Error::Shape("field grid differs from the kernel bank grid".into()));
        }
        let n = self.grid.nx;
        let size = self.size;
        let inputs: Vec<Array2<Complex64>> = ComponentIndex::all(k, l)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|ci| {
                let mut buf = Array2::<Complex64>::zeros((size, size));
                buf.slice_mut(s![..n, ..n]).assign(&f.plane(ci.p, ci.q).mapv(|v| Complex64::new(v, 0.0)));
                self.plan.forward(&mut buf);
                buf
            })
            .collect();
        let area = self.grid.pixel_area();
        let scale = area / (size * size) as f64;
        let planes: Vec<Array2<f64>> = ComponentIndex::all(k, l)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|out| {
                let mut acc = Array2::<Complex64>::zeros((size, size));
                for (inp, spec) in ComponentIndex::all(k, l).zip(&inputs) {
                    let coef = binom(k, inp.p) * binom(l, inp.q) * kernel_sign(l, out, inp);
                    let kern = &self.spectra[kernel_exponent(k, out, inp)];
                    ndarray::Zip::from(&mut acc).and(kern).and(spec).for_each(|a, &kv, &fv| *a += coef * kv * fv);
                }
                self.plan.inverse(&mut acc);
                acc.slice(s![n - 1..2 * n - 1, n - 1..2 * n - 1]).mapv(|v| v.re * scale)
            })
            .collect();
        let mut out = MixedTensorField::zeros(k, l, self.grid);
        for (ci, plane) in ComponentIndex::all(k, l).zip(planes) {
            out.plane_mut(ci.p, ci.q).assign(&plane);
        }
        Ok(out)
    }
}

/// Result of the convolution normal operator.
#[derive(Debug, Clone)]
pub struct NormalOutput {
    pub field: MixedTensorField,
    /// Set when the input does not decay towards the grid edge, so the field may be clipped.
    pub margin_warning: Option<String>,
}

/// Ratio of the largest sample in the outer ring of `width` cells to the largest sample overall.
pub fn edge_fraction(f: &MixedTensorField, width: usize) -> f64 {
    let n = f.grid().nx;
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let w = width.min(n / 2);
    let mut edge: f64 = 0.0;
    for plane in f.data().outer_iter() {
        for ((i, j), v) in plane.indexed_iter() {
            if i < w || j < w || i >= n - w || j >= n - w {
                edge = edge.max(v.abs());
            }
        }
    }
    edge / peak
}

/// `N_{k,ℓ} f` by convolution with the default kernel sampling.
pub fn normal_by_convolution(f: &MixedTensorField) -> Result<NormalOutput> {
    normal_by_convolution_with(f, &KernelOptions::default())
}

pub fn normal_by_convolution_with(f: &MixedTensorField, opts: &KernelOptions) -> Result<NormalOutput> {
    let bank = KernelBank::new(f.order(), f.grid(), opts)?;
    let field = bank.apply(f)?;
    let e = edge_fraction(f, 4);
    let margin_warning =
        (e > 1e-6).then(|| format!("input reaches {e:.2e} of its peak within 4 cells of the edge; far field may be clipped"));
    Ok(NormalOutput { field, margin_warning })
}

/// Relative weighted L² distance between `N g` (for `g = σAf`, longitudinal kernels) and `A(N_{k,ℓ} f)`.
pub fn check_ng_relation(f: &MixedTensorField) -> Result<f64> {
    let bank = KernelBank::new(f.order(), f.grid(), &KernelOptions::default())?;
    check_ng_relation_with(&bank, f)
}

pub fn check_ng_relation_with(bank: &KernelBank, f: &MixedTensorField) -> Result<f64> {
    let (k, l) = (f.k(), f.l());
    let g = sym_full(&apply_a(f)).to_mixed();
    let ng = expand_symmetric(&SymmetricTensorField::from_mixed(bank.apply(&g)?)?, k, l)?;
    let anf = apply_a(&bank.apply(f)?);
    let denom = anf.norm();
    if denom == 0.0 {
        return Ok(ng.norm());
    }
    Ok(ng.sub(&anf)?.norm() / denom)
}
