//! Spectral side: transforms of component planes, the unit tensor Θ(y), solenoidal projection, and the
//! inversion of the normal operator.
//!
//! Convention: `F(y) = ∫ f(x) e^{−i y·x} dx`, approximated by `h² Σ f(x_ij) e^{−i y·x_ij}` with the grid's
//! physical node positions. Convolution becomes a plain product, and the normal operator acts as
//! `N̂f(y) = (4π/|y|) ⟨f̂(y), Θ(y)⟩ Θ(y)`. Spectra are stored centred: index `u` holds frequency
//! `2π(u − ⌊N/2⌋)/(N h)`.

use std::f64::consts::PI;

use ndarray::{s, Array2, Array3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft2::Fft2;
use crate::geometry::SinogramGrid;
use crate::grid::GridSpec;
use crate::metrics::central_gain;
use crate::normal::normal_by_convolution;
use crate::presets::{make_preset_with, PresetKind, PresetParams};
use crate::ray::mirt_forward;
use crate::tensor::{
    apply_a, apply_a_inverse, binom, delta_prime, expand_symmetric, mu_op, n_components, sym_full, ComponentIndex,
    MixedTensorField, Scheme, SymmetricTensorField,
};

/// What to do with the zero-frequency bin, where Θ is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DcPolicy {
    /// Drop it. A compactly supported field's solenoidal part decays at infinity, so this is the
    /// consistent choice for non-scalar fields.
    #[default]
    Zero,
    /// Keep the input's DC value unchanged.
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralOptions {
    /// Zero-padding factor applied before transforming. `1` treats the grid as a torus.
    pub pad: usize,
    pub dc: DcPolicy,
    /// Before inverting the normal operator, fill the padding with a fitted continuation of the far field
    /// instead of zeros.
    pub extend_tail: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { pad: 4, dc: DcPolicy::Zero, extend_tail: true }
    }
}

impl SpectralOptions {
    pub fn torus() -> Self {
        SpectralOptions { pad: 1, dc: DcPolicy::Zero, extend_tail: false }
    }
}

/// Component planes in the frequency domain, centred layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyField {
    k: usize,
    l: usize,
    grid: GridSpec,
    data: Array3<Complex64>,
}

impl FrequencyField {
    pub fn zeros(k: usize, l: usize, grid: GridSpec) -> Self {
        FrequencyField { k, l, grid, data: Array3::zeros((n_components(k, l), grid.ny, grid.nx)) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// The spatial grid this spectrum belongs to (after any padding).
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &Array3<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.data
    }

    pub fn n(&self) -> usize {
        self.grid.nx
    }

    /// Angular frequency of centred index `u`.
    pub fn freq(&self, u: usize) -> f64 {
        let n = self.n();
        2.0 * PI * (u as f64 - (n / 2) as f64) / (n as f64 * self.grid.h())
    }

    /// `(y₁, y₂)` at row `i`, column `j`.
    pub fn y(&self, i: usize, j: usize) -> [f64; 2] {
        [self.freq(j), self.freq(i)]
    }

    pub fn dc_index(&self) -> (usize, usize) {
        (self.n() / 2, self.n() / 2)
    }

    /// True on the unpaired Nyquist row/column of an even grid.
    pub fn is_nyquist(&self, i: usize, j: usize) -> bool {
        self.n().is_multiple_of(2) && (i == 0 || j == 0)
    }

    pub fn get(&self, c: ComponentIndex, i: usize, j: usize) -> Complex64 {
        self.data[[c.offset(self.l), i, j]]
    }
}

fn phase_plan(grid: &GridSpec) -> (Fft2, Vec<Complex64>, Vec<usize>) {
    let n = grid.nx;
    let x0 = grid.coord(0);
    let half = n / 2;
    // bins[u]: uncentred DFT bin holding centred index u; phase[u]: e^{−i y_u x0}.
    let bins = (0..n).map(|u| (u + n - half) % n).collect();
    let phase = (0..n)
        .map(|u| {
            let y = 2.0 * PI * (u as f64 - half as f64) / (n as f64 * grid.h());
            Complex64::from_polar(1.0, -y * x0)
        })
        .collect();
    (Fft2::new(n, n), phase, bins)
}

/// Centred continuous-convention spectrum of every plane.
pub fn fft_field(f: &MixedTensorField) -> FrequencyField {
    let grid = *f.grid();
    let n = grid.nx;
    let (plan, phase, bins) = phase_plan(&grid);
    let area = grid.pixel_area();
    let planes: Vec<Array2<Complex64>> = f
        .data()
        .outer_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let mut buf = p.mapv(|v| Complex64::new(v, 0.0));
            plan.forward(&mut buf);
            Array2::from_shape_fn((n, n), |(i, j)| buf[[bins[i], bins[j]]] * phase[i] * phase[j] * area)
        })
        .collect();
    let mut out = FrequencyField::zeros(f.k(), f.l(), grid);
    for (c, p) in planes.into_iter().enumerate() {
        out.data.slice_mut(s![c, .., ..]).assign(&p);
    }
    out
}

/// Inverse of [`fft_field`]; the imaginary part is discarded.
pub fn ifft_field(spec: &FrequencyField) -> MixedTensorField {
    let grid = spec.grid;
    let n = grid.nx;
    let (plan, phase, bins) = phase_plan(&grid);
    let scale = 1.0 / (n as f64 * n as f64 * grid.pixel_area());
    let planes: Vec<Array2<f64>> = spec
        .data
        .outer_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| {
            let mut buf = Array2::<Complex64>::zeros((n, n));
            for ((i, j), v) in p.indexed_iter() {
                buf[[bins[i], bins[j]]] = v * phase[i].conj() * phase[j].conj();
            }
            plan.inverse(&mut buf);
            buf.mapv(|v| v.re * scale)
        })
        .collect();
    let mut out = MixedTensorField::zeros(spec.k, spec.l, grid);
    for (c, p) in planes.into_iter().enumerate() {
        out.data_mut().slice_mut(s![c, .., ..]).assign(&p);
    }
    out
}

fn padded_grid(grid: &GridSpec, pad: usize) -> (GridSpec, usize) {
    let n = grid.nx;
    let big = n * pad.max(1);
    let o = (big - n) / 2;
    let h = grid.h();
    let x_min = grid.x_min - o as f64 * h;
    (GridSpec { nx: big, ny: big, x_min, x_max: x_min + big as f64 * h }, o)
}

/// `f` embedded in a zero field `pad` times larger, centred.
pub fn zero_pad(f: &MixedTensorField, pad: usize) -> MixedTensorField {
    let (big, o) = padded_grid(f.grid(), pad);
    let n = f.grid().nx;
    let mut out = MixedTensorField::zeros(f.k(), f.l(), big);
    out.data_mut().slice_mut(s![.., o..o + n, o..o + n]).assign(f.data());
    out
}

/// The central `grid`-sized window of a padded field.
pub fn crop(f: &MixedTensorField, grid: &GridSpec) -> MixedTensorField {
    let o = (f.grid().nx - grid.nx) / 2;
    let data = f.data().slice(s![.., o..o + grid.nx, o..o + grid.nx]).to_owned();
    MixedTensorField::from_array(f.k(), f.l(), *grid, data).expect("cropped samples stay finite")
}

/// `Θ(y)` components, `(−ŷ₂)^{k−p} ŷ₁^{p+ℓ−q} ŷ₂^q`; `None` at `y = 0`.
pub fn theta(k: usize, l: usize, y: [f64; 2]) -> Option<Vec<f64>> {
    let r = y[0].hypot(y[1]);
    if r == 0.0 {
        return None;
    }
    let (e1, e2) = (y[0] / r, y[1] / r);
    Some(
        ComponentIndex::all(k, l)
            .map(|c| (-e2).powi((k - c.p) as i32) * e1.powi((c.p + l - c.q) as i32) * e2.powi(c.q as i32))
            .collect(),
    )
}

fn weights(k: usize, l: usize) -> Vec<f64> {
    ComponentIndex::all(k, l).map(|c| c.weight(k, l)).collect()
}

/// Builds `c(y)·Θ(y)` on the frequency lattice of `grid`, zero at DC and on the Nyquist lines.
pub fn theta_field(k: usize, l: usize, grid: &GridSpec, c: impl Fn([f64; 2]) -> Complex64) -> FrequencyField {
    let mut out = FrequencyField::zeros(k, l, *grid);
    let n = grid.nx;
    for i in 0..n {
        for j in 0..n {
            if out.is_nyquist(i, j) {
                continue;
            }
            let y = out.y(i, j);
            if let Some(th) = theta(k, l, y) {
                let cv = c(y);
                for (comp, t) in th.iter().enumerate() {
                    out.data[[comp, i, j]] = cv * t;
                }
            }
        }
    }
    out
}

/// Solenoidal part of a symmetric field: at each frequency, the component along `η̂^{⊗m}`, `η̂ = (−ŷ₂, ŷ₁)`.
pub fn solenoidal_project_sym(g: &SymmetricTensorField, opts: &SpectralOptions) -> SymmetricTensorField {
    if g.m() == 0 {
        return g.clone();
    }
    let out = crop(&solenoidal_project_sym_padded(g, opts).to_mixed(), g.grid());
    SymmetricTensorField::from_mixed(out).expect("l stays 0")
}

/// [`solenoidal_project_sym`] on the whole padded grid, before cropping.
fn solenoidal_project_sym_padded(g: &SymmetricTensorField, opts: &SpectralOptions) -> SymmetricTensorField {
    let m = g.m();
    let mixed = g.to_mixed();
    if m == 0 {
        return SymmetricTensorField::from_mixed(zero_pad(&mixed, opts.pad)).expect("l stays 0");
    }
    let mut spec = fft_field(&zero_pad(&mixed, opts.pad));
    let w: Vec<f64> = (0..=m).map(|t| binom(m, t)).collect();
    project_bins(&mut spec, opts.dc, |y, v| {
        let r = y[0].hypot(y[1]);
        let eta = [-y[1] / r, y[0] / r];
        let e: Vec<f64> = (0..=m).map(|t| eta[0].powi((m - t) as i32) * eta[1].powi(t as i32)).collect();
        let c: Complex64 = (0..=m).map(|t| w[t] * e[t] * v[t]).sum();
        for t in 0..=m {
            v[t] = c * e[t];
        }
    });
    SymmetricTensorField::from_mixed(ifft_field(&spec)).expect("l stays 0")
}

/// `f^s = (−1)^ℓ A · P_sol(σAf)`: the divergence-free, trace-free part of a mixed field.
pub fn solenoidal_part(f: &MixedTensorField, opts: &SpectralOptions) -> MixedTensorField {
    crop(&solenoidal_part_padded(f, opts), f.grid())
}

/// `f^s` on the padded grid. Its `1/|x|^2` tail reaches past the original box.
fn solenoidal_part_padded(f: &MixedTensorField, opts: &SpectralOptions) -> MixedTensorField {
    let gs = solenoidal_project_sym_padded(&sym_full(&apply_a(f)), opts);
    apply_a_inverse(&expand_symmetric(&gs, f.k(), f.l()).expect("orders match"))
}

/// The same projection done directly with Θ: `f̂^s = ⟨f̂, Θ⟩ Θ`.
pub fn solenoidal_part_theta(f: &MixedTensorField, opts: &SpectralOptions) -> MixedTensorField {
    let (k, l) = (f.k(), f.l());
    if k + l == 0 {
        return f.clone();
    }
    let w = weights(k, l);
    let mut spec = fft_field(&zero_pad(f, opts.pad));
    project_bins(&mut spec, opts.dc, |y, v| {
        let th = theta(k, l, y).expect("non-DC bin");
        let c: Complex64 = v.iter().zip(&th).zip(&w).map(|((a, t), w)| a * t * w).sum();
        for (a, t) in v.iter_mut().zip(&th) {
            *a = c * t;
        }
    });
    crop(&ifft_field(&spec), f.grid())
}

fn project_bins(spec: &mut FrequencyField, dc: DcPolicy, mut f: impl FnMut([f64; 2], &mut [Complex64])) {
    let n = spec.n();
    let (di, dj) = spec.dc_index();
    let nc = spec.data.shape()[0];
    let mut buf = vec![Complex64::new(0.0, 0.0); nc];
    for i in 0..n {
        for j in 0..n {
            let zero = spec.is_nyquist(i, j) || ((i, j) == (di, dj) && dc == DcPolicy::Zero);
            if zero {
                for c in 0..nc {
                    spec.data[[c, i, j]] = Complex64::new(0.0, 0.0);
                }
                continue;
            }
            if (i, j) == (di, dj) {
                continue;
            }
            for c in 0..nc {
                buf[c] = spec.data[[c, i, j]];
            }
            f(spec.y(i, j), &mut buf);
            for c in 0..nc {
                spec.data[[c, i, j]] = buf[c];
            }
        }
    }
}

/// Residual norms of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// `‖δ′f^s‖` on the padded grid, spectral derivatives (zero when `k = 0`).
    pub norm_delta_prime_fs: f64,
    /// `‖μf^s‖` (zero when `k = 0` or `ℓ = 0`).
    pub norm_mu_fs: f64,
    /// `sup |L f − L f^s|` over a coarse sinogram whose lines run across the padded grid.
    pub norm_l_residual: f64,
    pub norm_f: f64,
    pub max_abs_lf: f64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub fs: MixedTensorField,
    pub report: DecompositionReport,
}

/// `f^s` together with a report on how well it satisfies the two constraints and matches `f`'s transform.
pub fn decompose_mixed(f: &MixedTensorField, opts: &SpectralOptions) -> Result<Decomposition> {
    // Residuals are taken on the padded grid: cropping cuts the tail of f^s, which neither δ′ nor L ignores.
    let big = solenoidal_part_padded(f, opts);
    let fs = crop(&big, f.grid());
    let norm_delta_prime_fs = if f.k() >= 1 { delta_prime(&big, Scheme::Spectral)?.norm() } else { 0.0 };
    let norm_mu_fs = if f.k() >= 1 && f.l() >= 1 { mu_op(&big)?.norm() } else { 0.0 };
    let box_lines = SinogramGrid::for_field(f.grid(), 64)?;
    let sg = SinogramGrid::with_offsets(big.grid(), box_lines.ns, box_lines.s_max, 64)?;
    let lf = mirt_forward(f, &sg)?;
    let lfs = mirt_forward(&big, &sg)?;
    let norm_l_residual = lf.sub(&lfs)?.max_abs();
    let report = DecompositionReport { norm_delta_prime_fs, norm_mu_fs, norm_l_residual, norm_f: f.norm(), max_abs_lf: lf.max_abs() };
    Ok(Decomposition { fs, report })
}

/// Closed-form inversion constant
/// `(−1)^m ((2m−1)!!)² / 4^{m−1} · π Γ(−m−½) / Γ(m+½)` with `m = k+ℓ`. It equals `−8π/(2m+1)`.
pub fn b_paper(k: usize, l: usize) -> f64 {
    use statrs::function::gamma::gamma;
    let m = (k + l) as i32;
    let dfact: f64 = (1..=(2 * m - 1).max(1)).step_by(2).map(|v| v as f64).product();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * dfact * dfact / 4f64.powi(m - 1) * PI * gamma(-(m as f64) - 0.5) / gamma(m as f64 + 0.5)
}

/// Calibration that turns [`b_paper`] into the constant `4π` of this crate's transform convention:
/// `4π / b_paper = −(2m+1)/2`.
pub fn default_calibration(k: usize, l: usize) -> f64 {
    -((2 * (k + l) + 1) as f64) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionReport {
    /// Constant actually divided by, `b_paper · calibration`.
    pub b: f64,
    /// Fraction of the (weighted) spectral energy of the input that sat in the discarded DC bin.
    pub dc_energy_fraction: f64,
}

/// `nf` on the padded grid of `opts`: zeros outside the box, or a fitted far-field continuation when
/// `opts.extend_tail` is set.
pub fn continue_far_field(nf: &MixedTensorField, opts: &SpectralOptions) -> MixedTensorField {
    if opts.extend_tail {
        crate::tail::extend(nf, opts.pad)
    } else {
        zero_pad(nf, opts.pad)
    }
}

/// Recovers `f^s` from `N_{k,ℓ} f`: `ĉ = (|y|/b)⟨N̂f, Θ⟩`, `f̂^s = ĉ Θ`, with `b = b_paper(k,ℓ)·calibration`.
pub fn invert_normal(nf: &MixedTensorField, calibration: f64, opts: &SpectralOptions) -> Result<(MixedTensorField, InversionReport)> {
    if !(calibration.is_finite() && calibration != 0.0) {
        return Err(Error::Invalid(format!("calibration must be finite and nonzero, got {calibration}")));
    }
    let (k, l) = (nf.k(), nf.l());
    let b = b_paper(k, l) * calibration;
    let w = weights(k, l);
    let mut spec = fft_field(&continue_far_field(nf, opts));
    let (di, dj) = spec.dc_index();
    let energy = |v: ndarray::ArrayView3<Complex64>, i: usize, j: usize| -> f64 {
        (0..w.len()).map(|c| w[c] * v[[c, i, j]].norm_sqr()).sum()
    };
    let dc = energy(spec.data.view(), di, dj);
    let mut total = 0.0;
    for i in 0..spec.n() {
        for j in 0..spec.n() {
            total += energy(spec.data.view(), i, j);
        }
    }
    project_bins(&mut spec, DcPolicy::Zero, |y, v| {
        let th = theta(k, l, y).expect("non-DC bin");
        let r = y[0].hypot(y[1]);
        let c: Complex64 = v.iter().zip(&th).zip(&w).map(|((a, t), w)| a * t * w).sum::<Complex64>() * (r / b);
        for (a, t) in v.iter_mut().zip(&th) {
            *a = c * t;
        }
    });
    let out = crop(&ifft_field(&spec), nf.grid());
    let dc_energy_fraction = if total > 0.0 { dc / total } else { 0.0 };
    Ok((out, InversionReport { b, dc_energy_fraction }))
}

/// Largest `|h[p][q] − (−1)^p (y₁/y₂)^{p−q} h[0][0]| / |h[0][0]|` over bins away from the axes
/// (`|y₁|, |y₂| > tol·|y|`) where `h[0][0]` is not negligible.
pub fn check_component_propagation(h: &FrequencyField, tol: f64) -> f64 {
    let (k, l) = (h.k, h.l);
    let n = h.n();
    let h00 = h.data.slice(s![0, .., ..]);
    let peak = h00.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let y = h.y(i, j);
            let r = y[0].hypot(y[1]);
            if r == 0.0 || y[0].abs() <= tol * r || y[1].abs() <= tol * r {
                continue;
            }
            let base = h00[[i, j]];
            if base.norm() <= 1e-12 * peak {
                continue;
            }
            let ratio = y[0] / y[1];
            for c in ComponentIndex::all(k, l) {
                let sign = if c.p % 2 == 0 { 1.0 } else { -1.0 };
                let pred = base * sign * ratio.powi(c.p as i32 - c.q as i32);
                worst = worst.max((h.get(c, i, j) - pred).norm() / base.norm());
            }
        }
    }
    worst
}

/// How far the spectrum of `nf` is from being parallel to Θ at each frequency:
/// `sqrt(Σ‖n̂ − ⟨n̂,Θ⟩Θ‖² / Σ‖n̂‖²)` over the most energetic bins holding `energy_fraction` of the total.
/// The field is continued past the box as in [`invert_normal`] with `opts`, so the cut-off far field does not
/// count against it.
pub fn rank_one_residual(nf: &MixedTensorField, energy_fraction: f64, opts: &SpectralOptions) -> f64 {
    let (k, l) = (nf.k(), nf.l());
    let w = weights(k, l);
    let spec = fft_field(&continue_far_field(nf, opts));
    let n = spec.n();
    let (di, dj) = spec.dc_index();
    let mut bins = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if spec.is_nyquist(i, j) || (i, j) == (di, dj) {
                continue;
            }
            let th = theta(k, l, spec.y(i, j)).expect("non-DC bin");
            let v: Vec<Complex64> = (0..w.len()).map(|c| spec.data[[c, i, j]]).collect();
            let c: Complex64 = v.iter().zip(&th).zip(&w).map(|((a, t), w)| a * t * w).sum();
            let e: f64 = v.iter().zip(&w).map(|(a, w)| w * a.norm_sqr()).sum();
            let r: f64 = v.iter().zip(&th).zip(&w).map(|((a, t), w)| w * (a - c * t).norm_sqr()).sum();
            bins.push((e, r));
        }
    }
    bins.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = bins.iter().map(|b| b.0).sum();
    if total == 0.0 {
        return 0.0;
    }
    let (mut e_acc, mut r_acc) = (0.0, 0.0);
    for (e, r) in bins {
        e_acc += e;
        r_acc += r;
        if e_acc >= energy_fraction * total {
            break;
        }
    }
    (r_acc / e_acc).sqrt()
}

/// Probe fields used by [`calibrate`]: wide Gaussians, so the measurement barely depends on resolution.
pub fn calibration_probe() -> PresetParams {
    PresetParams { sigma_min: 0.14, sigma_max: 0.16, ..PresetParams::default() }
}

/// Measures the calibration scalar on a grid: the least-squares gain of `invert_normal(N f, 1)` against `f^s`
/// on the central quarter, for a seeded probe field. A correct convention gives [`default_calibration`].
pub fn calibrate(k: usize, l: usize, grid: &GridSpec, seed: u64) -> Result<f64> {
    let (_, f) = make_preset_with(PresetKind::Gaussian, k, l, grid, seed, &calibration_probe())?;
    let opts = SpectralOptions::default();
    let nf = normal_by_convolution(&f)?.field;
    let (rec, _) = invert_normal(&nf, 1.0, &opts)?;
    let fs = solenoidal_part(&f, &opts);
    Ok(central_gain(&rec, &fs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_report_sees_the_tail() {
        let g = GridSpec::centered(64, 1.0).unwrap();
        let (_, f) = crate::presets::make_preset(PresetKind::Gaussian, 2, 1, &g, 3).unwrap();
        let d = decompose_mixed(&f, &SpectralOptions::default()).unwrap();
        let r = d.report;
        assert!(r.norm_delta_prime_fs <= 1e-12 * d.fs.norm(), "{r:?}");
        assert!(r.norm_l_residual <= 5e-2 * r.max_abs_lf, "{r:?}");
    }

    #[test]
    fn b_closed_form() {
        for m in 0..7usize {
            let want = -8.0 * PI / (2 * m + 1) as f64;
            assert!((b_paper(m, 0) - want).abs() < 1e-12 * want.abs(), "m={m}");
            assert!((b_paper(0, m) * default_calibration(0, m) - 4.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_constraints() {
        for (k, l) in [(1, 0), (0, 2), (2, 1), (3, 3)] {
            let y = [0.37, -1.21];
            let th = theta(k, l, y).unwrap();
            let w = weights(k, l);
            let norm: f64 = th.iter().zip(&w).map(|(t, w)| w * t * t).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        assert!(theta(1, 1, [0.0, 0.0]).is_none());
    }

    #[test]
    fn roundtrip() {
        let g = GridSpec::new(32, -0.7, 1.3).unwrap();
        let f = MixedTensorField::from_fn(1, 1, g, |c, x, y| (x * 3.0 + c.p as f64).sin() * (y - c.q as f64).cos());
        let back = ifft_field(&fft_field(&f));
        let err = back.sub(&f).unwrap().max_abs();
        assert!(err < 1e-12 * f.max_abs());
    }

    #[test]
    fn gaussian_transform() {
        let g = GridSpec::centered(128, 1.0).unwrap();
        let sigma: f64 = 0.12;
        let f = MixedTensorField::from_fn(0, 0, g, |_, x, y| (-(x * x + y * y) / (sigma * sigma)).exp());
        let spec = fft_field(&f);
        let mut err: f64 = 0.0;
        for i in 16..112 {
            for j in 16..112 {
                let y = spec.y(i, j);
                let exact = PI * sigma * sigma * (-sigma * sigma * (y[0] * y[0] + y[1] * y[1]) / 4.0).exp();
                err = err.max((spec.data()[[0, i, j]] - exact).norm());
            }
        }
        assert!(err < 1e-8 * PI * sigma * sigma, "{err}");
    }

    #[test]
    fn hermitian_for_real_input() {
        let g = GridSpec::centered(16, 1.0).unwrap();
        let f = MixedTensorField::from_fn(0, 0, g, |_, x, y| (x - 0.3 * y).exp() * (5.0 * y).sin());
        let spec = fft_field(&f);
        let n = 16;
        let mut worst: f64 = 0.0;
        for i in 1..n {
            for j in 1..n {
                let a = spec.data()[[0, i, j]];
                let b = spec.data()[[0, n - i, n - j]];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        assert!(worst < 1e-13 * spec.data().iter().fold(0.0f64, |m, v| m.max(v.norm())));
    }

    #[test]
    fn delta_has_flat_modulus() {
        let g = GridSpec::centered(8, 1.0).unwrap();
        let mut f = MixedTensorField::zeros(0, 0, g);
        f.data_mut()[[0, 3, 5]] = 1.0;
        let spec = fft_field(&f);
        for v in spec.data().iter() {
            assert!((v.norm() - g.pixel_area()).abs() < 1e-15);
        }
    }

    #[test]
    fn vector_projector_at_y_axis() {
        // At y = (1, 0), η̂ = (0, 1): the projector keeps component 2 and removes component 1.
        let th = theta(1, 0, [1.0, 0.0]).unwrap();
        assert_eq!(th, vec![-0.0, 1.0]);
    }
}
