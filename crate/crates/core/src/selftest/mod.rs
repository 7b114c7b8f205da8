//! The invariant suite behind `mirt selftest`: every check names its module and invariant and carries the
//! measured value next to its threshold.

mod brute;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fourier::{decompose_mixed, default_calibration, invert_normal, rank_one_residual, theta, SpectralOptions};
use crate::geometry::{bilinear, SinogramGrid};
use crate::grid::GridSpec;
use crate::io;
use crate::metrics::central_rel_l2;
use crate::normal::{kernel_build, normal_by_convolution, DisplacementGrid, KernelBank, KernelOptions};
use crate::presets::{make_preset, PresetKind};
use crate::range::{contaminate, is_allowed, moment, moment_spectrum, parity_residual};
use crate::ray::{check_mirt_lrt_identity, mirt_forward, normal_by_backprojection};
use crate::tensor::{
    apply_a, asa, component_graph, delta_prime, dprime, inner_product, lambda_op, mu_op, partial, sym_full, ComponentIndex,
    MixedTensorField, Scheme,
};
use brute::Full;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub invariant: &'static str,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.threshold,
            Bound::AtLeast => self.value >= self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { k: 1, l: 1, n: 128, seed: 1 }
    }
}

/// Small grid for the all-orders algebra sweeps.
const SWEEP_N: usize = 32;
const SWEEP_MAX: usize = 3;

fn at_most(module: &'static str, invariant: &'static str, value: f64, threshold: f64) -> Check {
    Check { module, invariant, value, bound: Bound::AtMost, threshold }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_field(k: usize, l: usize, grid: GridSpec, rng: &mut ChaCha8Rng) -> MixedTensorField {
    MixedTensorField::from_fn(k, l, grid, |_, _, _| rng.random_range(-1.0..1.0))
}

fn pixel(f: &MixedTensorField, i: usize, j: usize) -> Vec<f64> {
    f.data().outer_iter().map(|p| p[[i, j]]).collect()
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn orders() -> impl Iterator<Item = (usize, usize)> {
    (0..=SWEEP_MAX).flat_map(|k| (0..=SWEEP_MAX).map(move |l| (k, l)))
}

fn tensor_core(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const M: &str = "tensor_core";
    let g = GridSpec::centered(SWEEP_N, 1.0)?;
    let (mut a2, mut lm, mut sa, mut kill, mut brute_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let pixels: Vec<(usize, usize)> = (0..6).map(|_| (rng.random_range(0..SWEEP_N), rng.random_range(0..SWEEP_N))).collect();
    for (k, l) in orders() {
        let f = random_field(k, l, g, rng);
        let h = random_field(k, l, g, rng);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        a2 = a2.max(apply_a(&apply_a(&f)).sub(&f.scaled(sign))?.max_abs());
        sa = sa.max(rel(inner_product(&asa(&f), &h)?, inner_product(&f, &asa(&h))?));

        let sf = sym_full(&f).to_mixed();
        let af = apply_a(&f);
        let planes = |f: &MixedTensorField, dir| -> Vec<Array2<f64>> {
            f.data().outer_iter().map(|p| partial(p, dir, f.grid().h(), Scheme::Central2)).collect()
        };
        let full_at = |k, l, planes: &[Array2<f64>], i, j| Full::expand(k, l, &planes.iter().map(|p| p[[i, j]]).collect::<Vec<_>>());
        for &(i, j) in &pixels {
            let full = Full::expand(k, l, &pixel(&f, i, j));
            brute_err = brute_err.max(max_rel(&pixel(&sf, i, j), &brute::sym(&full)));
            brute_err = brute_err.max(max_rel(&pixel(&af, i, j), &brute::apply_a(&full).canonical()));
        }
        if k >= 1 && l >= 1 {
            let w = random_field(k - 1, l - 1, g, rng);
            let lw = lambda_op(&w);
            let mf = mu_op(&f)?;
            lm = lm.max(rel(inner_product(&lw, &f)?, inner_product(&w, &mf)?));
            kill = kill.max(sym_full(&apply_a(&lw)).max_abs());
            for &(i, j) in &pixels {
                let full = Full::expand(k, l, &pixel(&f, i, j));
                let wf = Full::expand(k - 1, l - 1, &pixel(&w, i, j));
                brute_err = brute_err.max(max_rel(&pixel(&lw, i, j), &brute::lambda(&wf).canonical()));
                brute_err = brute_err.max(max_rel(&pixel(&mf, i, j), &brute::mu(&full).canonical()));
            }
        }
        if k >= 1 {
            let u = random_field(k - 1, l, g, rng);
            let du = dprime(&u, Scheme::Central2);
            let df = delta_prime(&f, Scheme::Central2)?;
            let (u1, u2, f1, f2) = (planes(&u, 1), planes(&u, 2), planes(&f, 1), planes(&f, 2));
            for &(i, j) in &pixels {
                let d = brute::dprime(&full_at(k - 1, l, &u1, i, j), &full_at(k - 1, l, &u2, i, j));
                brute_err = brute_err.max(max_rel(&pixel(&du, i, j), &d.canonical()));
                let d = brute::delta_prime(&full_at(k, l, &f1, i, j), &full_at(k, l, &f2, i, j));
                brute_err = brute_err.max(max_rel(&pixel(&df, i, j), &d.canonical()));
            }
        }
    }
    let disconnected = (1..=6).flat_map(|k| (1..=6).map(move |l| (k, l))).filter(|&(k, l)| !component_graph(k, l).connected).count();
    Ok(vec![
        at_most(M, "A applied twice is (-1)^l times identity", a2, 0.0),
        at_most(M, "<lambda w, f> = <w, mu f>", lm, 1e-12),
        at_most(M, "A sigma A is self-adjoint", sa, 1e-12),
        at_most(M, "sigma A annihilates the range of lambda", kill, 1e-14),
        at_most(M, "component formulas match index enumeration", brute_err, 1e-13),
        at_most(M, "component graph connected for 1 <= k,l <= 6", disconnected as f64, 0.0),
    ])
}

fn geometry_sampling(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const M: &str = "geometry_sampling";
    let g = GridSpec::centered(cfg.n, 1.0)?;
    let sigma = 8.0 * g.h();
    let c = [0.1, -0.05];
    let gauss = |x: f64, y: f64| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (sigma * sigma)).exp();
    let plane = Array2::from_shape_fn((cfg.n, cfg.n), |(i, j)| gauss(g.coord(j), g.coord(i)));
    let mut nodes = 0.0f64;
    let mut interp = 0.0f64;
    for _ in 0..2000 {
        let (i, j) = (rng.random_range(0..cfg.n), rng.random_range(0..cfg.n));
        nodes = nodes.max((bilinear(plane.view(), &g, [g.coord(j), g.coord(i)]) - plane[[i, j]]).abs());
        let x = [c[0] + rng.random_range(-3.0..3.0) * sigma, c[1] + rng.random_range(-3.0..3.0) * sigma];
        interp = interp.max((bilinear(plane.view(), &g, x) - gauss(x[0], x[1])).abs());
    }
    // (h²/8)(sup|∂₁²G| + sup|∂₂²G|) for G = exp(−|x|²/σ²).
    let bound = g.h().powi(2) / (2.0 * sigma * sigma);
    Ok(vec![
        at_most(M, "sampling is exact on grid nodes", nodes, 1e-15),
        at_most(M, "bilinear error on a Gaussian of width 8 pixels within its a-priori bound", interp, bound),
    ])
}

fn ray_transform(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const M: &str = "ray_transform";
    let (k, l) = (cfg.k, cfg.l);
    let g = GridSpec::centered(cfg.n, 1.0)?;
    let sino = SinogramGrid::for_field(&g, 180)?;
    let (spec, _) = make_preset(PresetKind::Gaussian, k, l, &g, cfg.seed)?;
    let parity = parity_residual(&mirt_forward(&spec, &sino)?)?;

    let f = random_field(k, l, g, rng);
    let h = random_field(k, l, g, rng);
    let (a, b) = (0.7, -1.3);
    let lhs = mirt_forward(&f.scaled(a).add(&h.scaled(b))?, &sino)?;
    let lf = mirt_forward(&f, &sino)?;
    let lh = mirt_forward(&h, &sino)?;
    let mut rhs = lf.clone();
    rhs.data_mut().zip_mut_with(lh.data(), |x, y| *x = a * *x + b * y);
    let linear = lhs.sub(&rhs)?.max_abs() / rhs.max_abs();

    let small = GridSpec::centered(SWEEP_N, 1.0)?;
    let ssino = SinogramGrid::for_field(&small, 36)?;
    let mut identity = 0.0f64;
    for (k, l) in orders() {
        let f = random_field(k, l, small, rng);
        identity = identity.max(check_mirt_lrt_identity(&f, &ssino)? / mirt_forward(&f, &ssino)?.max_abs());
    }
    Ok(vec![
        at_most(M, "antipodal parity of L f", parity, 1e-10),
        at_most(M, "L is linear", linear, 1e-13),
        at_most(M, "L_{k,l} f equals I(sigma A f), k,l <= 3", identity, 1e-12),
    ])
}

fn normal_conv(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const M: &str = "normal_conv";
    let (k, l) = (cfg.k, cfg.l);
    let g = GridSpec::centered(cfg.n, 1.0)?;
    let opts = KernelOptions::default();

    let dg = DisplacementGrid::new(17, g.h())?;
    let mut roles = 0.0f64;
    for out in ComponentIndex::all(k, l) {
        for inp in ComponentIndex::all(k, l) {
            let a = kernel_build(k, l, out, inp, &dg, &opts)?;
            let b = kernel_build(k, l, inp, out, &dg, &opts)?;
            let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            roles = roles.max((&a - &b).iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale);
        }
    }

    let bank = KernelBank::new(k + l, &g, &opts)?;
    let (_, f) = make_preset(PresetKind::Gaussian, k, l, &g, cfg.seed)?;
    let (_, h) = make_preset(PresetKind::Gaussian, k, l, &g, cfg.seed.wrapping_add(1))?;
    let selfadj = rel(inner_product(&bank.apply(&f)?, &h)?, inner_product(&f, &bank.apply(&h)?)?);

    let (spec, f) = make_preset(PresetKind::Gaussian, k, l, &g, rng.random())?;
    let conv = bank.apply(&f)?;
    let bp = normal_by_backprojection(&spec, &SinogramGrid::for_field(&g, 720)?, &g)?;
    Ok(vec![
        at_most(M, "kernel symmetric under exchange of index roles", roles, 1e-13),
        at_most(M, "N is self-adjoint", selfadj, 1e-6),
        at_most(M, "convolution agrees with backprojection on the central quarter", central_rel_l2(&conv, &bp), 0.02),
    ])
}

fn fourier_inversion(cfg: &SelftestConfig) -> Result<Vec<Check>> {
    const M: &str = "fourier_inversion";
    let (k, l) = (cfg.k, cfg.l);
    let g = GridSpec::centered(cfg.n, 1.0)?;

    let mut constraints = 0.0f64;
    for a in 0..64 {
        let t = std::f64::consts::TAU * (a as f64 + 0.37) / 64.0;
        let y = [2.3 * t.cos(), 2.3 * t.sin()];
        let th = theta(k, l, y).expect("nonzero frequency");
        let at = |p: usize, q: usize| th[p * (l + 1) + q];
        let norm: f64 = ComponentIndex::all(k, l).map(|c| c.weight(k, l) * at(c.p, c.q).powi(2)).sum();
        constraints = constraints.max((norm - 1.0).abs());
        let yh = [y[0] / 2.3, y[1] / 2.3];
        for c in ComponentIndex::all(k, l) {
            if c.p < k {
                constraints = constraints.max((yh[0] * at(c.p, c.q) + yh[1] * at(c.p + 1, c.q)).abs());
            }
            if c.p < k && c.q < l {
                constraints = constraints.max((at(c.p, c.q) + at(c.p + 1, c.q + 1)).abs());
            }
        }
    }

    let opts = SpectralOptions::default();
    let (_, f) = make_preset(PresetKind::Gaussian, k, l, &g, cfg.seed)?;
    let nf = normal_by_convolution(&f)?.field;
    let rank_one = rank_one_residual(&normal_by_convolution(&modulated(&f))?.field, 0.99, &opts);
    let (rec, _) = invert_normal(&nf, default_calibration(k, l), &opts)?;
    let inversion = central_rel_l2(&rec, &decompose_mixed(&f, &opts)?.fs);

    let (_, s) = make_preset(PresetKind::Gaussian, 0, 0, &g, cfg.seed)?;
    let (srec, _) = invert_normal(&normal_by_convolution(&s)?.field, default_calibration(0, 0), &opts)?;
    Ok(vec![
        at_most(M, "Theta unit norm, orthogonal to y in the first slot, trace-free", constraints, 1e-12),
        at_most(M, "normal operator spectrum parallel to Theta", rank_one, 5e-2),
        at_most(M, "inversion of N f matches the solenoidal part", inversion, 0.05),
        at_most(M, "scalar inversion reproduces the field", central_rel_l2(&srec, &s), 0.03),
    ])
}

/// Smooth fields put most of `N f` at the lowest frequencies, where the finite box dominates the spectrum.
/// The modulation moves the energy high enough to clear the box (`ωa ≥ 52`) while staying low enough that
/// aliasing of the kernel symbol stays small (`ωh ≥ 0.5` only once the grid is fine enough).
fn modulated(f: &MixedTensorField) -> MixedTensorField {
    let g = *f.grid();
    let w = (52.0 / g.half_width()).max(0.5 / g.h());
    let xs = g.coords();
    let mut out = f.clone();
    for mut plane in out.data_mut().outer_iter_mut() {
        for ((i, j), v) in plane.indexed_iter_mut() {
            *v *= (w * (xs[i] + 0.5 * xs[j])).cos();
        }
    }
    out
}

fn range_check(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    const M: &str = "range_check";
    let (k, l) = (cfg.k, cfg.l);
    let g = GridSpec::centered(cfg.n, 1.0)?;
    let sino = SinogramGrid::for_field(&g, 180)?;
    let mut parity = 0.0f64;
    let mut leakage = 0.0f64;
    let (generic, _) = make_preset(PresetKind::Gaussian, k, l, &g, rng.random())?;
    let mut specs = vec![generic.clone()];
    // Kernel presets alone have vanishing data, so they ride on a generic field.
    if k >= 1 {
        specs.push(generic.plus(&make_preset(PresetKind::Mixed, k, l, &g, rng.random())?.0)?);
    }
    let mut phis = Vec::new();
    for spec in &specs {
        let phi = mirt_forward(spec, &sino)?;
        parity = parity.max(parity_residual(&phi)?);
        for r in 0..=3 {
            leakage = leakage.max(moment_spectrum(&phi, r).leakage);
        }
        phis.push(phi);
    }
    let phi = &phis[0];
    let other = contaminate(phi, 2, 1.0);
    let mut sum = phi.clone();
    sum.data_mut().zip_mut_with(other.data(), |a, b| *a = 2.0 * *a - 0.5 * b);
    let (m1, m2, ms) = (moment(phi, 2), moment(&other, 2), moment(&sum, 2));
    let scale = ms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let linear = ms.iter().zip(m1.iter().zip(&m2)).fold(0.0f64, |m, (s, (a, b))| m.max((s - (2.0 * a - 0.5 * b)).abs())) / scale;
    let outside = |p: &crate::geometry::Sinogram| -> f64 {
        let s = moment_spectrum(p, 2);
        s.energies.iter().filter(|(f, _)| !is_allowed(*f, s.allowed_halfwidth)).map(|e| e.1).sum::<f64>().sqrt()
    };
    // Out-of-band amplitude obeys the triangle inequality: ‖out(2a − b/2)‖ ≤ 2‖out(a)‖ + ‖out(b)‖/2.
    let excess = outside(&sum) - (2.0 * outside(phi) + 0.5 * outside(&other));
    let bookkeeping = excess.max(0.0) / outside(&sum).max(f64::MIN_POSITIVE);
    let detected = (0..=3).map(|r| moment_spectrum(&contaminate(phi, r, 0.1), r).leakage).fold(f64::INFINITY, f64::min);
    Ok(vec![
        at_most(M, "parity of forward data", parity, 1e-8),
        at_most(M, "moment leakage of forward data for r <= 3", leakage, 1e-3),
        at_most(M, "moments are linear in the sinogram", linear, 1e-12),
        at_most(M, "out-of-band energy of a sum is bounded by its parts", bookkeeping, 1e-12),
        Check { module: M, invariant: "10% out-of-band contamination is detected", value: detected, bound: Bound::AtLeast, threshold: 0.009 },
    ])
}

fn cli_io(cfg: &SelftestConfig) -> Result<Vec<Check>> {
    const M: &str = "cli_io";
    let g = GridSpec::centered(cfg.n.min(64), 1.0)?;
    let (_, f) = make_preset(PresetKind::Gaussian, cfg.k, cfg.l, &g, cfg.seed)?;
    let bytes = io::encode_field(&f);
    let again = match io::decode(&bytes)? {
        io::FileContent::Mixed(h) => io::encode_field(&h),
        _ => Vec::new(),
    };
    let roundtrip = if again == bytes { 0.0 } else { 1.0 };
    let (_, f2) = make_preset(PresetKind::Gaussian, cfg.k, cfg.l, &g, cfg.seed)?;
    let deterministic = if io::encode_field(&f2) == bytes { 0.0 } else { 1.0 };
    Ok(vec![
        at_most(M, "field file round trip is byte-identical", roundtrip, 0.0),
        at_most(M, "same seed gives byte-identical synthesis", deterministic, 0.0),
    ])
}

/// Runs the whole suite. Errors are reserved for invalid configurations; failing invariants are reported in the checks.
pub fn run(cfg: &SelftestConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = tensor_core(&mut rng)?;
    out.extend(geometry_sampling(cfg, &mut rng)?);
    out.extend(ray_transform(cfg, &mut rng)?);
    out.extend(normal_conv(cfg, &mut rng)?);
    out.extend(fourier_inversion(cfg)?);
    out.extend(range_check(cfg, &mut rng)?);
    out.extend(cli_io(cfg)?);
    Ok(out)
}
