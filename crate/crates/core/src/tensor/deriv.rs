use ndarray::{Array2, ArrayView2, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{ComponentIndex, MixedTensorField, SymmetricTensorField};
use crate::error::{Error, Result};

/// How grid derivatives are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Second-order central differences, one-sided second-order stencils on the edges.
    #[default]
    Central2,
    /// Periodic Fourier differentiation with the Nyquist mode dropped.
    Spectral,
}

/// `∂f/∂x_dir` of one plane, `dir` ∈ {1, 2}.
pub fn partial(plane: ArrayView2<'_, f64>, dir: usize, h: f64, scheme: Scheme) -> Array2<f64> {
    let axis = match dir {
        1 => Axis(1),
        2 => Axis(0),
        _ => panic!("direction must be 1 or 2, got {dir}"),
    };
    let mut out = Array2::zeros(plane.raw_dim());
    match scheme {
        Scheme::Central2 => {
            for (src, mut dst) in plane.lanes(axis).into_iter().zip(out.lanes_mut(axis)) {
                let n = src.len();
                assert!(n >= 3, "central differences need at least 3 samples per axis");
                let inv = 1.0 / (2.0 * h);
                dst[0] = (4.0 * (src[1] - src[0]) - (src[2] - src[0])) * inv;
                for i in 1..n - 1 {
                    dst[i] = (src[i + 1] - src[i - 1]) * inv;
                }
                dst[n - 1] = (4.0 * (src[n - 1] - src[n - 2]) - (src[n - 1] - src[n - 3])) * inv;
            }
        }
        Scheme::Spectral => {
            let n = plane.len_of(axis);
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let scale = 2.0 * std::f64::consts::PI / (n as f64 * h) / n as f64;
            for (src, mut dst) in plane.lanes(axis).into_iter().zip(out.lanes_mut(axis)) {
                for (b, &v) in buf.iter_mut().zip(src.iter()) {
                    *b = Complex64::new(v, 0.0);
                }
                fwd.process(&mut buf);
                for (j, b) in buf.iter_mut().enumerate() {
                    let freq = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                    if n.is_multiple_of(2) && j == n / 2 {
                        *b = Complex64::new(0.0, 0.0);
                    } else {
                        *b *= Complex64::new(0.0, freq * scale);
                    }
                }
                inv.process(&mut buf);
                for (d, b) in dst.iter_mut().zip(buf.iter()) {
                    *d = b.re;
                }
            }
        }
    }
    out
}

/// d′: `(k−1, ℓ)` → `(k, ℓ)`, first-group symmetrized derivative.
pub fn dprime(u: &MixedTensorField, scheme: Scheme) -> MixedTensorField {
    let (k, l) = (u.k() + 1, u.l());
    let h = u.grid().h();
    let mut out = MixedTensorField::zeros(k, l, *u.grid());
    for ci in ComponentIndex::all(k, l) {
        let (p, q) = (ci.p, ci.q);
        let mut dst = out.plane_mut(p, q);
        if p < k {
            dst.scaled_add((k - p) as f64 / k as f64, &partial(u.plane(p, q), 1, h, scheme));
        }
        if p > 0 {
            dst.scaled_add(p as f64 / k as f64, &partial(u.plane(p - 1, q), 2, h, scheme));
        }
    }
    out
}

/// δ′, divergence over one first-group slot: `(k, ℓ)` → `(k−1, ℓ)`.
pub fn delta_prime(f: &MixedTensorField, scheme: Scheme) -> Result<MixedTensorField> {
    let (k, l) = (f.k(), f.l());
    if k == 0 {
        return Err(Error::Order { what: "k >= 1 for delta'", k, l });
    }
    let h = f.grid().h();
    let mut out = MixedTensorField::zeros(k - 1, l, *f.grid());
    for ci in ComponentIndex::all(k - 1, l) {
        let (p, q) = (ci.p, ci.q);
        let mut dst = out.plane_mut(p, q);
        dst.assign(&partial(f.plane(p, q), 1, h, scheme));
        dst += &partial(f.plane(p + 1, q), 2, h, scheme);
    }
    Ok(out)
}

/// Inner differentiation d of a symmetric field, `m` → `m+1`. Same recurrence as d′ with `ℓ = 0`.
pub fn inner_d(v: &SymmetricTensorField, scheme: Scheme) -> SymmetricTensorField {
    SymmetricTensorField::from_mixed(dprime(&v.to_mixed(), scheme)).expect("l stays 0")
}

/// Divergence δ of a symmetric field, `m` → `m−1`.
pub fn divergence(g: &SymmetricTensorField, scheme: Scheme) -> Result<SymmetricTensorField> {
    if g.m() == 0 {
        return Err(Error::Order { what: "m >= 1 for divergence", k: 0, l: 0 });
    }
    SymmetricTensorField::from_mixed(delta_prime(&g.to_mixed(), scheme)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn central_is_exact_on_quadratics() {
        let g = GridSpec::centered(16, 1.0).unwrap();
        let u = MixedTensorField::from_fn(0, 0, g, |_, x, y| x * x + 3.0 * x * y - y);
        let d1 = partial(u.plane(0, 0), 1, g.h(), Scheme::Central2);
        let d2 = partial(u.plane(0, 0), 2, g.h(), Scheme::Central2);
        let xs = g.coords();
        for i in 0..16 {
            for j in 0..16 {
                assert!((d1[[i, j]] - (2.0 * xs[j] + 3.0 * xs[i])).abs() < 1e-12);
                assert!((d2[[i, j]] - (3.0 * xs[j] - 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_differentiates_a_gaussian() {
        let g = GridSpec::centered(64, 1.0).unwrap();
        let s2 = 0.15f64 * 0.15;
        let u = MixedTensorField::from_fn(0, 0, g, |_, x, y| (-(x * x + y * y) / s2).exp());
        let d2 = partial(u.plane(0, 0), 2, g.h(), Scheme::Spectral);
        let xs = g.coords();
        let mut err: f64 = 0.0;
        for i in 0..64 {
            for j in 0..64 {
                let exact = -2.0 * xs[i] / s2 * (-(xs[i] * xs[i] + xs[j] * xs[j]) / s2).exp();
                err = err.max((d2[[i, j]] - exact).abs());
            }
        }
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn constants_have_zero_derivative() {
        let g = GridSpec::centered(8, 2.0).unwrap();
        let u = MixedTensorField::from_fn(1, 1, g, |c, _, _| 0.1 + c.p as f64 * 0.7 - c.q as f64 * 0.3);
        let d = dprime(&u, Scheme::Central2);
        assert_eq!(d.max_abs(), 0.0);
        let f = MixedTensorField::from_fn(2, 1, g, |_, _, _| 1.3);
        assert_eq!(delta_prime(&f, Scheme::Central2).unwrap().max_abs(), 0.0);
    }
}
