//! Far-field continuation of `N f` past the sampled box.
//!
//! Outside the support of `f`, `N f` is a sum of homogeneous kernels. A few point sources near the centre,
//! fitted by least squares on a ring just inside the box edge, reproduce its low multipoles; the fit then fills
//! the zero-padded region so the spectral inversion does not see a truncated 1/|x| tail.

use nalgebra::{DMatrix, DVector};
use ndarray::s;
use rayon::prelude::*;

use crate::fourier::zero_pad;
use crate::tensor::{ComponentIndex, MixedTensorField};

/// Ring width in cells and sampling stride within it.
const RING: usize = 8;
const STRIDE: usize = 2;
/// Sources sit on a `STENCIL × STENCIL` lattice spanning `±SPREAD` of the half-width.
const STENCIL: usize = 5;
const SPREAD: f64 = 0.4;

struct Model {
    m: usize,
    sources: Vec<[f64; 2]>,
    /// `gamma[b * sources.len() + s]` for input exponent `b` and source `s`.
    gamma: Vec<f64>,
}

impl Model {
    /// `Σ_b Σ_s P_{a+b}(x − c_s) γ_{b,s}` for every output exponent `a = 0..=m`.
    fn eval(&self, x: [f64; 2], kern: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        out.iter_mut().for_each(|v| *v = 0.0);
        for (s, c) in self.sources.iter().enumerate() {
            kernels(m, [x[0] - c[0], x[1] - c[1]], kern);
            for (a, o) in out.iter_mut().enumerate() {
                for b in 0..=m {
                    *o += kern[a + b] * self.gamma[b * self.sources.len() + s];
                }
            }
        }
    }
}

/// All `2m+1` monomial kernels at one point, sharing the powers.
fn kernels(m: usize, d: [f64; 2], out: &mut [f64]) {
    let r2 = d[0] * d[0] + d[1] * d[1];
    let scale = 2.0 / (r2.powi(m as i32) * r2.sqrt());
    out[2 * m] = 1.0;
    for e in (0..2 * m).rev() {
        out[e] = out[e + 1] * d[1];
    }
    let mut p1 = scale;
    for v in out.iter_mut() {
        *v *= p1;
        p1 *= d[0];
    }
}

fn out_exponent(k: usize, c: ComponentIndex) -> usize {
    (k - c.p) + c.q
}

fn out_sign(l: usize, c: ComponentIndex) -> f64 {
    if (l - c.q).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn fit(nf: &MixedTensorField) -> Option<Model> {
    let (k, l) = (nf.k(), nf.l());
    let m = k + l;
    let grid = nf.grid();
    let n = grid.nx;
    if n < 4 * RING {
        return None;
    }
    let (c0, a) = (grid.center(), grid.half_width());
    let sources: Vec<[f64; 2]> = (0..STENCIL * STENCIL)
        .map(|i| {
            let off = |u: usize| c0 + SPREAD * a * (2.0 * u as f64 / (STENCIL - 1) as f64 - 1.0);
            [off(i % STENCIL), off(i / STENCIL)]
        })
        .collect();
    let ring: Vec<(usize, usize)> = (0..n)
        .step_by(STRIDE)
        .flat_map(|i| (0..n).step_by(STRIDE).map(move |j| (i, j)))
        .filter(|&(i, j)| i.min(j).min(n - 1 - i).min(n - 1 - j) < RING)
        .collect();

    // Components sharing an output exponent carry the same data up to sign; average them.
    let mut target = vec![vec![0.0; ring.len()]; m + 1];
    let mut count = vec![0usize; m + 1];
    for c in ComponentIndex::all(k, l) {
        let (e, sg) = (out_exponent(k, c), out_sign(l, c));
        let plane = nf.plane(c.p, c.q);
        for (t, &(i, j)) in target[e].iter_mut().zip(&ring) {
            *t += sg * plane[[i, j]];
        }
        count[e] += 1;
    }
    let ns = sources.len();
    let rows = (m + 1) * ring.len();
    let cols = (m + 1) * ns;
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DVector::<f64>::zeros(rows);
    let mut kern = vec![0.0; 2 * m + 1];
    for (r, &(i, j)) in ring.iter().enumerate() {
        let x = [grid.coord(j), grid.coord(i)];
        for (s, c) in sources.iter().enumerate() {
            kernels(m, [x[0] - c[0], x[1] - c[1]], &mut kern);
            for a in 0..=m {
                for b in 0..=m {
                    design[(a * ring.len() + r, b * ns + s)] = kern[a + b];
                }
            }
        }
        for a in 0..=m {
            rhs[a * ring.len() + r] = target[a][r] / count[a] as f64;
        }
    }
    if rhs.amax() == 0.0 {
        return None;
    }
    let svd = design.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    let gamma = svd.solve(&rhs, eps).ok()?;
    Some(Model { m, sources, gamma: gamma.iter().copied().collect() })
}

/// Zero-pads `nf` by `pad` and fills everything outside the original box with a fitted far-field model.
/// Falls back to plain zero padding when the grid is too small to fit or the ring carries no signal.
pub(crate) fn extend(nf: &MixedTensorField, pad: usize) -> MixedTensorField {
    let mut out = zero_pad(nf, pad);
    if pad <= 1 {
        return out;
    }
    let Some(model) = fit(nf) else { return out };
    let (k, l) = (nf.k(), nf.l());
    let n = nf.grid().nx;
    let big = *out.grid();
    let big_n = big.nx;
    let o = (big_n - n) / 2;
    let comps: Vec<ComponentIndex> = ComponentIndex::all(k, l).collect();
    let rows: Vec<Vec<f64>> = (0..big_n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; comps.len() * big_n];
            let mut vals = vec![0.0; model.m + 1];
            let mut kern = vec![0.0; 2 * model.m + 1];
            let y = big.coord(i);
            let inside_rows = i >= o && i < o + n;
            for j in 0..big_n {
                if inside_rows && j >= o && j < o + n {
                    continue;
                }
                model.eval([big.coord(j), y], &mut kern, &mut vals);
                for (ci, c) in comps.iter().enumerate() {
                    row[ci * big_n + j] = out_sign(l, *c) * vals[out_exponent(k, *c)];
                }
            }
            row
        })
        .collect();
    let data = out.data_mut();
    for (i, row) in rows.iter().enumerate() {
        for ci in 0..comps.len() {
            let src = &row[ci * big_n..(ci + 1) * big_n];
            let mut dst = data.slice_mut(s![ci, i, ..]);
            if i >= o && i < o + n {
                dst.slice_mut(s![..o]).assign(&ndarray::ArrayView1::from(&src[..o]));
                dst.slice_mut(s![o + n..]).assign(&ndarray::ArrayView1::from(&src[o + n..]));
            } else {
                dst.assign(&ndarray::ArrayView1::from(src));
            }
        }
    }
    out
}
