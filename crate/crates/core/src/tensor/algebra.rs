use ndarray::Zip;

use super::{binom, ComponentIndex, MixedTensorField, SymmetricTensorField};
use crate::error::{Error, Result};

/// Full symmetrization σ of a `(k, ℓ)` field into a symmetric `(k+ℓ)` field.
pub fn sym_full(f: &MixedTensorField) -> SymmetricTensorField {
    let (k, l) = (f.k(), f.l());
    let m = k + l;
    let mut out = SymmetricTensorField::zeros(m, *f.grid());
    for t in 0..=m {
        let norm = binom(m, t);
        let mut dst = out.plane_mut(t);
        for p in t.saturating_sub(l)..=t.min(k) {
            let q = t - p;
            let c = binom(k, p) * binom(l, q) / norm;
            dst.scaled_add(c, &f.plane(p, q));
        }
    }
    out
}

/// Spreads a symmetric `(k+ℓ)` field over the `(k, ℓ)` layout: `G[p][q] = g[p+q]`.
pub fn expand_symmetric(g: &SymmetricTensorField, k: usize, l: usize) -> Result<MixedTensorField> {
    if g.m() != k + l {
        return Err(Error::Shape(format!("symmetric order {} cannot fill a ({k}, {l}) layout", g.m())));
    }
    let mut out = MixedTensorField::zeros(k, l, *g.grid());
    for ci in ComponentIndex::all(k, l) {
        out.plane_mut(ci.p, ci.q).assign(&g.plane(ci.p + ci.q));
    }
    Ok(out)
}

fn a_with_sign(f: &MixedTensorField, extra: usize) -> MixedTensorField {
    let l = f.l();
    let mut out = MixedTensorField::zeros(f.k(), l, *f.grid());
    for ci in ComponentIndex::all(f.k(), l) {
        let src = f.plane(ci.p, l - ci.q);
        let mut dst = out.plane_mut(ci.p, ci.q);
        if (ci.q + extra).is_multiple_of(2) {
            dst.assign(&src);
        } else {
            Zip::from(&mut dst).and(&src).for_each(|d, &s| *d = -s);
        }
    }
    out
}

/// The operator A: `(Af)[p][q] = (−1)^q f[p][ℓ−q]`. Rotates every second-group slot by a quarter turn.
pub fn apply_a(f: &MixedTensorField) -> MixedTensorField {
    a_with_sign(f, 0)
}

/// `A⁻¹ = (−1)^ℓ A`.
pub fn apply_a_inverse(f: &MixedTensorField) -> MixedTensorField {
    a_with_sign(f, f.l())
}

/// `AσA`, written back into the `(k, ℓ)` layout. Self-adjoint; it annihilates the range of λ.
pub fn asa(f: &MixedTensorField) -> MixedTensorField {
    let g = sym_full(&apply_a(f));
    apply_a(&expand_symmetric(&g, f.k(), f.l()).expect("orders match by construction"))
}

/// λ: `(k−1, ℓ−1)` → `(k, ℓ)`, the symmetrized product with the Kronecker delta.
pub fn lambda_op(w: &MixedTensorField) -> MixedTensorField {
    let (k, l) = (w.k() + 1, w.l() + 1);
    let kl = (k * l) as f64;
    let mut out = MixedTensorField::zeros(k, l, *w.grid());
    for ci in ComponentIndex::all(k, l) {
        let (p, q) = (ci.p, ci.q);
        let mut dst = out.plane_mut(p, q);
        if p < k && q < l {
            dst.scaled_add(((k - p) * (l - q)) as f64 / kl, &w.plane(p, q));
        }
        if p > 0 && q > 0 {
            dst.scaled_add((p * q) as f64 / kl, &w.plane(p - 1, q - 1));
        }
    }
    out
}

/// μ, the dual of λ: trace over one slot of each group.
pub fn mu_op(f: &MixedTensorField) -> Result<MixedTensorField> {
    let (k, l) = (f.k(), f.l());
    if k == 0 || l == 0 {
        return Err(Error::Order { what: "k >= 1 and l >= 1 for mu", k, l });
    }
    let mut out = MixedTensorField::zeros(k - 1, l - 1, *f.grid());
    for ci in ComponentIndex::all(k - 1, l - 1) {
        let mut dst = out.plane_mut(ci.p, ci.q);
        dst.assign(&f.plane(ci.p, ci.q));
        dst += &f.plane(ci.p + 1, ci.q + 1);
    }
    Ok(out)
}

/// Multiplicity-weighted L² inner product, pixel area included.
pub fn inner_product(a: &MixedTensorField, b: &MixedTensorField) -> Result<f64> {
    if !a.is_compatible(b) {
        return Err(Error::Shape(format!(
            "inner product of ({}, {}) and ({}, {}) fields or different grids",
            a.k(),
            a.l(),
            b.k(),
            b.l()
        )));
    }
    let mut total = 0.0;
    for ci in ComponentIndex::all(a.k(), a.l()) {
        let mut s = 0.0;
        for (x, y) in a.plane(ci.p, ci.q).iter().zip(b.plane(ci.p, ci.q).iter()) {
            s += x * y;
        }
        total += ci.weight(a.k(), a.l()) * s;
    }
    Ok(total * a.grid().pixel_area())
}

pub fn inner_product_sym(a: &SymmetricTensorField, b: &SymmetricTensorField) -> Result<f64> {
    if a.m() != b.m() || a.grid() != b.grid() {
        return Err(Error::Shape("inner product of symmetric fields with different order or grid".into()));
    }
    let mut total = 0.0;
    for t in 0..=a.m() {
        let mut s = 0.0;
        for (x, y) in a.plane(t).iter().zip(b.plane(t).iter()) {
            s += x * y;
        }
        total += binom(a.m(), t) * s;
    }
    Ok(total * a.grid().pixel_area())
}
