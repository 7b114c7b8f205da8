//! Component-indexed mixed and symmetric tensor fields on a 2D grid.
//!
//! A `(k, ℓ)` field is symmetric in its first `k` and last `ℓ` indices, so it is fully described by the
//! components `f[p][q]` with `p` twos in the first group and `q` twos in the second. Only those
//! `(k+1)(ℓ+1)` planes are stored; contractions weight them by `C(k,p)·C(ℓ,q)`.

mod algebra;
mod deriv;
mod graph;

pub use algebra::{
    apply_a, apply_a_inverse, asa, expand_symmetric, inner_product, inner_product_sym, lambda_op, mu_op,
    sym_full,
};
pub use deriv::{delta_prime, divergence, dprime, inner_d, partial, Scheme};
pub use graph::{component_graph, ComponentGraph, EdgeColor};

use ndarray::{s, Array3, ArrayView2, ArrayViewMut2};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Binomial coefficient as a float. Exact for every order this crate can reasonably use.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

pub fn n_components(k: usize, l: usize) -> usize {
    (k + 1) * (l + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentIndex {
    pub p: usize,
    pub q: usize,
}

impl ComponentIndex {
    pub fn new(p: usize, q: usize) -> Self {
        ComponentIndex { p, q }
    }

    pub fn offset(self, l: usize) -> usize {
        self.p * (l + 1) + self.q
    }

    pub fn from_offset(c: usize, l: usize) -> Self {
        ComponentIndex { p: c / (l + 1), q: c % (l + 1) }
    }

    pub fn weight(self, k: usize, l: usize) -> f64 {
        binom(k, self.p) * binom(l, self.q)
    }

    /// All indices of a `(k, ℓ)` layout in storage order.
    pub fn all(k: usize, l: usize) -> impl Iterator<Item = ComponentIndex> {
        (0..=k).flat_map(move |p| (0..=l).map(move |q| ComponentIndex { p, q }))
    }
}

fn check_finite(data: &Array3<f64>) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invalid("field contains NaN or infinite samples".into()))
    }
}

fn check_shape(data: &Array3<f64>, ncomp: usize, grid: &GridSpec) -> Result<()> {
    let want = [ncomp, grid.ny, grid.nx];
    if data.shape() != want {
        return Err(Error::Shape(format!("expected array {:?}, got {:?}", want, data.shape())));
    }
    Ok(())
}

/// Grid samples of a `(k, ℓ)` mixed tensor field, planes in `c = p·(ℓ+1)+q` order.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTensorField {
    k: usize,
    l: usize,
    grid: GridSpec,
    data: Array3<f64>,
}

impl MixedTensorField {
    pub fn zeros(k: usize, l: usize, grid: GridSpec) -> Self {
        let data = Array3::zeros((n_components(k, l), grid.ny, grid.nx));
        MixedTensorField { k, l, grid, data }
    }

    pub fn from_array(k: usize, l: usize, grid: GridSpec, data: Array3<f64>) -> Result<Self> {
        grid.validate()?;
        check_shape(&data, n_components(k, l), &grid)?;
        check_finite(&data)?;
        Ok(MixedTensorField { k, l, grid, data })
    }

    /// Fills every plane from a closure of `(component, x₁, x₂)`.
    pub fn from_fn(k: usize, l: usize, grid: GridSpec, mut f: impl FnMut(ComponentIndex, f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(k, l, grid);
        let xs = grid.coords();
        for ci in ComponentIndex::all(k, l) {
            let mut plane = out.plane_mut(ci.p, ci.q);
            for (i, row) in plane.outer_iter_mut().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    *v = f(ci, xs[j], xs[i]);
                }
            }
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn order(&self) -> usize {
        self.k + self.l
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<f64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array3<f64> {
        self.data
    }

    pub fn n_components(&self) -> usize {
        n_components(self.k, self.l)
    }

    pub fn plane(&self, p: usize, q: usize) -> ArrayView2<'_, f64> {
        self.data.slice(s![p * (self.l + 1) + q, .., ..])
    }

    pub fn plane_mut(&mut self, p: usize, q: usize) -> ArrayViewMut2<'_, f64> {
        let c = p * (self.l + 1) + q;
        self.data.slice_mut(s![c, .., ..])
    }

    /// Plane `(p, q)` or `None` when the index falls outside the layout (reads as zero).
    pub fn try_plane(&self, p: isize, q: isize) -> Option<ArrayView2<'_, f64>> {
        if p < 0 || q < 0 || p as usize > self.k || q as usize > self.l {
            None
        } else {
            Some(self.plane(p as usize, q as usize))
        }
    }

    pub fn weight(&self, p: usize, q: usize) -> f64 {
        binom(self.k, p) * binom(self.l, q)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Weighted L² norm, `sqrt(⟨f, f⟩)`.
    pub fn norm(&self) -> f64 {
        inner_product(self, self).map(f64::sqrt).unwrap_or(0.0)
    }

    pub fn is_compatible(&self, other: &MixedTensorField) -> bool {
        self.k == other.k && self.l == other.l && self.grid == other.grid
    }

    pub fn scaled(&self, a: f64) -> Self {
        MixedTensorField { data: &self.data * a, ..self.clone() }
    }

    pub fn add(&self, other: &MixedTensorField) -> Result<Self> {
        if !self.is_compatible(other) {
            return Err(Error::Shape("adding fields of different layout".into()));
        }
        Ok(MixedTensorField { data: &self.data + &other.data, ..self.clone() })
    }

    pub fn sub(&self, other: &MixedTensorField) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }
}

/// Grid samples of a symmetric `m`-tensor field; plane `t` holds the component with `t` twos.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensorField {
    m: usize,
    grid: GridSpec,
    data: Array3<f64>,
}

impl SymmetricTensorField {
    pub fn zeros(m: usize, grid: GridSpec) -> Self {
        SymmetricTensorField { m, grid, data: Array3::zeros((m + 1, grid.ny, grid.nx)) }
    }

    pub fn from_array(m: usize, grid: GridSpec, data: Array3<f64>) -> Result<Self> {
        grid.validate()?;
        check_shape(&data, m + 1, &grid)?;
        check_finite(&data)?;
        Ok(SymmetricTensorField { m, grid, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array3<f64> {
        &mut self.data
    }

    pub fn plane(&self, t: usize) -> ArrayView2<'_, f64> {
        self.data.slice(s![t, .., ..])
    }

    pub fn plane_mut(&mut self, t: usize) -> ArrayViewMut2<'_, f64> {
        self.data.slice_mut(s![t, .., ..])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        inner_product_sym(self, self).map(f64::sqrt).unwrap_or(0.0)
    }

    /// The same samples viewed as an `(m, 0)` mixed field; the layouts coincide.
    pub fn to_mixed(&self) -> MixedTensorField {
        MixedTensorField { k: self.m, l: 0, grid: self.grid, data: self.data.clone() }
    }

    pub fn from_mixed(f: MixedTensorField) -> Result<Self> {
        if f.l != 0 {
            return Err(Error::Order { what: "l = 0 to reinterpret as symmetric", k: f.k, l: f.l });
        }
        Ok(SymmetricTensorField { m: f.k, grid: f.grid, data: f.data })
    }
}
