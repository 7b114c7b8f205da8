//! Forward mixed and longitudinal ray transforms, their adjoint, and the backprojection normal operator.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{interp_row, FieldSource, Sinogram, SinogramGrid};
use crate::grid::GridSpec;
use crate::tensor::{apply_a, binom, n_components, sym_full, MixedTensorField, SymmetricTensorField};

/// Weights `ξ₁^{k−p} ξ₂^p η₁^{ℓ−q} η₂^q` per stored component, with or without the multiplicities.
pub fn component_weights(k: usize, l: usize, xi: [f64; 2], with_multiplicity: bool) -> Vec<f64> {
    let eta = [-xi[1], xi[0]];
    let mut w = Vec::with_capacity(n_components(k, l));
    for p in 0..=k {
        for q in 0..=l {
            let mono = xi[0].powi((k - p) as i32) * xi[1].powi(p as i32) * eta[0].powi((l - q) as i32) * eta[1].powi(q as i32);
            w.push(if with_multiplicity { binom(k, p) * binom(l, q) * mono } else { mono });
        }
    }
    w
}

fn forward_impl(f: &dyn FieldSource, k: usize, l: usize, grid: &SinogramGrid) -> Result<Sinogram> {
    grid.validate()?;
    let mut out = Sinogram::zeros(*grid, k, l);
    let ns = grid.ns;
    out.data_mut()
        .as_slice_mut()
        .expect("fresh sinogram")
        .par_chunks_mut(ns)
        .enumerate()
        .for_each(|(j, row)| {
            let w = component_weights(k, l, grid.xi(j), true);
            f.project_row(&w, grid, j, row);
        });
    Ok(out)
}

/// Mixed ray transform `L_{k,ℓ} f` on every line of `grid` (trapezoid rule along the lines).
pub fn mirt_forward(f: &dyn FieldSource, grid: &SinogramGrid) -> Result<Sinogram> {
    let (k, l) = f.orders();
    forward_impl(f, k, l, grid)
}

/// Longitudinal ray transform `I_m g` of a symmetric field. The sinogram is tagged `(m, 0)`.
pub fn lrt_forward(g: &SymmetricTensorField, grid: &SinogramGrid) -> Result<Sinogram> {
    forward_impl(g, g.m(), 0, grid)
}

/// `sup |L f − I(σAf)|` over the sinogram, both sides on the same quadrature.
pub fn check_mirt_lrt_identity(f: &MixedTensorField, grid: &SinogramGrid) -> Result<f64> {
    let lf = mirt_forward(f, grid)?;
    let ig = lrt_forward(&sym_full(&apply_a(f)), grid)?;
    Ok(lf.data().iter().zip(ig.data().iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// `L*φ`: integrates `φ(⟨x, η⟩, θ)` against the component weights over the full circle.
pub fn adjoint_backproject(phi: &Sinogram, k: usize, l: usize, out_grid: &GridSpec) -> Result<MixedTensorField> {
    if (phi.k(), phi.l()) != (k, l) {
        return Err(Error::Shape(format!(
            "sinogram of a ({}, {}) transform cannot be backprojected as ({k}, {l})",
            phi.k(),
            phi.l()
        )));
    }
    out_grid.validate()?;
    let sg = phi.grid;
    let nc = n_components(k, l);
    let n = out_grid.nx;
    let xs = out_grid.coords();
    let weights: Vec<Vec<f64>> = (0..sg.ntheta).map(|j| component_weights(k, l, sg.xi(j), false)).collect();
    let dth = sg.dtheta();
    let rows: Vec<Vec<f64>> = (0..out_grid.ny)
        .into_par_iter()
        .map(|i| {
            let x2 = xs[i];
            let mut acc = vec![0.0; nc * n];
            let mut line = vec![0.0; n];
            for j in 0..sg.ntheta {
                let eta = sg.eta(j);
                let row = phi.data().row(j);
                let row = row.as_slice().expect("row-major");
                for (c, v) in line.iter_mut().enumerate() {
                    *v = interp_row(row, &sg, xs[c] * eta[0] + x2 * eta[1]);
                }
                for (comp, w) in weights[j].iter().enumerate() {
                    let dst = &mut acc[comp * n..(comp + 1) * n];
                    for (d, v) in dst.iter_mut().zip(&line) {
                        *d += w * v;
                    }
                }
            }
            acc.iter_mut().for_each(|v| *v *= dth);
            acc
        })
        .collect();
    let mut out = MixedTensorField::zeros(k, l, *out_grid);
    let data = out.data_mut();
    for (i, acc) in rows.iter().enumerate() {
        for comp in 0..nc {
            for c in 0..n {
                data[[comp, i, c]] = acc[comp * n + c];
            }
        }
    }
    Ok(out)
}

/// `N f = L*L f` evaluated on `out_grid` through the sinogram grid `sino`.
pub fn normal_by_backprojection(f: &dyn FieldSource, sino: &SinogramGrid, out_grid: &GridSpec) -> Result<MixedTensorField> {
    let (k, l) = f.orders();
    adjoint_backproject(&mirt_forward(f, sino)?, k, l, out_grid)
}
