//! N = L*L two ways: a convolution with its singular kernel and an explicit backprojection.

use std::time::Instant;

use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::metrics::central_rel_l2;
use mirt::normal::{normal_by_convolution, KernelBank, KernelOptions};
use mirt::presets::{make_preset, PresetKind};
use mirt::ray::normal_by_backprojection;
use mirt::tensor::inner_product;

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(128, 1.0)?;
    let (k, l) = (1, 1);
    let (spec, f) = make_preset(PresetKind::Gaussian, k, l, &grid, 2)?;

    let t = Instant::now();
    let conv = normal_by_convolution(&f)?;
    println!("convolution: {:.2?}", t.elapsed());
    if let Some(w) = &conv.margin_warning {
        println!("warning: {w}");
    }

    let t = Instant::now();
    let bp = normal_by_backprojection(&spec, &SinogramGrid::for_field(&grid, 720)?, &grid)?;
    println!("backprojection, 720 angles: {:.2?}", t.elapsed());
    println!("central-quarter relative L2 difference: {:.2e}", central_rel_l2(&conv.field, &bp));

    // One bank serves every field of order m = k + l on this grid.
    let bank = KernelBank::new(k + l, &grid, &KernelOptions::default())?;
    let (_, g) = make_preset(PresetKind::Gaussian, k, l, &grid, 3)?;
    let ng = bank.apply(&g)?;
    let asym = inner_product(&conv.field, &g)? - inner_product(&f, &ng)?;
    println!("<N f, g> - <f, N g> = {asym:.2e}");

    let (_, lam) = make_preset(PresetKind::Lambda, k, l, &grid, 2)?;
    println!("|N(lambda w)| / |N f| = {:.2e}", bank.apply(&lam)?.max_abs() / conv.field.max_abs());
    Ok(())
}
