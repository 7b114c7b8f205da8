//! Splitting a field into its solenoidal part and the part the transform cannot see.

use mirt::fourier::{decompose_mixed, SpectralOptions};
use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::presets::{make_preset, PresetKind};
use mirt::ray::mirt_forward;

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(128, 1.0)?;
    let (k, l) = (2, 1);
    let (_, generic) = make_preset(PresetKind::Gaussian, k, l, &grid, 11)?;
    let (_, hidden) = make_preset(PresetKind::Mixed, k, l, &grid, 12)?;
    let f = generic.add(&hidden.scaled(generic.norm() / hidden.norm()))?;

    let opts = SpectralOptions::default();
    for (name, field) in [("generic", &generic), ("generic + hidden", &f)] {
        let d = decompose_mixed(field, &opts)?;
        let r = d.report;
        println!("{name}:");
        println!("  |f| = {:.4}, |f^s| = {:.4}", r.norm_f, d.fs.norm());
        println!("  |delta' f^s| / |f^s| = {:.2e}", r.norm_delta_prime_fs / d.fs.norm());
        println!("  |mu f^s| / |f^s|     = {:.2e}", r.norm_mu_fs / d.fs.norm());
        println!("  sup |L f - L f^s| / sup |L f| = {:.2e}", r.norm_l_residual / r.max_abs_lf);
    }

    // The hidden part changes the field but not its data.
    let sino = SinogramGrid::for_field(&grid, 90)?;
    let lg = mirt_forward(&generic, &sino)?;
    let lf = mirt_forward(&f, &sino)?;
    println!("sup |L f - L generic| / sup |L generic| = {:.2e}", lf.sub(&lg)?.max_abs() / lg.max_abs());
    Ok(())
}
