//! The mixed transform of f equals the longitudinal transform of σAf.

use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::presets::{make_preset, PresetKind};
use mirt::ray::{check_mirt_lrt_identity, lrt_forward, mirt_forward};
use mirt::tensor::{apply_a, sym_full};

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(64, 1.0)?;
    let sino = SinogramGrid::for_field(&grid, 90)?;
    for k in 0..=3 {
        for l in 0..=3 {
            let (_, f) = make_preset(PresetKind::Gaussian, k, l, &grid, (10 * k + l) as u64)?;
            println!("({k},{l}) relative mismatch {:.2e}", check_mirt_lrt_identity(&f, &sino)?);
        }
    }

    let (_, f) = make_preset(PresetKind::Gaussian, 2, 2, &grid, 3)?;
    let direct = mirt_forward(&f, &sino)?;
    let via_sym = lrt_forward(&sym_full(&apply_a(&f)), &sino)?;
    println!("(2,2) by hand: {:.2e}", direct.sub(&via_sym).map(|d| d.max_abs())? / direct.max_abs());
    Ok(())
}
