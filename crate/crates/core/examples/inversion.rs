//! Recovering the solenoidal part from normal-operator data in the Fourier domain.

use mirt::fourier::{b_paper, calibrate, decompose_mixed, default_calibration, invert_normal, SpectralOptions};
use mirt::grid::GridSpec;
use mirt::metrics::central_rel_l2;
use mirt::normal::normal_by_convolution;
use mirt::presets::{make_preset, PresetKind};

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(128, 1.0)?;
    let opts = SpectralOptions::default();
    for (k, l) in [(0, 0), (1, 0), (1, 1), (2, 1)] {
        let (_, f) = make_preset(PresetKind::Gaussian, k, l, &grid, 5)?;
        let nf = normal_by_convolution(&f)?.field;
        let (rec, report) = invert_normal(&nf, default_calibration(k, l), &opts)?;
        let fs = decompose_mixed(&f, &opts)?.fs;
        println!(
            "({k},{l}) b_paper = {:8.4}  b = {:.4}  error vs f^s = {:.2e}  DC dropped = {:.1e}",
            b_paper(k, l),
            report.b,
            central_rel_l2(&rec, &fs),
            report.dc_energy_fraction
        );
    }

    // Truncating N f at the box edge instead of continuing its tail.
    let (_, f) = make_preset(PresetKind::Gaussian, 2, 2, &grid, 5)?;
    let nf = normal_by_convolution(&f)?.field;
    let fs = decompose_mixed(&f, &opts)?.fs;
    let truncated = SpectralOptions { extend_tail: false, ..opts };
    for (name, o) in [("continued", opts), ("zero padded", truncated), ("torus", SpectralOptions::torus())] {
        let (rec, _) = invert_normal(&nf, default_calibration(2, 2), &o)?;
        println!("(2,2) {name:12} error {:.2e}", central_rel_l2(&rec, &fs));
    }

    let measured = calibrate(1, 1, &grid, 1)?;
    println!("measured calibration (1,1): {measured:.4}, default {:.4}", default_calibration(1, 1));
    Ok(())
}
