//! Necessary range conditions of the transform, and how they flag data no field could produce.

use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::presets::{make_preset, PresetKind};
use mirt::range::{contaminate, moment_spectrum, range_verdict, RangeTolerances};
use mirt::ray::mirt_forward;

fn main() -> mirt::Result<()> {
    let grid = GridSpec::centered(128, 1.0)?;
    let (spec, _) = make_preset(PresetKind::Gaussian, 1, 2, &grid, 4)?;
    let phi = mirt_forward(&spec, &SinogramGrid::for_field(&grid, 180)?)?;
    let tol = RangeTolerances::default();

    let clean = range_verdict(&phi, 3, &tol)?;
    println!("clean data: parity {:.2e}, pass = {}", clean.parity_residual, clean.pass());
    for m in &clean.moments {
        println!("  r = {}  |f| <= {}  leakage {:.2e}", m.r, m.allowed_halfwidth, m.leakage);
    }

    let spectrum = moment_spectrum(&phi, 1);
    let strongest: Vec<i64> = {
        let mut e = spectrum.energies.clone();
        e.sort_by(|a, b| b.1.total_cmp(&a.1));
        e.iter().take(4).map(|x| x.0).collect()
    };
    println!("strongest theta frequencies of m_1: {strongest:?}");

    let bad = contaminate(&phi, 2, 0.1);
    let report = range_verdict(&bad, 3, &tol)?;
    println!("contaminated data: pass = {}", report.pass());
    for f in &report.failures {
        println!("  {f}");
    }
    Ok(())
}
