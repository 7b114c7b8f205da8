//! Mixed ray transform of a generic field, and of fields it cannot see.

use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::presets::{make_preset, PresetKind};
use mirt::range::parity_residual;
use mirt::ray::mirt_forward;
use mirt::ucp::{kernel_demo, UcpTolerances};

fn main() -> mirt::Result<()> {
    let (k, l) = (1, 1);
    let grid = GridSpec::centered(128, 1.0)?;
    let sino = SinogramGrid::for_field(&grid, 180)?;

    // The analytic spec integrates Gaussians exactly; the sampled field goes through bilinear interpolation.
    let (spec, f) = make_preset(PresetKind::Gaussian, k, l, &grid, 1)?;
    let exact = mirt_forward(&spec, &sino)?;
    let sampled = mirt_forward(&f, &sino)?;
    println!("sinogram {} x {}, peak {:.4}", sino.ntheta, sino.ns, exact.max_abs());
    println!("sampled vs analytic: {:.2e}", sampled.sub(&exact)?.max_abs() / exact.max_abs());
    println!("antipodal parity residual: {:.2e}", parity_residual(&exact)?);

    let tol = UcpTolerances::default();
    for kind in [PresetKind::Potential, PresetKind::Lambda] {
        let r = kernel_demo(kind, k, l, &grid, 1, 180, &tol)?;
        println!("{kind:?}: |L f| / generic = {:.2e}, |N f| / generic = {:.2e}", r.forward_residual, r.normal_residual);
    }
    Ok(())
}
