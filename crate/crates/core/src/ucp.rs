//! Kernel fields in practice: for `f = d′u` or `f = λw` both `L f` and `N f` should vanish. The residuals are
//! measured against a generic field of the same scale so they read as relative sizes.

use crate::error::{Error, Result};
use crate::geometry::SinogramGrid;
use crate::grid::GridSpec;
use crate::normal::normal_by_convolution;
use crate::presets::{make_preset, PresetKind};
use crate::ray::mirt_forward;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcpTolerances {
    pub forward: f64,
    pub normal: f64,
}

impl Default for UcpTolerances {
    fn default() -> Self {
        UcpTolerances { forward: 1e-6, normal: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcpReport {
    pub kind: PresetKind,
    pub k: usize,
    pub l: usize,
    /// `(‖L f‖∞ / ‖f‖∞) / (‖L g‖∞ / ‖g‖∞)` for the generic `g`.
    pub forward_residual: f64,
    /// The same ratio for the convolution normal operator.
    pub normal_residual: f64,
    pub forward_pass: bool,
    pub normal_pass: bool,
}

impl UcpReport {
    pub fn pass(&self) -> bool {
        self.forward_pass && self.normal_pass
    }
}

pub fn kernel_demo(kind: PresetKind, k: usize, l: usize, grid: &GridSpec, seed: u64, ntheta: usize, tol: &UcpTolerances) -> Result<UcpReport> {
    if !matches!(kind, PresetKind::Potential | PresetKind::Lambda) {
        return Err(Error::Invalid(format!("kernel demo needs a potential or lambda preset, got {kind:?}")));
    }
    let sino = SinogramGrid::for_field(grid, ntheta)?;
    let (spec, f) = make_preset(kind, k, l, grid, seed)?;
    let (gspec, g) = make_preset(PresetKind::Gaussian, k, l, grid, seed)?;
    let ratio = |a: f64, fa: f64, b: f64, fb: f64| (a / fa) / (b / fb);
    let forward_residual =
        ratio(mirt_forward(&spec, &sino)?.max_abs(), f.max_abs(), mirt_forward(&gspec, &sino)?.max_abs(), g.max_abs());
    let normal_residual = ratio(
        normal_by_convolution(&f)?.field.max_abs(),
        f.max_abs(),
        normal_by_convolution(&g)?.field.max_abs(),
        g.max_abs(),
    );
    Ok(UcpReport {
        kind,
        k,
        l,
        forward_residual,
        normal_residual,
        forward_pass: forward_residual <= tol.forward,
        normal_pass: normal_residual <= tol.normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_field_is_invisible() {
        let g = GridSpec::centered(64, 1.0).unwrap();
        let r = kernel_demo(PresetKind::Lambda, 1, 1, &g, 3, 60, &UcpTolerances::default()).unwrap();
        assert!(r.forward_residual < 1e-10, "{r:?}");
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn rejects_generic_preset() {
        let g = GridSpec::centered(64, 1.0).unwrap();
        assert!(kernel_demo(PresetKind::Gaussian, 1, 1, &g, 3, 60, &UcpTolerances::default()).is_err());
    }
}
