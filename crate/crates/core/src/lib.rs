//! Mixed ray transforms of tensor fields on the plane.
//!
//! A field of order `(k, ℓ)` is stored as `(k+1)(ℓ+1)` component planes, symmetric within each index group
//! ([`tensor::MixedTensorField`]). The crate provides:
//!
//! - pointwise algebra: `A`, full symmetrization, `λ`, `μ` and the derivatives `d′`, `δ′` ([`tensor`]);
//! - the forward transform `L_{k,ℓ}`, its adjoint and the reduction to the longitudinal transform ([`ray`]);
//! - the normal operator `N = L*L` as a convolution with a precomputed kernel bank ([`normal`]);
//! - the solenoidal decomposition and the Fourier inversion of `N f` ([`fourier`]);
//! - necessary range conditions on sinograms ([`range`]);
//! - seeded test fields, file containers and an invariant suite ([`presets`], [`io`], [`selftest`]).
//!
//! The `examples/` directory walks through each of these:
//!
//! | example | shows |
//! |---|---|
//! | `operator_algebra` | `A`, `σ`, `λ`, `μ` identities and the component graph |
//! | `forward_transform` | sinograms, parity, fields the transform cannot see |
//! | `reduction_identity` | `L_{k,ℓ} f = I(σAf)` for all orders up to 3 |
//! | `normal_operator` | convolution against backprojection, kernel banks |
//! | `inversion` | recovering `f^s` from `N f`, padding and calibration |
//! | `decomposition` | `f^s` and its residual report |
//! | `range_check` | moment band limits and detecting corrupted data |
//! | `files_and_rendering` | container files, CSV tables and PGM previews |
//!
//! ```
//! use mirt::fourier::{default_calibration, invert_normal, SpectralOptions};
//! use mirt::grid::GridSpec;
//! use mirt::normal::normal_by_convolution;
//! use mirt::presets::{make_preset, PresetKind};
//!
//! let grid = GridSpec::centered(64, 1.0)?;
//! let (_, f) = make_preset(PresetKind::Gaussian, 1, 1, &grid, 0)?;
//! let nf = normal_by_convolution(&f)?.field;
//! let (fs, _) = invert_normal(&nf, default_calibration(1, 1), &SpectralOptions::default())?;
//! assert_eq!(fs.grid(), f.grid());
//! # Ok::<(), mirt::Error>(())
//! ```

// `!(x <= tol)` is used on purpose so NaN fails the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod normal;
pub mod presets;
pub mod range;
pub mod ray;
pub mod selftest;
pub mod tensor;
pub mod ucp;

mod fft2;
mod tail;

pub use error::{Error, Result};

/// Sizes the global worker pool from `MIRT_THREADS` (`0` or unset: one worker per core). Call once, before
/// any parallel work; later calls and invalid values are ignored. Returns the worker count in effect.
pub fn init_threads_from_env() -> usize {
    if let Some(n) = std::env::var("MIRT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}
