mod common;

use common::{random_field, rel, Full};
use mirt::fourier::{fft_field, ifft_field, solenoidal_part, SpectralOptions};
use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::io::{decode, encode_field, FileContent};
use mirt::normal::normal_by_convolution;
use mirt::range::parity_residual;
use mirt::ray::mirt_forward;
use mirt::tensor::{apply_a, asa, delta_prime, dprime, inner_product, lambda_op, mu_op, sym_full, MixedTensorField, Scheme};
use proptest::prelude::*;

fn grid(n: usize) -> GridSpec {
    GridSpec::centered(n, 1.0).unwrap()
}

fn orders() -> impl Strategy<Value = (usize, usize)> {
    (0usize..=3, 0usize..=3)
}

fn pixel_components(f: &MixedTensorField, i: usize, j: usize) -> Vec<f64> {
    f.data().outer_iter().map(|p| p[[i, j]]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a_squared_is_signed_identity((k, l) in orders(), seed in any::<u64>()) {
        let f = random_field(k, l, grid(6), seed);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let back = apply_a(&apply_a(&f));
        prop_assert!(back.sub(&f.scaled(sign)).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn lambda_and_mu_are_adjoint((k, l) in orders(), seed in any::<u64>()) {
        let w = random_field(k, l, grid(6), seed);
        let f = random_field(k + 1, l + 1, grid(6), seed ^ 1);
        let lhs = inner_product(&lambda_op(&w), &f).unwrap();
        let rhs = inner_product(&w, &mu_op(&f).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn asa_is_self_adjoint((k, l) in orders(), seed in any::<u64>()) {
        let f = random_field(k, l, grid(6), seed);
        let g = random_field(k, l, grid(6), seed ^ 2);
        let lhs = inner_product(&asa(&f), &g).unwrap();
        let rhs = inner_product(&f, &asa(&g)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn sigma_a_kills_lambda((k, l) in orders(), seed in any::<u64>()) {
        let w = random_field(k, l, grid(6), seed);
        let out = sym_full(&apply_a(&lambda_op(&w)));
        prop_assert!(out.max_abs() <= 1e-13 * (1.0 + w.max_abs()));
    }

    #[test]
    fn stored_operators_match_enumeration((k, l) in (1usize..=3, 1usize..=3), seed in any::<u64>()) {
        let f = random_field(k, l, grid(4), seed);
        let (i, j) = (1, 2);
        let full = Full::from_components(k, l, &pixel_components(&f, i, j));
        let check = |got: Vec<f64>, want: Vec<f64>| got.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-13);
        prop_assert!(check(pixel_components(&apply_a(&f), i, j), common::apply_a(&full).components()));
        prop_assert!(check(sym_full(&f).data().outer_iter().map(|p| p[[i, j]]).collect(), common::sym_full(&full).components()));
        prop_assert!(check(pixel_components(&mu_op(&f).unwrap(), i, j), common::mu(&full).components()));
        let w = random_field(k - 1, l - 1, grid(4), seed ^ 3);
        let wf = Full::from_components(k - 1, l - 1, &pixel_components(&w, i, j));
        prop_assert!(check(pixel_components(&lambda_op(&w), i, j), common::lambda(&wf).components()));
    }

    #[test]
    fn spectral_derivatives_integrate_by_parts((k, l) in (1usize..=3, 0usize..=2), seed in any::<u64>()) {
        let u = random_field(k - 1, l, grid(16), seed);
        let f = random_field(k, l, grid(16), seed ^ 4);
        let lhs = inner_product(&dprime(&u, Scheme::Spectral), &f).unwrap();
        let rhs = -inner_product(&u, &delta_prime(&f, Scheme::Spectral).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn fft_round_trip((k, l) in orders(), seed in any::<u64>()) {
        let f = random_field(k, l, grid(12), seed);
        prop_assert!(ifft_field(&fft_field(&f)).sub(&f).unwrap().max_abs() <= 1e-13);
    }

    #[test]
    fn field_files_round_trip((k, l) in orders(), seed in any::<u64>(), n in 2usize..9) {
        let f = random_field(k, l, grid(n), seed);
        let bytes = encode_field(&f);
        match decode(&bytes).unwrap() {
            FileContent::Mixed(g) => {
                prop_assert_eq!(g.data(), f.data());
                prop_assert_eq!(encode_field(&g), bytes);
            }
            other => prop_assert!(false, "decoded as {}", other.kind()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn forward_is_linear_with_antipodal_parity((k, l) in (0usize..=2, 0usize..=2), seed in any::<u64>(), a in -2.0f64..2.0) {
        let g = grid(16);
        let sino = SinogramGrid::for_field(&g, 16).unwrap();
        let f = random_field(k, l, g, seed);
        let h = random_field(k, l, g, seed ^ 5);
        let pf = mirt_forward(&f, &sino).unwrap();
        let ph = mirt_forward(&h, &sino).unwrap();
        let sum = mirt_forward(&f.add(&h.scaled(a)).unwrap(), &sino).unwrap();
        let lin = sum.data() - &(pf.data() + &(ph.data() * a));
        prop_assert!(lin.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= 1e-12 * (1.0 + sum.max_abs()));
        prop_assert!(parity_residual(&pf).unwrap() <= 1e-12);
    }

    #[test]
    fn normal_operator_is_self_adjoint((k, l) in (0usize..=2, 0usize..=2), seed in any::<u64>()) {
        let f = random_field(k, l, grid(32), seed);
        let g = random_field(k, l, grid(32), seed ^ 6);
        let lhs = inner_product(&normal_by_convolution(&f).unwrap().field, &g).unwrap();
        let rhs = inner_product(&f, &normal_by_convolution(&g).unwrap().field).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn solenoidal_projection_is_idempotent((k, l) in (0usize..=2, 0usize..=2), seed in any::<u64>()) {
        let f = random_field(k, l, grid(16), seed);
        let opts = SpectralOptions::torus();
        let once = solenoidal_part(&f, &opts);
        let twice = solenoidal_part(&once, &opts);
        prop_assert!(twice.sub(&once).unwrap().max_abs() <= 1e-10 * (1.0 + once.max_abs()));
    }
}
