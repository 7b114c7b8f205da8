use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use mirt::io::{self, FileContent};
use mirt::tensor::MixedTensorField;

fn mirt(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mirt"))
        .args(args)
        .env("MIRT_THREADS", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn mirt");
    let mut pipe = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        pipe.write_all(bytes).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&[u8]>) -> Vec<u8> {
    let out = mirt(args, stdin);
    assert!(out.status.success(), "mirt {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn field(bytes: &[u8]) -> MixedTensorField {
    match io::decode(bytes).unwrap() {
        FileContent::Mixed(f) => f,
        other => panic!("expected a mixed field, got {}", other.kind()),
    }
}

fn gen(preset: &str, k: &str, l: &str, n: &str, seed: &str) -> Vec<u8> {
    ok(&["gen", "--preset", preset, "--k", k, "--l", l, "--n", n, "--seed", seed], None)
}

fn pipeline(preset: &str) -> MixedTensorField {
    let f = gen(preset, "1", "1", "64", "3");
    let sino = ok(&["forward", "--ntheta", "180"], Some(&f));
    field(&ok(&["normal", "--method", "conv"], Some(&sino)))
}

#[test]
fn lambda_fields_vanish_through_the_pipeline() {
    let scale = pipeline("gaussian").max_abs();
    let kernel = pipeline("lambda").max_abs();
    assert!(kernel <= 1e-2 * scale, "{kernel:.3e} vs scale {scale:.3e}");
}

// Both are discretizations of N f; at n = 64 they differ by about 3% of the peak, independent of the angle count.
#[test]
fn backprojected_sinogram_tracks_convolution() {
    let f = gen("gaussian", "1", "1", "64", "3");
    let sino = ok(&["forward", "--ntheta", "720"], Some(&f));
    let bp = field(&ok(&["normal"], Some(&sino)));
    let conv = field(&ok(&["normal", "--method", "conv"], Some(&f)));
    assert_eq!(bp.grid(), conv.grid());
    let err = bp.sub(&conv).unwrap().max_abs() / conv.max_abs();
    assert!(err <= 5e-2, "backprojection differs from convolution by {err:.3e}");
}

#[test]
fn zero_field_has_zero_transform() {
    let zero = io::encode_field(&MixedTensorField::zeros(2, 1, mirt::grid::GridSpec::centered(32, 1.0).unwrap()));
    match io::decode(&ok(&["forward", "--ntheta", "16"], Some(&zero))).unwrap() {
        FileContent::Sinogram(s) => assert_eq!(s.max_abs(), 0.0),
        other => panic!("expected a sinogram, got {}", other.kind()),
    }
}

#[test]
fn generation_is_deterministic() {
    assert_eq!(gen("mixed", "2", "1", "32", "9"), gen("mixed", "2", "1", "32", "9"));
    assert_ne!(gen("mixed", "2", "1", "32", "9"), gen("mixed", "2", "1", "32", "10"));
}

#[test]
fn bad_arguments_exit_with_one() {
    for args in [
        &["gen", "--preset", "gaussian", "--k", "1", "--l", "1", "--n", "16"][..],
        &["gen", "--preset", "gaussian", "--k", "1", "--l", "1", "--extent", "0"][..],
        &["gen", "--preset", "gaussian", "--k", "1", "--l", "1", "--bogus"][..],
        &["forward", "--in", "/nonexistent.mirt"][..],
        &["selftest", "--n", "8"][..],
    ] {
        let out = mirt(args, None);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let f = gen("gaussian", "0", "0", "32", "1");
    assert_eq!(mirt(&["forward", "--ntheta", "15"], Some(&f)).status.code(), Some(1));
    assert_eq!(mirt(&["rangecheck"], Some(&f)).status.code(), Some(1));
    assert_eq!(mirt(&["--help"], None).status.code(), Some(0));
}

#[test]
fn csv_reports_have_headers() {
    let f = gen("gaussian", "1", "1", "32", "2");
    let sino = ok(&["forward", "--ntheta", "32"], Some(&f));
    let table = String::from_utf8(ok(&["rangecheck", "--rmax", "2"], Some(&sino))).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "r,allowed_halfwidth,leakage");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,2,"));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let fs = ok(&["decompose", "--report", report.to_str().unwrap()], Some(&f));
    assert_eq!(field(&fs).k(), 1);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("norm_delta_prime_fs,norm_mu_fs,norm_L_residual\n"));
}

#[test]
fn files_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    ok(&["gen", "--preset", "lambda", "--k", "1", "--l", "1", "--n", "32", "-o", &p("f.mirt")], None);
    ok(&["forward", "--in", &p("f.mirt"), "--ntheta", "16", "-o", &p("s.mirt")], None);
    ok(&["adjoint", "--in", &p("s.mirt"), "--n", "32", "-o", &p("b.mirt")], None);
    ok(&["render", "--in", &p("b.mirt"), "--prefix", &p("img")], None);
    assert!(Path::new(&p("img_p0q0.pgm")).exists() && Path::new(&p("img_ranges.csv")).exists());
    assert_eq!(field(&std::fs::read(p("b.mirt")).unwrap()).grid().nx, 32);
}

#[test]
fn kernel_demo_and_selftest_pass() {
    let table = String::from_utf8(ok(&["ucp-demo", "--preset", "lambda", "--n", "64", "--ntheta", "90"], None)).unwrap();
    assert!(table.starts_with("operator,relative_residual,tolerance,pass\n"));
    let out = mirt(&["selftest"], None);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
