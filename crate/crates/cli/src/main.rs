//! `mirt` command-line front end. Every subcommand reads and writes the library's container files;
//! a missing or `-` path means stdin/stdout, so commands can be piped.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mirt::fourier::{decompose_mixed, default_calibration, invert_normal, SpectralOptions};
use mirt::geometry::{Sinogram, SinogramGrid};
use mirt::grid::GridSpec;
use mirt::io::{self, FileContent};
use mirt::normal::normal_by_convolution;
use mirt::presets::{make_preset, PresetKind};
use mirt::range::{range_verdict, RangeTolerances};
use mirt::ray::{adjoint_backproject, mirt_forward, normal_by_backprojection};
use mirt::selftest::{self, Bound, SelftestConfig};
use mirt::tensor::MixedTensorField;
use mirt::ucp::{kernel_demo, UcpTolerances};

#[derive(Parser)]
#[command(name = "mirt", version, about = "Mixed ray transforms of 2D tensor fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenPreset {
    Gaussian,
    Potential,
    Lambda,
    Solenoidal,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelPreset {
    Potential,
    Lambda,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Conv,
    Bp,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a seeded test field.
    Gen {
        #[arg(long, value_enum)]
        preset: GenPreset,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Half-width of the square grid.
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Mixed ray transform of a field.
    Forward {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        ns: Option<usize>,
        #[arg(long, default_value_t = 180)]
        ntheta: usize,
        #[arg(long)]
        smax: Option<f64>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Adjoint transform (backprojection) of a sinogram.
    Adjoint {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Half-width of the output grid; defaults to the largest square the sinogram covers.
        #[arg(long)]
        extent: Option<f64>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Normal operator of a field. A sinogram input is backprojected instead.
    Normal {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Conv)]
        method: Method,
        /// Angles for the backprojection form.
        #[arg(long, default_value_t = 720)]
        ntheta: usize,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Recover the solenoidal part from normal-operator data.
    Invert {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Scalar multiplying the closed-form constant; defaults to the per-order calibration.
        #[arg(long)]
        calibration: Option<f64>,
        #[arg(long, default_value_t = 4)]
        pad: usize,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Solenoidal part of a field plus a CSV report of its constraints.
    Decompose {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Report path; defaults to stdout, or stderr when the field goes to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parity and moment conditions of a sinogram, as CSV.
    Rangecheck {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the results as CSV.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Check that kernel fields are invisible to L and N.
    UcpDemo {
        #[arg(long, value_enum)]
        preset: KernelPreset,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 360)]
        ntheta: usize,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Render each component plane to PGM with a normalization sidecar CSV.
    Render {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        prefix: PathBuf,
    },
}

enum Failure {
    Validation(String),
    Tolerance(String),
}

impl From<mirt::Error> for Failure {
    fn from(e: mirt::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn invalid<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Validation(msg.into()))
}

/// Field size whose default sinogram matches `sino`. Sizes sharing an offset count resolve to the even one.
fn field_size_for(sino: &SinogramGrid) -> usize {
    let ns_of = |n: usize| GridSpec::centered(n, 1.0).and_then(|g| SinogramGrid::for_field(&g, 2)).map_or(usize::MAX, |g| g.ns);
    let mut n = ((sino.ns as f64) / std::f64::consts::SQRT_2).ceil() as usize;
    while n > 1 && ns_of(n) > sino.ns {
        n -= 1;
    }
    while n > 1 && ns_of(n - 1) == ns_of(n) {
        n -= 1;
    }
    if n % 2 == 1 && ns_of(n + 1) == ns_of(n) {
        n += 1;
    }
    n
}

fn check_n(n: usize) -> Outcome {
    if n < 32 {
        return invalid(format!("--n must be at least 32, got {n}"));
    }
    Ok(())
}

fn check_extent(e: f64) -> Outcome {
    if !(e.is_finite() && e > 0.0) {
        return invalid(format!("--extent must be positive, got {e}"));
    }
    Ok(())
}

fn check_ntheta(nt: usize) -> Outcome {
    if nt < 2 || !nt.is_multiple_of(2) {
        return invalid(format!("--ntheta must be even and at least 2, got {nt}"));
    }
    Ok(())
}

fn is_std(p: &Option<PathBuf>) -> bool {
    p.as_deref().is_none_or(|p| p == Path::new("-"))
}

fn read_input(p: &Option<PathBuf>) -> Result<FileContent, Failure> {
    if is_std(p) {
        let mut bytes = Vec::new();
        std::io::stdin().read_to_end(&mut bytes).map_err(|e| Failure::Validation(format!("stdin: {e}")))?;
        Ok(io::decode(&bytes)?)
    } else {
        Ok(io::read(p.as_deref().expect("checked"))?)
    }
}

fn read_field(p: &Option<PathBuf>) -> Result<MixedTensorField, Failure> {
    match read_input(p)? {
        FileContent::Mixed(f) => Ok(f),
        FileContent::Symmetric(g) => Ok(g.to_mixed()),
        FileContent::Sinogram(_) => invalid("expected a field, got a sinogram"),
    }
}

fn read_sinogram(p: &Option<PathBuf>) -> Result<Sinogram, Failure> {
    match read_input(p)? {
        FileContent::Sinogram(s) => Ok(s),
        other => invalid(format!("expected a sinogram, got a {} field", other.kind())),
    }
}

fn emit(p: &Option<PathBuf>, bytes: &[u8]) -> Outcome {
    if is_std(p) {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Failure::Validation(format!("stdout: {e}")))
    } else {
        Ok(io::write_atomic(p.as_deref().expect("checked"), bytes)?)
    }
}

fn emit_field(p: &Option<PathBuf>, f: &MixedTensorField) -> Outcome {
    emit(p, &io::encode_field(f))
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Gen { preset, k, l, n, extent, seed, out } => {
            check_n(n)?;
            check_extent(extent)?;
            let grid = GridSpec::centered(n, extent)?;
            let kind = match preset {
                GenPreset::Gaussian | GenPreset::Solenoidal => PresetKind::Gaussian,
                GenPreset::Potential => PresetKind::Potential,
                GenPreset::Lambda => PresetKind::Lambda,
                GenPreset::Mixed => PresetKind::Mixed,
            };
            let (_, mut f) = make_preset(kind, k, l, &grid, seed)?;
            if let GenPreset::Solenoidal = preset {
                f = decompose_mixed(&f, &SpectralOptions::default())?.fs;
            }
            emit_field(&out, &f)
        }
        Cmd::Forward { input, ns, ntheta, smax, out } => {
            check_ntheta(ntheta)?;
            let f = read_field(&input)?;
            let grid = *f.grid();
            let sino = match (ns, smax) {
                (None, None) => SinogramGrid::for_field(&grid, ntheta)?,
                (ns, smax) => {
                    let s_max = smax.unwrap_or_else(|| grid.circumradius());
                    check_extent(s_max).map_err(|_| Failure::Validation(format!("--smax must be positive, got {s_max}")))?;
                    let ns = ns.unwrap_or_else(|| ((2.0 * s_max / grid.h()).ceil() as usize + 1) | 1);
                    SinogramGrid::with_offsets(&grid, ns, s_max, ntheta)?
                }
            };
            emit(&out, &io::encode_sinogram(&mirt_forward(&f, &sino)?))
        }
        Cmd::Adjoint { input, n, extent, out } => {
            check_n(n)?;
            let phi = read_sinogram(&input)?;
            let extent = extent.unwrap_or(phi.grid.s_max / std::f64::consts::SQRT_2);
            check_extent(extent)?;
            let grid = GridSpec::centered(n, extent)?;
            emit_field(&out, &adjoint_backproject(&phi, phi.k(), phi.l(), &grid)?)
        }
        Cmd::Normal { input, method, ntheta, out } => {
            check_ntheta(ntheta)?;
            let nf = match read_input(&input)? {
                FileContent::Sinogram(phi) => {
                    eprintln!("mirt: input is a sinogram; returning its backprojection L*phi");
                    let r = phi.grid.s_max / std::f64::consts::SQRT_2;
                    let n = field_size_for(&phi.grid);
                    check_n(n)?;
                    adjoint_backproject(&phi, phi.k(), phi.l(), &GridSpec::centered(n, r)?)?
                }
                content => {
                    let f = match content {
                        FileContent::Mixed(f) => f,
                        FileContent::Symmetric(g) => g.to_mixed(),
                        FileContent::Sinogram(_) => unreachable!(),
                    };
                    match method {
                        Method::Conv => {
                            let res = normal_by_convolution(&f)?;
                            if let Some(w) = res.margin_warning {
                                eprintln!("mirt: {w}");
                            }
                            res.field
                        }
                        Method::Bp => normal_by_backprojection(&f, &SinogramGrid::for_field(f.grid(), ntheta)?, f.grid())?,
                    }
                }
            };
            emit_field(&out, &nf)
        }
        Cmd::Invert { input, calibration, pad, out } => {
            if pad == 0 {
                return invalid("--pad must be at least 1");
            }
            let nf = read_field(&input)?;
            let c = calibration.unwrap_or_else(|| default_calibration(nf.k(), nf.l()));
            let opts = SpectralOptions { pad, extend_tail: pad > 1, ..SpectralOptions::default() };
            let (fs, report) = invert_normal(&nf, c, &opts)?;
            eprintln!("mirt: b = {:.6}, DC energy fraction dropped = {:.3e}", report.b, report.dc_energy_fraction);
            emit_field(&out, &fs)
        }
        Cmd::Decompose { input, out, report } => {
            let f = read_field(&input)?;
            let d = decompose_mixed(&f, &SpectralOptions::default())?;
            let r = &d.report;
            let csv = io::encode_csv(
                &["norm_delta_prime_fs", "norm_mu_fs", "norm_L_residual"],
                &[vec![format!("{:e}", r.norm_delta_prime_fs), format!("{:e}", r.norm_mu_fs), format!("{:e}", r.norm_l_residual)]],
            );
            let field_to_stdout = is_std(&out);
            emit_field(&out, &d.fs)?;
            match report {
                Some(p) => emit(&Some(p), &csv),
                None if field_to_stdout => {
                    std::io::stderr().write_all(&csv).map_err(|e| Failure::Validation(format!("stderr: {e}")))
                }
                None => emit(&None, &csv),
            }
        }
        Cmd::Rangecheck { input, rmax, out } => {
            let phi = read_sinogram(&input)?;
            let report = range_verdict(&phi, rmax, &RangeTolerances::default())?;
            let rows: Vec<Vec<String>> = report
                .moments
                .iter()
                .map(|m| vec![m.r.to_string(), m.allowed_halfwidth.to_string(), format!("{:e}", m.leakage)])
                .collect();
            emit(&out, &io::encode_csv(&["r", "allowed_halfwidth", "leakage"], &rows))?;
            eprintln!("mirt: parity residual {:.3e}", report.parity_residual);
            for f in &report.failures {
                eprintln!("mirt: {f}");
            }
            Ok(())
        }
        Cmd::Selftest { k, l, n, seed, out } => {
            check_n(n)?;
            let checks = selftest::run(&SelftestConfig { k, l, n, seed })?;
            let mut failed = Vec::new();
            let mut rows = Vec::new();
            for c in &checks {
                let op = match c.bound {
                    Bound::AtMost => "<=",
                    Bound::AtLeast => ">=",
                };
                let verdict = if c.pass() { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {} = {:.3e} ({op} {:.1e})", c.module, c.invariant, c.value, c.threshold);
                if !c.pass() {
                    failed.push(format!("{}: {}", c.module, c.invariant));
                }
                rows.push(vec![
                    c.module.to_string(),
                    c.invariant.to_string(),
                    format!("{:e}", c.value),
                    op.to_string(),
                    format!("{:e}", c.threshold),
                    c.pass().to_string(),
                ]);
            }
            if out.is_some() {
                emit(&out, &io::encode_csv(&["module", "invariant", "value", "bound", "threshold", "pass"], &rows))?;
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Tolerance(format!("failed invariants: {}", failed.join("; "))))
            }
        }
        Cmd::UcpDemo { preset, k, l, n, extent, seed, ntheta, out } => {
            check_n(n)?;
            check_extent(extent)?;
            check_ntheta(ntheta)?;
            let kind = match preset {
                KernelPreset::Potential => PresetKind::Potential,
                KernelPreset::Lambda => PresetKind::Lambda,
            };
            let tol = UcpTolerances::default();
            let r = kernel_demo(kind, k, l, &GridSpec::centered(n, extent)?, seed, ntheta, &tol)?;
            let rows = vec![
                vec!["forward".into(), format!("{:e}", r.forward_residual), format!("{:e}", tol.forward), r.forward_pass.to_string()],
                vec!["normal".into(), format!("{:e}", r.normal_residual), format!("{:e}", tol.normal), r.normal_pass.to_string()],
            ];
            emit(&out, &io::encode_csv(&["operator", "relative_residual", "tolerance", "pass"], &rows))?;
            if r.pass() {
                Ok(())
            } else {
                Err(Failure::Tolerance(format!("kernel field not annihilated: {r:?}")))
            }
        }
        Cmd::Render { input, prefix } => {
            let f = read_field(&input)?;
            Ok(io::write_pgm_planes(&prefix, &f)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    mirt::init_threads_from_env();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("mirt: error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Tolerance(m)) => {
            eprintln!("mirt: {m}");
            ExitCode::from(2)
        }
    }
}
