//! Closed-form test fields built from Gaussians, including exact elements of the transform's kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{FieldSource, SinogramGrid};
use crate::grid::GridSpec;
use crate::tensor::{n_components, ComponentIndex, MixedTensorField};

/// `amplitude · exp(−|x − center|² / σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub sigma: f64,
}

impl GaussianTerm {
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        self.amplitude * (-(d[0] * d[0] + d[1] * d[1]) / (self.sigma * self.sigma)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    /// The terms are the components themselves.
    Value,
    /// The terms describe a `(k−1, ℓ)` potential `u`; the field is `d′u`.
    DPrimeOfPotential,
    /// The terms describe a `(k−1, ℓ−1)` field `w`; the field is `λw`.
    LambdaOfLower,
}

/// One summand of an analytic field: Gaussian terms per source component and how to turn them into `(k, ℓ)`
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPart {
    pub kind: EvalKind,
    pub terms: Vec<Vec<GaussianTerm>>,
}

/// `(c0 + g·(x − x0)) · exp(−|x − x0|²/σ²)`: closed under one derivative of a Gaussian and under λ.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LinGauss {
    center: [f64; 2],
    sigma: f64,
    c0: f64,
    g: [f64; 2],
}

impl LinGauss {
    fn value(&self, x: [f64; 2]) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let e = (-(d[0] * d[0] + d[1] * d[1]) / (self.sigma * self.sigma)).exp();
        (self.c0 + self.g[0] * d[0] + self.g[1] * d[1]) * e
    }

    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let s2 = self.sigma * self.sigma;
        let e = (-(d[0] * d[0] + d[1] * d[1]) / s2).exp();
        let lin = self.c0 + self.g[0] * d[0] + self.g[1] * d[1];
        [(self.g[0] - 2.0 * d[0] / s2 * lin) * e, (self.g[1] - 2.0 * d[1] / s2 * lin) * e]
    }
}

/// A `(k, ℓ)` field known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFieldSpec {
    k: usize,
    l: usize,
    parts: Vec<AnalyticPart>,
    compiled: Vec<Vec<LinGauss>>,
}

/// Integration window in units of σ: `exp(−37) ≈ 8.5e−17`.
const CUTOFF_SIGMAS2: f64 = 37.0;

impl AnalyticFieldSpec {
    pub fn new(k: usize, l: usize, parts: Vec<AnalyticPart>) -> Result<Self> {
        let mut compiled = vec![Vec::new(); n_components(k, l)];
        for part in &parts {
            let (sk, sl) = match part.kind {
                EvalKind::Value => (k, l),
                EvalKind::DPrimeOfPotential if k >= 1 => (k - 1, l),
                EvalKind::LambdaOfLower if k >= 1 && l >= 1 => (k - 1, l - 1),
                _ => return Err(Error::Order { what: "k >= 1 (and l >= 1 for lambda)", k, l }),
            };
            if part.terms.len() != n_components(sk, sl) {
                return Err(Error::Shape(format!(
                    "{:?} part needs {} source components, got {}",
                    part.kind,
                    n_components(sk, sl),
                    part.terms.len()
                )));
            }
            for t in part.terms.iter().flatten() {
                if !(t.sigma > 0.0 && t.sigma.is_finite()) {
                    return Err(Error::Invalid(format!("gaussian width must be positive, got {}", t.sigma)));
                }
            }
            for ci in ComponentIndex::all(k, l) {
                let (p, q) = (ci.p, ci.q);
                let dst = &mut compiled[ci.offset(l)];
                let mut push = |src: &[GaussianTerm], c0: f64, g: [f64; 2]| {
                    for t in src {
                        dst.push(LinGauss {
                            center: t.center,
                            sigma: t.sigma,
                            c0: c0 * t.amplitude,
                            g: [g[0] * t.amplitude, g[1] * t.amplitude],
                        });
                    }
                };
                match part.kind {
                    EvalKind::Value => push(&part.terms[ci.offset(l)], 1.0, [0.0; 2]),
                    EvalKind::DPrimeOfPotential => {
                        // ∂_i of a Gaussian is −2(x_i − x0_i)/σ² times it; the σ factor is applied per term below.
                        let kf = k as f64;
                        if p < k {
                            let c = (k - p) as f64 / kf;
                            for t in &part.terms[p * (l + 1) + q] {
                                let s2 = t.sigma * t.sigma;
                                push(std::slice::from_ref(t), 0.0, [-2.0 * c / s2, 0.0]);
                            }
                        }
                        if p > 0 {
                            let c = p as f64 / kf;
                            for t in &part.terms[(p - 1) * (l + 1) + q] {
                                let s2 = t.sigma * t.sigma;
                                push(std::slice::from_ref(t), 0.0, [0.0, -2.0 * c / s2]);
                            }
                        }
                    }
                    EvalKind::LambdaOfLower => {
                        let kl = (k * l) as f64;
                        if p < k && q < l {
                            push(&part.terms[p * l + q], ((k - p) * (l - q)) as f64 / kl, [0.0; 2]);
                        }
                        if p > 0 && q > 0 {
                            push(&part.terms[(p - 1) * l + (q - 1)], (p * q) as f64 / kl, [0.0; 2]);
                        }
                    }
                }
            }
        }
        Ok(AnalyticFieldSpec { k, l, parts, compiled })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn parts(&self) -> &[AnalyticPart] {
        &self.parts
    }

    /// Sum of two specs of the same orders.
    pub fn plus(&self, other: &AnalyticFieldSpec) -> Result<Self> {
        if (self.k, self.l) != (other.k, other.l) {
            return Err(Error::Shape("adding analytic fields of different orders".into()));
        }
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Self::new(self.k, self.l, parts)
    }

    /// Exact `d′` of a field made only of plain Gaussians.
    pub fn dprime(&self) -> Result<Self> {
        let mut terms = vec![Vec::new(); n_components(self.k, self.l)];
        for part in &self.parts {
            if part.kind != EvalKind::Value {
                return Err(Error::Invalid("closed-form d' is only available for plain Gaussian fields".into()));
            }
            for (dst, src) in terms.iter_mut().zip(&part.terms) {
                dst.extend_from_slice(src);
            }
        }
        Self::new(self.k + 1, self.l, vec![AnalyticPart { kind: EvalKind::DPrimeOfPotential, terms }])
    }

    pub fn eval(&self, x: [f64; 2]) -> Vec<f64> {
        self.compiled.iter().map(|terms| terms.iter().map(|t| t.value(x)).sum()).collect()
    }

    /// `[∂₁, ∂₂]` of every component at `x`.
    pub fn gradient(&self, x: [f64; 2]) -> Vec<[f64; 2]> {
        self.compiled
            .iter()
            .map(|terms| {
                terms.iter().fold([0.0; 2], |acc, t| {
                    let g = t.gradient(x);
                    [acc[0] + g[0], acc[1] + g[1]]
                })
            })
            .collect()
    }

    pub fn to_grid(&self, grid: &GridSpec) -> MixedTensorField {
        let xs = grid.coords();
        let mut out = MixedTensorField::zeros(self.k, self.l, *grid);
        for ci in ComponentIndex::all(self.k, self.l) {
            let terms = &self.compiled[ci.offset(self.l)];
            let mut plane = out.plane_mut(ci.p, ci.q);
            for ((i, j), v) in plane.indexed_iter_mut() {
                *v = terms.iter().map(|t| t.value([xs[j], xs[i]])).sum();
            }
        }
        out
    }

    /// Checks every Gaussian (4σ ball) lies inside the grid extent.
    pub fn check_support(&self, grid: &GridSpec) -> Result<()> {
        for t in self.parts.iter().flat_map(|p| p.terms.iter().flatten()) {
            let r = 4.0 * t.sigma;
            let inside = |c: f64| c - r >= grid.x_min && c + r <= grid.x_max;
            if !(inside(t.center[0]) && inside(t.center[1])) {
                return Err(Error::SupportOverflow { cx: t.center[0], cy: t.center[1], sigma: t.sigma });
            }
        }
        Ok(())
    }
}

impl FieldSource for AnalyticFieldSpec {
    fn orders(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    fn sample(&self, x: [f64; 2]) -> Vec<f64> {
        self.eval(x)
    }

    fn project_row(&self, weights: &[f64], grid: &SinogramGrid, j: usize, out: &mut [f64]) {
        let (xi, eta) = (grid.xi(j), grid.eta(j));
        // Per term: (center offsets along η and ξ, σ², constant, slope along η, slope along ξ).
        let terms: Vec<_> = self
            .compiled
            .iter()
            .zip(weights)
            .flat_map(|(ts, &w)| ts.iter().map(move |t| (t, w)))
            .filter(|(_, w)| *w != 0.0)
            .map(|(t, w)| {
                let c_eta = t.center[0] * eta[0] + t.center[1] * eta[1];
                let c_xi = t.center[0] * xi[0] + t.center[1] * xi[1];
                let g_eta = w * (t.g[0] * eta[0] + t.g[1] * eta[1]);
                let g_xi = w * (t.g[0] * xi[0] + t.g[1] * xi[1]);
                (c_eta, c_xi, t.sigma * t.sigma, w * t.c0, g_eta, g_xi)
            })
            .collect();
        let (nt, c) = grid.t_nodes();
        let dt = grid.t_step;
        for (i, o) in out.iter_mut().enumerate() {
            let s = grid.s(i);
            let mut acc = 0.0;
            for &(c_eta, c_xi, s2, c0, g_eta, g_xi) in &terms {
                let d = s - c_eta;
                let rem = CUTOFF_SIGMAS2 * s2 - d * d;
                if rem <= 0.0 {
                    continue;
                }
                let half = rem.sqrt();
                let lo = (((c_xi - half) / dt).ceil() + c as f64).max(0.0) as usize;
                let hi = (((c_xi + half) / dt).floor() + c as f64).min((nt - 1) as f64);
                if hi < lo as f64 {
                    continue;
                }
                let pre = (-d * d / s2).exp();
                let lin0 = c0 + d * g_eta;
                let mut line = 0.0;
                for n in lo..=hi as usize {
                    let tau = grid.t(n) - c_xi;
                    let w = if n == 0 || n + 1 == nt { 0.5 } else { 1.0 };
                    line += w * (lin0 + tau * g_xi) * (-tau * tau / s2).exp();
                }
                acc += pre * line;
            }
            *o = acc * dt;
        }
    }
}

/// Which synthetic field to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// Generic random Gaussian mixture in every component.
    Gaussian,
    /// `d′u` for a random Gaussian potential `u`.
    Potential,
    /// `λw` for a random Gaussian `w`.
    Lambda,
    /// `d′u + λw` (just `d′u` when `ℓ = 0`).
    Mixed,
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(PresetKind::Gaussian),
            "potential" => Ok(PresetKind::Potential),
            "lambda" => Ok(PresetKind::Lambda),
            "mixed" => Ok(PresetKind::Mixed),
            _ => Err(Error::Invalid(format!("unknown preset {s:?}"))),
        }
    }
}

/// Shape of the random Gaussian mixtures, in units of the grid half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetParams {
    pub terms_per_component: usize,
    /// Centres are drawn uniformly in a disc of this radius around the grid centre.
    pub center_radius: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Default for PresetParams {
    fn default() -> Self {
        PresetParams { terms_per_component: 2, center_radius: 0.3, sigma_min: 0.05, sigma_max: 0.09 }
    }
}

fn random_terms(n: usize, grid: &GridSpec, params: &PresetParams, rng: &mut ChaCha8Rng) -> Vec<Vec<GaussianTerm>> {
    let a = grid.half_width();
    let c = grid.center();
    (0..n)
        .map(|_| {
            (0..params.terms_per_component)
                .map(|_| {
                    let r = params.center_radius * a * rng.random::<f64>().sqrt();
                    let phi = std::f64::consts::TAU * rng.random::<f64>();
                    let sigma = a * rng.random_range(params.sigma_min..=params.sigma_max);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    let amplitude = sign * rng.random_range(0.5..=1.0);
                    GaussianTerm { amplitude, center: [c + r * phi.cos(), c + r * phi.sin()], sigma }
                })
                .collect()
        })
        .collect()
}

pub fn make_preset(kind: PresetKind, k: usize, l: usize, grid: &GridSpec, seed: u64) -> Result<(AnalyticFieldSpec, MixedTensorField)> {
    make_preset_with(kind, k, l, grid, seed, &PresetParams::default())
}

pub fn make_preset_with(
    kind: PresetKind,
    k: usize,
    l: usize,
    grid: &GridSpec,
    seed: u64,
    params: &PresetParams,
) -> Result<(AnalyticFieldSpec, MixedTensorField)> {
    grid.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let potential = |rng: &mut ChaCha8Rng| -> Result<AnalyticPart> {
        if k == 0 {
            return Err(Error::Order { what: "k >= 1 for a potential field", k, l });
        }
        Ok(AnalyticPart { kind: EvalKind::DPrimeOfPotential, terms: random_terms(n_components(k - 1, l), grid, params, rng) })
    };
    let lambda = |rng: &mut ChaCha8Rng| -> Result<AnalyticPart> {
        if k == 0 || l == 0 {
            return Err(Error::Order { what: "k >= 1 and l >= 1 for a lambda field", k, l });
        }
        Ok(AnalyticPart { kind: EvalKind::LambdaOfLower, terms: random_terms(n_components(k - 1, l - 1), grid, params, rng) })
    };
    let parts = match kind {
        PresetKind::Gaussian => {
            vec![AnalyticPart { kind: EvalKind::Value, terms: random_terms(n_components(k, l), grid, params, &mut rng) }]
        }
        PresetKind::Potential => vec![potential(&mut rng)?],
        PresetKind::Lambda => vec![lambda(&mut rng)?],
        PresetKind::Mixed => {
            let mut parts = vec![potential(&mut rng)?];
            if l >= 1 {
                parts.push(lambda(&mut rng)?);
            }
            parts
        }
    };
    let spec = AnalyticFieldSpec::new(k, l, parts)?;
    spec.check_support(grid)?;
    let field = spec.to_grid(grid);
    Ok((spec, field))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(center: [f64; 2], sigma: f64) -> GaussianTerm {
        GaussianTerm { amplitude: 1.0, center, sigma }
    }

    #[test]
    fn lambda_of_scalar_is_kronecker() {
        let g = GaussianTerm { amplitude: 0.7, center: [0.1, -0.2], sigma: 0.2 };
        let spec = AnalyticFieldSpec::new(1, 1, vec![AnalyticPart { kind: EvalKind::LambdaOfLower, terms: vec![vec![g]] }]).unwrap();
        let x = [0.05, 0.1];
        let v = spec.eval(x);
        assert_eq!(v, vec![g.value(x), 0.0, 0.0, g.value(x)]);
    }

    #[test]
    fn potential_of_scalar_is_gradient() {
        let (x0, s) = ([0.2, -0.1], 0.3);
        let spec = AnalyticFieldSpec::new(1, 0, vec![AnalyticPart { kind: EvalKind::DPrimeOfPotential, terms: vec![vec![unit(x0, s)]] }]).unwrap();
        let x = [0.4, 0.15];
        let gv = unit(x0, s).value(x);
        let v = spec.eval(x);
        assert!((v[0] + 2.0 * (x[0] - x0[0]) / (s * s) * gv).abs() < 1e-15);
        assert!((v[1] + 2.0 * (x[1] - x0[1]) / (s * s) * gv).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let grid = GridSpec::centered(64, 1.0).unwrap();
        let (spec, _) = make_preset(PresetKind::Mixed, 2, 1, &grid, 9).unwrap();
        let x = [0.07, -0.11];
        let e = 1e-6;
        let g = spec.gradient(x);
        let (a, b) = (spec.eval([x[0] + e, x[1]]), spec.eval([x[0] - e, x[1]]));
        let (c, d) = (spec.eval([x[0], x[1] + e]), spec.eval([x[0], x[1] - e]));
        for i in 0..g.len() {
            let scale = 1.0 + g[i][0].abs() + g[i][1].abs();
            assert!(((a[i] - b[i]) / (2.0 * e) - g[i][0]).abs() < 1e-5 * scale);
            assert!(((c[i] - d[i]) / (2.0 * e) - g[i][1]).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let grid = GridSpec::centered(32, 1.0).unwrap();
        let (_, a) = make_preset(PresetKind::Gaussian, 1, 2, &grid, 42).unwrap();
        let (_, b) = make_preset(PresetKind::Gaussian, 1, 2, &grid, 42).unwrap();
        let (_, c) = make_preset(PresetKind::Gaussian, 1, 2, &grid, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn support_overflow_is_reported() {
        let grid = GridSpec::centered(32, 1.0).unwrap();
        let wide = PresetParams { sigma_min: 0.3, sigma_max: 0.3, ..Default::default() };
        let err = make_preset_with(PresetKind::Gaussian, 0, 0, &grid, 1, &wide).unwrap_err();
        assert!(matches!(err, Error::SupportOverflow { .. }));
    }

    #[test]
    fn order_errors() {
        let grid = GridSpec::centered(32, 1.0).unwrap();
        assert!(make_preset(PresetKind::Potential, 0, 2, &grid, 1).is_err());
        assert!(make_preset(PresetKind::Lambda, 2, 0, &grid, 1).is_err());
        assert!(make_preset(PresetKind::Mixed, 2, 0, &grid, 1).is_ok());
    }
}
