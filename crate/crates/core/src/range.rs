//! Necessary conditions for a sinogram to be a mixed ray transform: the antipodal parity symmetry and the
//! band limit of its `s`-moments in `θ`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::Sinogram;

/// `max |φ(−s, θ+π) − (−1)^{k+ℓ} φ(s, θ)| / ‖φ‖∞`.
pub fn parity_residual(phi: &Sinogram) -> Result<f64> {
    let g = phi.grid;
    if g.ns.is_multiple_of(2) {
        return Err(Error::GridParity(format!("ns = {} is even, so -s is not sampled", g.ns)));
    }
    if !g.ntheta.is_multiple_of(2) {
        return Err(Error::GridParity(format!("ntheta = {} is odd", g.ntheta)));
    }
    let sign = if (phi.k() + phi.l()).is_multiple_of(2) { 1.0 } else { -1.0 };
    let d = phi.data();
    let half = g.ntheta / 2;
    let mut worst: f64 = 0.0;
    for j in 0..g.ntheta {
        let jj = (j + half) % g.ntheta;
        for i in 0..g.ns {
            worst = worst.max((d[[jj, g.ns - 1 - i]] - sign * d[[j, i]]).abs());
        }
    }
    Ok(worst / (phi.max_abs() + f64::MIN_POSITIVE))
}

/// `m_r(θ_j) = ∫ s^r φ(s, θ_j) ds`, trapezoid in `s`.
pub fn moment(phi: &Sinogram, r: usize) -> Vec<f64> {
    let g = phi.grid;
    let sw: Vec<f64> = (0..g.ns).map(|i| g.s_weight(i) * g.s(i).powi(r as i32)).collect();
    phi.data().outer_iter().map(|row| row.iter().zip(&sw).map(|(v, w)| v * w).sum()).collect()
}

/// θ-spectrum of one moment and the share of its energy outside the allowed band.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSpectrum {
    pub r: usize,
    /// `k + ℓ + r`: allowed frequencies are `|f| ≤` this with the same parity.
    pub allowed_halfwidth: usize,
    /// `(frequency, energy)` for every DFT bin, frequencies in `(−ntheta/2, ntheta/2]`.
    pub energies: Vec<(i64, f64)>,
    pub leakage: f64,
}

pub fn is_allowed(freq: i64, halfwidth: usize) -> bool {
    freq.unsigned_abs() as usize <= halfwidth && (freq - halfwidth as i64).rem_euclid(2) == 0
}

pub fn moment_spectrum(phi: &Sinogram, r: usize) -> MomentSpectrum {
    let nt = phi.grid.ntheta;
    let mut buf: Vec<Complex64> = moment(phi, r).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(nt).process(&mut buf);
    let halfwidth = phi.k() + phi.l() + r;
    let energies: Vec<(i64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(u, v)| {
            let f = if u <= nt / 2 { u as i64 } else { u as i64 - nt as i64 };
            (f, v.norm_sqr())
        })
        .collect();
    let total: f64 = energies.iter().map(|e| e.1).sum();
    let outside: f64 = energies.iter().filter(|(f, _)| !is_allowed(*f, halfwidth)).map(|e| e.1).sum();
    let leakage = if total > 0.0 { outside / total } else { 0.0 };
    MomentSpectrum { r, allowed_halfwidth: halfwidth, energies, leakage }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeTolerances {
    pub parity: f64,
    pub leakage: f64,
}

impl Default for RangeTolerances {
    fn default() -> Self {
        RangeTolerances { parity: 1e-8, leakage: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub r: usize,
    pub allowed_halfwidth: usize,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub parity_residual: f64,
    pub moments: Vec<MomentRow>,
    /// One line per violated condition.
    pub failures: Vec<String>,
}

impl RangeReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn range_verdict(phi: &Sinogram, r_max: usize, tol: &RangeTolerances) -> Result<RangeReport> {
    let parity = parity_residual(phi)?;
    let mut failures = Vec::new();
    if !(parity <= tol.parity) {
        failures.push(format!("parity residual {parity:.3e} exceeds {:.1e}", tol.parity));
    }
    let moments: Vec<MomentRow> = (0..=r_max)
        .map(|r| {
            let s = moment_spectrum(phi, r);
            MomentRow { r, allowed_halfwidth: s.allowed_halfwidth, leakage: s.leakage }
        })
        .collect();
    for m in &moments {
        if !(m.leakage <= tol.leakage) {
            failures.push(format!("moment r={} leaks {:.3e} of its energy outside |f| <= {}", m.r, m.leakage, m.allowed_halfwidth));
        }
    }
    Ok(RangeReport { parity_residual: parity, moments, failures })
}

/// Adds `α cos((k+ℓ+r+1)θ) b(s)` with `∫ s^r b = 1`, choosing `α` so the added moment has `ratio` times the RMS
/// of the existing `m_r`. The result violates the band condition for moment `r` only.
pub fn contaminate(phi: &Sinogram, r: usize, ratio: f64) -> Sinogram {
    let g = phi.grid;
    let m = moment(phi, r);
    let rms = (m.iter().map(|v| v * v).sum::<f64>() / m.len() as f64).sqrt();
    let alpha = ratio * std::f64::consts::SQRT_2 * rms;
    let w = g.s_max / 4.0;
    let shape: Vec<f64> = (0..g.ns).map(|i| g.s(i).powi(r as i32) * (-(g.s(i) / w).powi(2)).exp()).collect();
    let norm: f64 = (0..g.ns).map(|i| g.s_weight(i) * g.s(i).powi(r as i32) * shape[i]).sum();
    let freq = (phi.k() + phi.l() + r + 1) as f64;
    let mut out = phi.clone();
    for (j, mut row) in out.data_mut().outer_iter_mut().enumerate() {
        let a = alpha * (freq * g.theta(j)).cos() / norm;
        for (v, b) in row.iter_mut().zip(&shape) {
            *v += a * b;
        }
    }
    out
}
