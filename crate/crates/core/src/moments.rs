//! Means, dispersions and the Heisenberg certificate.
//!
//! The variance is the unnormalized second moment `∫ (t - μ)² |f(t)|² dt`;
//! reports carry `‖f‖²` so callers normalize explicitly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::SampledFunction;
use crate::report::BoundReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub dispersion: f64,
    pub norm_sq: f64,
}

pub fn moments(f: &SampledFunction) -> Result<MomentReport> {
    let grid = f.grid();
    let h = grid.spacing();
    let norm_sq = f.norm_sq();
    if norm_sq == 0.0 {
        return Err(UcpError::degenerate("moments of the zero function"));
    }
    let first: f64 = grid
        .points()
        .zip(f.values())
        .map(|(x, v)| x * v.norm_sqr())
        .sum::<f64>()
        * h;
    let mean = first / norm_sq;
    let variance = grid
        .points()
        .zip(f.values())
        .map(|(x, v)| (x - mean).powi(2) * v.norm_sqr())
        .sum::<f64>()
        * h;
    Ok(MomentReport {
        mean,
        variance,
        dispersion: variance.sqrt(),
        norm_sq,
    })
}

/// Moments of `f` and of `f̂` (computed on the dual grid).
pub fn time_frequency_moments(f: &SampledFunction) -> Result<(MomentReport, MomentReport)> {
    let time = moments(f)?;
    let freq = moments(&f.fourier_transform()?)?;
    Ok((time, freq))
}

/// `⟨Hf, f⟩ = μ(f)²‖f‖² + Δ²(f) + μ(f̂)²‖f̂‖² + Δ²(f̂)` with
/// `H = -(1/4π²) d²/dt² + t²`.
pub fn hermite_form(f: &SampledFunction) -> Result<f64> {
    let (t, w) = time_frequency_moments(f)?;
    Ok(hermite_form_from(&t, &w))
}

pub(crate) fn hermite_form_from(t: &MomentReport, w: &MomentReport) -> f64 {
    t.mean * t.mean * t.norm_sq + t.variance + w.mean * w.mean * w.norm_sq + w.variance
}

/// `Δ(f) Δ(f̂) ≥ ‖f‖² / 4π`.
pub fn heisenberg_check(f: &SampledFunction) -> Result<BoundReport> {
    let (t, w) = time_frequency_moments(f)?;
    let lhs = t.dispersion * w.dispersion;
    let rhs = t.norm_sq / (4.0 * PI);
    Ok(BoundReport::at_least("heisenberg", lhs, rhs, 1e-8, 1e-6))
}
