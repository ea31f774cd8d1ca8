//! Bargmann transform and Gaussian-envelope diagnostics.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::SampledFunction;

/// Half-width of the Gaussian kernel support the window must cover around `Re z`.
pub const KERNEL_REACH: f64 = 6.0;
/// Samples below this fraction of the peak are left out of envelope fits.
pub const FIT_FLOOR: f64 = 1e-12;
/// Tolerance around `ab = 1` in [`hardy_classify`].
pub const HARDY_TOLERANCE: f64 = 0.05;

/// `F(z) = e^{πz²/2} ∫ f(x) e^{-π(x-z)²} dx`.
///
/// The kernel is paired bilinearly with `f` (no conjugation), which keeps
/// `F` holomorphic in `z`.
pub fn bargmann(f: &SampledFunction, z: Complex64) -> Result<Complex64> {
    let grid = f.grid();
    let lo = grid.point(0);
    let hi = grid.point(grid.n() - 1);
    if z.re - KERNEL_REACH < lo || z.re + KERNEL_REACH > hi {
        return Err(UcpError::precision(format!(
            "window [{lo}, {hi}] does not cover Re z ± {KERNEL_REACH} for z = {z}"
        )));
    }
    // e^{πz²/2 - π(x-z)²} = e^{-πx² + 2πxz - πz²/2}
    let half = -PI * z * z / 2.0;
    let acc: Complex64 = grid
        .points()
        .zip(f.values())
        .filter(|(x, _)| (x - z.re).abs() <= KERNEL_REACH + 1.0)
        .map(|(x, &v)| v * (Complex64::new(-PI * x * x, 0.0) + 2.0 * PI * x * z + half).exp())
        .sum();
    Ok(acc * grid.spacing())
}

/// `|∂F/∂z̄| / (|∂F/∂x| + |∂F/∂y|)` by centered differences with step `step`.
pub fn cauchy_riemann_residual(f: &SampledFunction, z: Complex64, step: f64) -> Result<f64> {
    let dx = (bargmann(f, z + step)? - bargmann(f, z - step)?) / (2.0 * step);
    let i = Complex64::new(0.0, step);
    let dy = (bargmann(f, z + i)? - bargmann(f, z - i)?) / (2.0 * step);
    let scale = dx.norm() + dy.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((dx + Complex64::i() * dy).norm() / (2.0 * scale))
}

/// Rows `(Re z, Im z, Re F, Im F)`.
pub fn bargmann_samples(f: &SampledFunction, zs: &[Complex64]) -> Result<Vec<[f64; 4]>> {
    zs.iter()
        .map(|&z| bargmann(f, z).map(|v| [z.re, z.im, v.re, v.im]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub log_amplitude: f64,
    /// Coefficient `N` of `log(1 + |x|)`.
    pub poly_degree_proxy: f64,
    /// Coefficient `a` of `-πx²`.
    pub gauss_rate: f64,
    /// Weighted RMS of the log residual.
    pub residual: f64,
    pub samples: usize,
}

/// Weighted least squares of `log|f| ≈ log C + N log(1+|x|) - πa x²`,
/// weights `|f|^{1/2}`.
pub fn envelope_fit(f: &SampledFunction) -> Result<EnvelopeFit> {
    let peak = f.max_abs();
    if peak == 0.0 {
        return Err(UcpError::degenerate("zero function"));
    }
    let rows: Vec<(f64, f64)> = f
        .grid()
        .points()
        .zip(f.values())
        .map(|(x, v)| (x, v.norm()))
        .filter(|&(_, m)| m > FIT_FLOOR * peak)
        .collect();
    if rows.len() < 8 {
        return Err(UcpError::invalid(format!(
            "only {} samples above the fit floor, need 8",
            rows.len()
        )));
    }
    let m = rows.len();
    let sw: Vec<f64> = rows.iter().map(|&(_, a)| (a / peak).powf(0.25)).collect();
    let design = DMatrix::from_fn(m, 3, |r, c| {
        let x = rows[r].0;
        sw[r] * match c {
            0 => 1.0,
            1 => (1.0 + x.abs()).ln(),
            _ => -PI * x * x,
        }
    });
    let rhs = DVector::from_fn(m, |r, _| sw[r] * rows[r].1.ln());
    let svd = design.clone().svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| UcpError::precision(format!("least squares failed: {e}")))?;
    let resid = &design * &coef - &rhs;
    let wsum: f64 = sw.iter().map(|w| w * w).sum();
    Ok(EnvelopeFit {
        log_amplitude: coef[0],
        poly_degree_proxy: coef[1],
        gauss_rate: coef[2],
        residual: (resid.norm_squared() / wsum).sqrt(),
        samples: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyClass {
    Subcritical,
    Critical,
    /// The fitted envelopes cannot both be genuine global bounds.
    ClaimsImpossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub a: f64,
    pub b: f64,
    pub ab: f64,
    pub class: HardyClass,
}

/// Fitted Gaussian rates of `f` and `f̂` and the regime of their product.
pub fn hardy_classify(f: &SampledFunction) -> Result<HardyReport> {
    let a = envelope_fit(f)?.gauss_rate;
    let b = envelope_fit(&f.fourier_transform()?)?.gauss_rate;
    let ab = a * b;
    let class = if ab > 1.0 + HARDY_TOLERANCE {
        HardyClass::ClaimsImpossible
    } else if ab < 1.0 - HARDY_TOLERANCE {
        HardyClass::Subcritical
    } else {
        HardyClass::Critical
    };
    Ok(HardyReport { a, b, ab, class })
}
