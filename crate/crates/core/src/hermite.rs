//! Orthonormal Hermite functions `h_k` for the `e^{-2iπxξ}` convention.
//!
//! `h_0(t) = 2^{1/4} e^{-πt²}` and
//! `h_{k+1}(t) = (2√π t / √(k+1)) h_k(t) - √(k/(k+1)) h_{k-1}(t)`.
//! They satisfy `ĥ_k = (-i)^k h_k` and `H h_k = (2k+1)/(2π) h_k`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, UcpError};
use crate::grid::{Grid, SampledFunction};

/// Largest |h_K| tolerated at the window edge.
pub const BOUNDARY_THRESHOLD: f64 = 1e-12;

/// Expansion tail (relative to `‖f‖²`) above which the operator is not applied.
pub const OPERATOR_TAIL_TOLERANCE: f64 = 1e-6;

/// Values `h_0(t), ..., h_k_max(t)`.
pub fn hermite_values(k_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let h0 = 2f64.powf(0.25) * (-PI * t * t).exp();
    out.push(h0);
    if k_max == 0 {
        return out;
    }
    let c = 2.0 * PI.sqrt() * t;
    out.push(c * h0);
    for k in 1..k_max {
        let kf = k as f64;
        let next = c / (kf + 1.0).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub fn hermite_value(k: usize, t: f64) -> f64 {
    hermite_values(k, t)[k]
}

/// `(2k+1) / (2π)`.
pub fn hermite_eigenvalue(k: usize) -> f64 {
    (2 * k + 1) as f64 / (2.0 * PI)
}

/// Smallest half-width beyond which `|h_k|` stays below `threshold`.
///
/// Past the turning point `t² = (2k+1)/(2π)` the function decays
/// monotonically, so a forward scan from there finds the crossing.
pub fn admissible_half_width(k: usize, threshold: f64) -> f64 {
    let turning = ((2 * k + 1) as f64 / (2.0 * PI)).sqrt();
    let mut t = turning;
    let step = 1e-3;
    while hermite_value(k, t).abs() >= threshold {
        t += step;
    }
    t
}

#[derive(Debug, Clone)]
pub struct HermiteBasis {
    grid: Grid,
    functions: Vec<SampledFunction>,
}

/// `h_0..h_K` sampled on `grid`.
///
/// Both the time window and the dual window must be wide enough that `h_K`
/// has decayed below [`BOUNDARY_THRESHOLD`]; otherwise the transforms of the
/// basis would alias.
pub fn hermite_basis(grid: Grid, max_index: usize) -> Result<HermiteBasis> {
    let window = grid.half_width().min(grid.dual().half_width());
    let edge = grid.point(0).abs().min(grid.dual().point(0).abs());
    let edge_value = hermite_value(max_index, edge).abs();
    if edge_value >= BOUNDARY_THRESHOLD {
        let needed = admissible_half_width(max_index, BOUNDARY_THRESHOLD);
        return Err(UcpError::precision(format!(
            "|h_{max_index}| = {edge_value:.3e} at the window edge (half-width {window}); \
             both time and frequency half-widths must be at least {needed:.4}"
        )));
    }
    let n = grid.n();
    let mut rows = vec![Vec::with_capacity(n); max_index + 1];
    for x in grid.points() {
        for (row, v) in rows.iter_mut().zip(hermite_values(max_index, x)) {
            row.push(Complex64::new(v, 0.0));
        }
    }
    let functions = rows
        .into_iter()
        .map(|values| SampledFunction::from_parts(grid, values))
        .collect();
    Ok(HermiteBasis { grid, functions })
}

impl HermiteBasis {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn max_index(&self) -> usize {
        self.functions.len() - 1
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    pub fn function(&self, k: usize) -> &SampledFunction {
        &self.functions[k]
    }

    /// Coefficients `⟨f, h_k⟩` for `k = 0..=K`.
    pub fn expand(&self, f: &SampledFunction) -> Result<Vec<Complex64>> {
        self.grid.ensure_compatible(f.grid())?;
        let h = self.grid.spacing();
        Ok(self
            .functions
            .iter()
            .map(|hk| {
                f.values()
                    .iter()
                    .zip(hk.values())
                    .map(|(a, b)| a * b.re)
                    .sum::<Complex64>()
                    * h
            })
            .collect())
    }

    /// `Σ c_k h_k`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<SampledFunction> {
        if coefficients.len() > self.functions.len() {
            return Err(UcpError::invalid(format!(
                "{} coefficients for a basis of size {}",
                coefficients.len(),
                self.functions.len()
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); self.grid.n()];
        for (c, hk) in coefficients.iter().zip(&self.functions) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (v, b) in values.iter_mut().zip(hk.values()) {
                *v += c * b.re;
            }
        }
        Ok(SampledFunction::from_parts(self.grid, values))
    }

    /// `‖f‖² - Σ |⟨f, h_k⟩|²`, the energy the basis misses.
    pub fn expansion_tail(&self, f: &SampledFunction) -> Result<f64> {
        let c = self.expand(f)?;
        Ok(f.norm_sq() - c.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    /// `H f = Σ_{k≤K} (2k+1)/(2π) ⟨f, h_k⟩ h_k`.
    pub fn apply_operator(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let coefficients = self.expand(f)?;
        let captured: f64 = coefficients.iter().map(|z| z.norm_sqr()).sum();
        let norm_sq = f.norm_sq();
        let tail = norm_sq - captured;
        if tail > OPERATOR_TAIL_TOLERANCE * norm_sq {
            return Err(UcpError::precision(format!(
                "expansion tail {tail:.3e} exceeds {OPERATOR_TAIL_TOLERANCE:e} of ‖f‖² = {norm_sq:.3e}; \
                 increase the basis size"
            )));
        }
        let scaled: Vec<Complex64> = coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * hermite_eigenvalue(k))
            .collect();
        self.synthesize(&scaled)
    }

    /// Largest `|⟨h_j, h_k⟩ - δ_jk|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, hj) in self.functions.iter().enumerate() {
            let c = self.expand(hj).expect("same grid");
            for (k, v) in c.iter().enumerate() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    /// Largest `‖ĥ_k - (-i)^k h_k‖₂` over the basis, `h_k` evaluated on the
    /// dual grid.
    pub fn fourier_eigen_deviation(&self) -> Result<f64> {
        let dual = self.grid.dual();
        let k_max = self.max_index();
        let on_dual: Vec<Vec<f64>> = dual.points().map(|x| hermite_values(k_max, x)).collect();
        let mut worst: f64 = 0.0;
        for (k, hk) in self.functions.iter().enumerate() {
            let fhat = hk.fourier_transform()?;
            let phase = Complex64::new(0.0, -1.0).powu(k as u32);
            let err: f64 = fhat
                .values()
                .iter()
                .zip(&on_dual)
                .map(|(v, row)| (v - phase * row[k]).norm_sqr())
                .sum::<f64>()
                * dual.spacing();
            worst = worst.max(err.sqrt());
        }
        Ok(worst)
    }
}

/// `⟨f, h_k⟩` for `k ≤ K`.
pub fn hermite_expand(f: &SampledFunction, basis: &HermiteBasis) -> Result<Vec<Complex64>> {
    basis.expand(f)
}

pub fn apply_hermite_operator(f: &SampledFunction, basis: &HermiteBasis) -> Result<SampledFunction> {
    basis.apply_operator(f)
}
