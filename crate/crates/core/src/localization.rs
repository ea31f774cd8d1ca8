//! Time and band projections, annihilation constants, thickness and the
//! local uncertainty inequality.
//!
//! `D(S, Σ)` is the best constant in `‖f‖_{L²(ℝ∖S)} ≥ D ‖f‖` for `f` with
//! spectrum in `Σ`, so `D² = 1 - λ_max(Q_Σ P_S Q_Σ)`. The operator is reduced
//! to `range(Q_Σ)`, spanned by the grid exponentials `u_k(x) = e^{2iπxξ_k}/√P`
//! for the dual samples `ξ_k ∈ Σ`. In that basis it is the Toeplitz matrix
//! `A_kl = P⁻¹ ∫_S e^{2iπx(ξ_l - ξ_k)} dx`, assembled from exact interval
//! integrals. Its size depends only on the dual spacing and `Σ`, not on `n`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{inner_product, inverse_fourier_transform, SampledFunction};
use crate::linalg::{block_power_iteration, hermitian_eigen, EigenPairs};
use crate::report::BoundReport;
use crate::sets::SetOnGrid;

/// Random draws used to spot-check the annihilation inequality.
pub const VERIFICATION_DRAWS: usize = 20;
/// Convergence threshold on the top Ritz value in the power route.
pub const POWER_TOLERANCE: f64 = 1e-10;
/// Relative band leakage tolerated by the band-limited checks.
pub const BAND_TOLERANCE: f64 = 1e-8;

/// Which solver produced an [`AnnihilationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    BlockPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub d: f64,
    /// `1/D`; infinite when `D = 0`.
    pub c_lower: f64,
    /// `1/D + 1`.
    pub c_upper: f64,
    pub top_eigenvalue: f64,
    /// Dimension of `range(Q_Σ)` on the grid.
    pub dimension: usize,
    pub method: EigenMethod,
    /// Smallest `‖P_S^⊥ f‖ / ‖f‖` seen over random `f ∈ range(Q_Σ)`.
    pub worst_sampled_ratio: f64,
    pub verified: bool,
    pub convention: String,
}

impl AnnihilationReport {
    fn new(top: f64, dimension: usize, method: EigenMethod) -> Self {
        let top = top.clamp(0.0, 1.0);
        let d = (1.0 - top).sqrt();
        let (c_lower, c_upper) = if d > 0.0 {
            (1.0 / d, 1.0 / d + 1.0)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        AnnihilationReport {
            d,
            c_lower,
            c_upper,
            top_eigenvalue: top,
            dimension,
            method,
            worst_sampled_ratio: f64::NAN,
            verified: false,
            convention: "D measures f outside S for spectrum in Sigma".into(),
        }
    }
}

/// `P_S f = χ_S f` on the grid.
pub fn project_time(f: &SampledFunction, s: &SetOnGrid) -> Result<SampledFunction> {
    s.grid().ensure_compatible(f.grid())?;
    let values = f
        .values()
        .iter()
        .zip(s.mask())
        .map(|(&v, &m)| if m { v } else { Complex64::new(0.0, 0.0) })
        .collect();
    SampledFunction::new(*f.grid(), values)
}

/// `Q_Σ f = (χ_Σ f̂)ˇ`; `Σ` lives on the dual grid of `f`.
pub fn project_band(f: &SampledFunction, sigma: &SetOnGrid) -> Result<SampledFunction> {
    let fhat = f.fourier_transform()?;
    let cut = project_time(&fhat, sigma)?;
    inverse_fourier_transform(&cut)
}

/// `‖f - Q_Σ f‖ / ‖f‖` (zero for the zero function).
pub fn band_leakage(f: &SampledFunction, sigma: &SetOnGrid) -> Result<f64> {
    let norm = f.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(f.sub(&project_band(f, sigma)?)?.norm() / norm)
}

/// Orthonormal exponentials spanning `range(Q_Σ)`.
#[derive(Debug, Clone)]
pub struct BandSubspace {
    sigma: SetOnGrid,
    indices: Vec<usize>,
}

impl BandSubspace {
    pub fn new(sigma: &SetOnGrid) -> Result<Self> {
        let indices: Vec<usize> = sigma
            .mask()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(k, _)| k)
            .collect();
        if indices.is_empty() {
            return Err(UcpError::degenerate("band set has no dual-grid samples"));
        }
        Ok(BandSubspace {
            sigma: sigma.clone(),
            indices,
        })
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Dual-grid indices of the basis exponentials.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sigma(&self) -> &SetOnGrid {
        &self.sigma
    }

    /// `Σ c_k u_k` on the time grid.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<SampledFunction> {
        if coefficients.len() != self.dim() {
            return Err(UcpError::invalid("coefficient count does not match subspace"));
        }
        let dual = *self.sigma.grid();
        let scale = (1.0 / dual.spacing()).sqrt();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); dual.n()];
        for (&k, &c) in self.indices.iter().zip(coefficients) {
            spectrum[k] = c * scale;
        }
        inverse_fourier_transform(&SampledFunction::new(dual, spectrum)?)
    }

    /// `⟨f, u_k⟩` for the basis exponentials.
    pub fn coefficients(&self, f: &SampledFunction) -> Result<Vec<Complex64>> {
        let fhat = f.fourier_transform()?;
        self.sigma.grid().ensure_compatible(fhat.grid())?;
        let scale = 1.0 / f.grid().period().sqrt();
        Ok(self.indices.iter().map(|&k| fhat.values()[k] * scale).collect())
    }

    /// The reduced matrix of `Q_Σ P_S Q_Σ`.
    pub fn concentration_matrix(&self, s: &SetOnGrid) -> Result<DMatrix<Complex64>> {
        if !s.grid().dual().is_compatible(self.sigma.grid()) {
            return Err(UcpError::invalid(
                "time set and band set are not on dual grids",
            ));
        }
        let p = s.grid().period();
        let m = self.dim();
        let span = self.indices[m - 1] as i64 - self.indices[0] as i64;
        let moments: Vec<Complex64> = (-span..=span).map(|d| s.fourier_moment(d) / p).collect();
        Ok(DMatrix::from_fn(m, m, |a, b| {
            let d = self.indices[b] as i64 - self.indices[a] as i64;
            moments[(d + span) as usize]
        }))
    }

    /// Deterministic random element of the subspace.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> Result<SampledFunction> {
        let c: Vec<Complex64> = (0..self.dim())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        self.synthesize(&c)
    }
}

/// Dense eigenpairs of the reduced concentration matrix, eigenvalues descending.
pub fn concentration_eigen(s: &SetOnGrid, sigma: &SetOnGrid) -> Result<(BandSubspace, EigenPairs)> {
    let sub = BandSubspace::new(sigma)?;
    let mut eig = hermitian_eigen(&sub.concentration_matrix(s)?)?;
    eig.values.reverse();
    eig.vectors.reverse();
    Ok((sub, eig))
}

fn verify(report: &mut AnnihilationReport, s: &SetOnGrid, sub: &BandSubspace) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = f64::INFINITY;
    for _ in 0..VERIFICATION_DRAWS {
        let f = sub.random_element(&mut rng)?;
        let outside = s.complement_energy(&f)?.max(0.0).sqrt();
        worst = worst.min(outside / f.norm());
    }
    report.worst_sampled_ratio = worst;
    report.verified = worst >= report.d - 1e-8;
    Ok(())
}

/// `D(S, Σ)` by a dense eigensolve of the reduced matrix.
pub fn annihilation_constant(s: &SetOnGrid, sigma: &SetOnGrid) -> Result<AnnihilationReport> {
    let (sub, eig) = concentration_eigen(s, sigma)?;
    let mut report = AnnihilationReport::new(eig.values[0], sub.dim(), EigenMethod::Dense);
    verify(&mut report, s, &sub)?;
    Ok(report)
}

/// `D(S, Σ)` by block power iteration on the full grid.
///
/// The operator is applied matrix-free as `v ↦ Q_Σ(ω v)`, with `ω` the set's
/// exact quadrature weights divided by `h`; on `range(Q_Σ)` this equals the
/// reduced matrix of [`annihilation_constant`] without ever forming it.
pub fn annihilation_constant_power(s: &SetOnGrid, sigma: &SetOnGrid) -> Result<AnnihilationReport> {
    let sub = BandSubspace::new(sigma)?;
    if !s.grid().dual().is_compatible(sigma.grid()) {
        return Err(UcpError::invalid("time set and band set are not on dual grids"));
    }
    let grid = *s.grid();
    let h = grid.spacing();
    let omega: Vec<f64> = s.weights().iter().map(|w| w / h).collect();
    let block = (((s.measure() * sigma.measure()).ceil() as usize) + 12).min(sub.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    let start = (0..block)
        .map(|_| sub.random_element(&mut rng).map(SampledFunction::into_values))
        .collect::<Result<Vec<_>>>()?;
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let weighted: Vec<Complex64> = v.iter().zip(&omega).map(|(a, w)| a * w).collect();
        let f = SampledFunction::new(grid, weighted).expect("finite samples");
        project_band(&f, sigma)
            .expect("grids checked above")
            .into_values()
    };
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * h
    };
    let res = block_power_iteration(apply, start, inner, POWER_TOLERANCE, 10_000)?;
    if !res.converged {
        return Err(UcpError::precision(format!(
            "power iteration did not converge in {} sweeps",
            res.iterations
        )));
    }
    let mut report = AnnihilationReport::new(res.values[0], sub.dim(), EigenMethod::BlockPower);
    verify(&mut report, s, &sub)?;
    Ok(report)
}

/// Norms `‖(Q_Σ P_S)^k f‖` for `k = 0..=iterations`, `P_S` the sample mask.
pub fn iterated_projection_norms(
    f: &SampledFunction,
    s: &SetOnGrid,
    sigma: &SetOnGrid,
    iterations: usize,
) -> Result<Vec<f64>> {
    let mut g = f.clone();
    let mut norms = vec![g.norm()];
    for _ in 0..iterations {
        g = project_band(&project_time(&g, s)?, sigma)?;
        norms.push(g.norm());
    }
    Ok(norms)
}

/// Nazarov-type comparison curve `c₀ e^{c₁ |S| |Σ|}` for caller-supplied constants.
pub fn nazarov_curve(c0: f64, c1: f64, s_measure: f64, sigma_measure: f64) -> f64 {
    c0 * (c1 * s_measure * sigma_measure).exp()
}

/// `γ = inf_x |E ∩ [x - a, x + a]| / (2a)` over centres `x` whose window fits
/// inside the grid window.
///
/// The overlap is piecewise linear in `x` with breakpoints at interval
/// endpoints `± a`, so the infimum is attained on that finite candidate set.
pub fn thickness(e: &SetOnGrid, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(UcpError::invalid(format!("scale a must be positive, got {a}")));
    }
    let grid = e.grid();
    let lo = grid.point(0) + a;
    let hi = grid.point(grid.n() - 1) - a;
    if 2.0 * grid.half_width() < 4.0 * a || lo > hi {
        return Err(UcpError::invalid(format!(
            "window of length {} is shorter than 4a = {}",
            2.0 * grid.half_width(),
            4.0 * a
        )));
    }
    let mut candidates = vec![lo, hi];
    for iv in e.intervals().intervals() {
        for p in [iv.start - a, iv.start + a, iv.end - a, iv.end + a] {
            if p > lo && p < hi {
                candidates.push(p);
            }
        }
    }
    let gamma = candidates
        .iter()
        .map(|&x| e.intervals().overlap(x - a, x + a))
        .fold(f64::INFINITY, f64::min)
        / (2.0 * a);
    Ok(gamma.min(1.0))
}

/// `‖f‖² / ∫_E |f|²` for `f` with spectrum in `[-1, 1]`; `+∞` when `f` has no
/// energy on `E`.
pub fn kovrizhkin_ratio(f: &SampledFunction, e: &SetOnGrid) -> Result<f64> {
    let band = SetOnGrid::symmetric(f.grid().dual(), 1.0)?;
    let leak = band_leakage(f, &band)?;
    if leak > BAND_TOLERANCE {
        return Err(UcpError::invalid(format!(
            "f is not band-limited to [-1, 1]: relative leakage {leak:.3e}"
        )));
    }
    let norm_sq = f.norm_sq();
    if norm_sq == 0.0 {
        return Err(UcpError::degenerate("zero function"));
    }
    let on_e = e.energy(f)?;
    if on_e <= norm_sq * 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(norm_sq / on_e)
}

/// `K(α, d) = (d + 2α)² / (2α)^{4α/d} · (d - 2α)^{2α/d - 2}`.
pub fn faris_constant(alpha: f64, d: u32) -> Result<f64> {
    let df = d as f64;
    if d < 1 || !(alpha > 0.0 && alpha < df / 2.0) {
        return Err(UcpError::invalid(format!(
            "need 0 < alpha < d/2 with d >= 1, got alpha = {alpha}, d = {d}"
        )));
    }
    Ok((df + 2.0 * alpha).powi(2) / (2.0 * alpha).powf(4.0 * alpha / df)
        * (df - 2.0 * alpha).powf(2.0 * alpha / df - 2.0))
}

/// `‖ |x|^α f ‖₂²`.
pub fn weighted_norm_sq(f: &SampledFunction, alpha: f64) -> f64 {
    let h = f.grid().spacing();
    f.grid()
        .points()
        .zip(f.values())
        .map(|(x, v)| x.abs().powf(2.0 * alpha) * v.norm_sqr())
        .sum::<f64>()
        * h
}

/// `∫_E |f̂|² ≤ K(α,1) |E|^{2α} ‖|x|^α f‖²`, `E` on the dual grid.
pub fn local_uncertainty_check(f: &SampledFunction, e: &SetOnGrid, alpha: f64) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(UcpError::invalid(format!("need 0 < alpha < 1/2, got {alpha}")));
    }
    let fhat = f.fourier_transform()?;
    let lhs = e.energy(&fhat)?.max(0.0);
    let k = faris_constant(alpha, 1)?;
    let rhs = k * e.measure().powf(2.0 * alpha) * weighted_norm_sq(f, alpha);
    Ok(BoundReport::at_most("local_uncertainty", lhs, rhs, 1e-8, 1e-6)
        .with_note(format!("K(alpha={alpha}, d=1) = {k}")))
}

/// Lower bound `‖f‖_{L²(ℝ∖S)} ≥ D ‖f‖` checked for one `f`.
pub fn annihilation_check(f: &SampledFunction, s: &SetOnGrid, report: &AnnihilationReport) -> Result<BoundReport> {
    let lhs = s.complement_energy(f)?.max(0.0).sqrt();
    let rhs = report.d * f.norm();
    Ok(BoundReport::at_least("annihilation", lhs, rhs, 1e-8, 1e-6))
}

/// Relative orthogonality of two band-limited functions, used by tests.
pub fn overlap(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    Ok(inner_product(f, g)?.norm() / (f.norm() * g.norm()))
}

/// `2π T Ω`, the usual prolate bandwidth parameter for `[-T,T] × [-Ω,Ω]`.
pub fn bandwidth_parameter(t: f64, omega: f64) -> f64 {
    2.0 * PI * t * omega
}
