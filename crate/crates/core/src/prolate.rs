//! Prolate spheroidal functions as eigenfunctions of `Q_Ω P_T Q_Ω`,
//! the Landau–Pollak approximation bound and cardinal-series sampling.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{Grid, Interpolator, SampledFunction};
use crate::localization::{band_leakage, concentration_eigen, BAND_TOLERANCE};
use crate::report::BoundReport;
use crate::sets::SetOnGrid;

#[derive(Debug, Clone)]
pub struct ProlateSystem {
    t: f64,
    omega: f64,
    eigenvalues: Vec<f64>,
    functions: Vec<SampledFunction>,
    d: usize,
    time_set: SetOnGrid,
    band_set: SetOnGrid,
}

impl ProlateSystem {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Concentrations `∫_{|t|≤T} |ψ_n|²`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    pub fn function(&self, index: usize) -> Option<&SampledFunction> {
        self.functions.get(index)
    }

    /// `⌊4TΩ⌋ + 1`.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.time_set.grid()
    }

    /// `[-T, T]` on the time grid.
    pub fn time_set(&self) -> &SetOnGrid {
        &self.time_set
    }

    /// `[-Ω, Ω]` on the dual grid.
    pub fn band_set(&self) -> &SetOnGrid {
        &self.band_set
    }

    /// Number of eigenvalues above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }

    /// Rows `(n, λ_n)`.
    pub fn eigenvalue_table(&self) -> Vec<(usize, f64)> {
        self.eigenvalues.iter().copied().enumerate().collect()
    }

    /// `P_d f = Σ_{k<d} ⟨f, ψ_k⟩ ψ_k`.
    pub fn project(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if self.len() < self.d {
            return Err(UcpError::invalid(format!(
                "system holds {} functions but d = {}",
                self.len(),
                self.d
            )));
        }
        let mut acc = SampledFunction::zeros(*f.grid());
        for psi in &self.functions[..self.d] {
            acc = acc.add_scaled(f.inner(psi)?, psi)?;
        }
        Ok(acc)
    }
}

/// Grid phase and sign convention: the largest sample is made real, then
/// `ψ_n(0) > 0` for even `n` and `ψ_n(h) - ψ_n(-h) > 0` for odd `n`.
fn normalize_sign(psi: SampledFunction, index: usize) -> SampledFunction {
    let values = psi.values();
    let peak = values
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let psi = if peak.norm() > 0.0 {
        psi.scaled(peak.conj() / peak.norm())
    } else {
        psi
    };
    let o = psi.grid().origin();
    let v = psi.values();
    let key = if index.is_multiple_of(2) {
        v[o].re
    } else {
        v[o + 1].re - v[o - 1].re
    };
    if key < 0.0 {
        psi.scaled(Complex64::new(-1.0, 0.0))
    } else {
        psi
    }
}

/// Top `count` eigenpairs of `Q_Ω P_T Q_Ω`.
pub fn prolate_system(grid: Grid, t: f64, omega: f64, count: usize) -> Result<ProlateSystem> {
    if !(t.is_finite() && t > 0.0 && omega.is_finite() && omega > 0.0) {
        return Err(UcpError::invalid("T and Omega must be positive"));
    }
    if 2.0 * grid.half_width() < 4.0 * t {
        return Err(UcpError::invalid(format!(
            "time window half-width {} is smaller than 2T = {}",
            grid.half_width(),
            2.0 * t
        )));
    }
    let dual = grid.dual();
    if 2.0 * dual.half_width() < 4.0 * omega {
        return Err(UcpError::invalid(format!(
            "dual window half-width {} is smaller than 2 Omega = {}",
            dual.half_width(),
            2.0 * omega
        )));
    }
    let time_set = SetOnGrid::symmetric(grid, t)?;
    let band_set = SetOnGrid::symmetric(dual, omega)?;
    let (sub, eig) = concentration_eigen(&time_set, &band_set)?;
    if count > sub.dim() {
        return Err(UcpError::invalid(format!(
            "requested {count} prolates but the band space has dimension {}",
            sub.dim()
        )));
    }
    let mut functions = Vec::with_capacity(count);
    for (index, c) in eig.vectors.iter().take(count).enumerate() {
        functions.push(normalize_sign(sub.synthesize(c)?, index));
    }
    Ok(ProlateSystem {
        t,
        omega,
        eigenvalues: eig.values[..count].iter().map(|l| l.clamp(0.0, 1.0)).collect(),
        functions,
        d: (4.0 * t * omega).floor() as usize + 1,
        time_set,
        band_set,
    })
}

/// Tail energies entering the Landau–Pollak hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTails {
    /// `∫_{|t|>T} |f|²`
    pub time: f64,
    /// `∫_{|ξ|>Ω} |f̂|²`
    pub frequency: f64,
    pub norm_sq: f64,
}

impl ConcentrationTails {
    /// Smallest `ε` for which both hypotheses hold.
    pub fn smallest_epsilon(&self) -> f64 {
        (self.time.max(self.frequency) / self.norm_sq).sqrt()
    }
}

pub fn concentration_tails(f: &SampledFunction, sys: &ProlateSystem) -> Result<ConcentrationTails> {
    let fhat = f.fourier_transform()?;
    Ok(ConcentrationTails {
        time: sys.time_set.complement_energy(f)?.max(0.0),
        frequency: sys.band_set.complement_energy(&fhat)?.max(0.0),
        norm_sq: f.norm_sq(),
    })
}

/// `‖f - P_d f‖² ≤ 49 ε² ‖f‖²` for `f` concentrated to `ε` in time and band.
///
/// The frequency tail is taken over `|ξ| > Ω`.
pub fn landau_pollak_check(f: &SampledFunction, sys: &ProlateSystem, epsilon: f64) -> Result<BoundReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(UcpError::invalid("epsilon must be positive"));
    }
    sys.grid().ensure_compatible(f.grid())?;
    let tails = concentration_tails(f, sys)?;
    if tails.norm_sq == 0.0 {
        return Err(UcpError::degenerate("zero function"));
    }
    let allowed = epsilon * epsilon * tails.norm_sq;
    if tails.time > allowed * (1.0 + 1e-12) || tails.frequency > allowed * (1.0 + 1e-12) {
        let which = if tails.time > allowed {
            format!("time tail {:.6e}", tails.time)
        } else {
            format!("frequency tail {:.6e}", tails.frequency)
        };
        return Err(UcpError::invalid(format!(
            "{which} exceeds eps^2 |f|^2 = {allowed:.6e}; smallest admissible eps = {:.6e}",
            tails.smallest_epsilon()
        )));
    }
    let residual = f.sub(&sys.project(f)?)?.norm_sq();
    Ok(BoundReport::at_most(
        "landau_pollak",
        residual,
        49.0 * allowed,
        0.0,
        1e-6,
    )
    .with_note("frequency tail measured over |xi| > Omega"))
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// Truncated cardinal series `Σ_{|k|≤K} f(k/2Ω) sinc(π(2Ωx - k))`.
pub fn shannon_reconstruct(f: &SampledFunction, omega: f64, half_terms: usize) -> Result<SampledFunction> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(UcpError::invalid("Omega must be positive"));
    }
    let band = SetOnGrid::symmetric(f.grid().dual(), omega)?;
    let leak = band_leakage(f, &band)?;
    if leak > BAND_TOLERANCE {
        return Err(UcpError::invalid(format!(
            "f is not band-limited to [-{omega}, {omega}]: relative leakage {leak:.3e}"
        )));
    }
    let interp = Interpolator::new(f)?;
    let k_max = half_terms as i64;
    let samples: Vec<(f64, Complex64)> = (-k_max..=k_max)
        .map(|k| (k as f64, interp.eval(k as f64 / (2.0 * omega))))
        .collect();
    Ok(SampledFunction::from_fn(*f.grid(), |x| {
        samples
            .iter()
            .map(|&(k, s)| s * sinc(PI * (2.0 * omega * x - k)))
            .sum()
    }))
}

/// Coefficient of `x²` in the operator commuting with time-band limiting:
/// `(2πΩ)²` for the `e^{2iπxξ}` transform.
pub fn commuting_coefficient(omega: f64) -> f64 {
    (2.0 * PI * omega).powi(2)
}

/// The coefficient as printed in the source formula, `Ω²/T²`.
pub fn printed_coefficient(t: f64, omega: f64) -> f64 {
    omega * omega / (t * t)
}

/// Relative residual of `Lψ = χψ` inside `|x| < T` for the operator
/// `L = (T² - x²) d²/dx² - 2x d/dx - c x²` with the commuting `c`.
pub fn differential_operator_residual(sys: &ProlateSystem, index: usize) -> Result<f64> {
    differential_operator_residual_with(sys, index, commuting_coefficient(sys.omega))
}

/// As [`differential_operator_residual`] with an explicit `x²` coefficient.
pub fn differential_operator_residual_with(sys: &ProlateSystem, index: usize, coefficient: f64) -> Result<f64> {
    let psi = sys
        .function(index)
        .ok_or_else(|| UcpError::invalid(format!("index {index} out of range (have {})", sys.len())))?;
    operator_residual(psi, sys.t, coefficient)
}

/// Fourth-order centered differences, fitted eigenvalue, relative residual
/// over the grid points in `|x| < T`.
pub fn operator_residual(psi: &SampledFunction, t: f64, coefficient: f64) -> Result<f64> {
    let grid = psi.grid();
    let h = grid.spacing();
    let v = psi.values();
    let n = grid.n();
    let mut l_psi = Vec::new();
    let mut region = Vec::new();
    for j in 2..n - 2 {
        let x = grid.point(j);
        if x.abs() >= t {
            continue;
        }
        let d1 = (v[j - 2] - v[j - 1] * 8.0 + v[j + 1] * 8.0 - v[j + 2]) / (12.0 * h);
        let d2 = (-v[j - 2] + v[j - 1] * 16.0 - v[j] * 30.0 + v[j + 1] * 16.0 - v[j + 2])
            / (12.0 * h * h);
        l_psi.push(d2 * (t * t - x * x) - d1 * (2.0 * x) - v[j] * (coefficient * x * x));
        region.push(v[j]);
    }
    let norm_sq: f64 = region.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(UcpError::degenerate("function vanishes on |x| < T"));
    }
    let chi = l_psi
        .iter()
        .zip(&region)
        .map(|(l, p)| l * p.conj())
        .sum::<Complex64>()
        / norm_sq;
    let res: f64 = l_psi
        .iter()
        .zip(&region)
        .map(|(l, p)| (l - chi * p).norm_sqr())
        .sum();
    Ok((res / norm_sq).sqrt())
}
