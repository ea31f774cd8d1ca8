//! Free heat and Schrödinger flows as exact Fourier multipliers, with the
//! energy lower bounds outside sets of finite measure.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{inverse_fourier_transform, Grid, SampledFunction};
use crate::localization::{annihilation_constant, band_leakage, thickness, BAND_TOLERANCE};
use crate::report::BoundReport;
use crate::sets::SetOnGrid;

/// Relative energy allowed in the edge samples of a localized state.
pub const WRAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `-∂_t v + (1/4π) ∂²_x v = 0`, multiplier `e^{-πξ²t}`.
    Heat,
    /// `i ∂_t v + (1/4π) ∂²_x v = 0`, multiplier `e^{-iπξ²t}`.
    Schrodinger,
}

impl std::str::FromStr for Equation {
    type Err = UcpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(Equation::Heat),
            "schrodinger" => Ok(Equation::Schrodinger),
            other => Err(UcpError::invalid(format!(
                "unknown equation '{other}', expected heat or schrodinger"
            ))),
        }
    }
}

fn multiplier(equation: Equation, xi: f64, t: f64) -> Complex64 {
    match equation {
        Equation::Heat => Complex64::new((-PI * xi * xi * t).exp(), 0.0),
        Equation::Schrodinger => Complex64::from_polar(1.0, -PI * xi * xi * t),
    }
}

fn is_localized(f: &SampledFunction) -> bool {
    f.boundary_mass() <= WRAP_TOLERANCE * f.norm_sq()
}

/// `v(·, t)` from `v₀` by one multiplier application.
///
/// When `v₀` is negligible at the window edges the result must be too,
/// otherwise the periodic transform would have wrapped mass around and a
/// window-too-small error is returned. Data that already reaches the edges is
/// treated as periodic and propagated as is.
pub fn propagate(v0: &SampledFunction, t: f64, equation: Equation) -> Result<SampledFunction> {
    if !t.is_finite() {
        return Err(UcpError::invalid("time must be finite"));
    }
    if equation == Equation::Heat && t < 0.0 {
        return Err(UcpError::invalid(format!("backward heat flow is excluded (t = {t})")));
    }
    if t == 0.0 {
        return Ok(v0.clone());
    }
    let vhat = v0.fourier_transform()?;
    let dual = *vhat.grid();
    let values = dual
        .points()
        .zip(vhat.values())
        .map(|(xi, &v)| v * multiplier(equation, xi, t))
        .collect();
    let v = inverse_fourier_transform(&SampledFunction::new(dual, values)?)?;
    if is_localized(v0) && v.boundary_mass() > WRAP_TOLERANCE * v0.norm_sq().max(f64::MIN_POSITIVE) {
        return Err(UcpError::WindowTooSmall(format!(
            "state at t = {t} carries relative edge energy {:.3e}",
            v.boundary_mass() / v0.norm_sq()
        )));
    }
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub equation: Equation,
    pub v0: SampledFunction,
    pub times: Vec<f64>,
    pub states: Vec<SampledFunction>,
    pub norms: Vec<f64>,
}

pub fn run(v0: &SampledFunction, times: &[f64], equation: Equation) -> Result<EvolutionRun> {
    let states = times
        .iter()
        .map(|&t| propagate(v0, t, equation))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionRun {
        equation,
        v0: v0.clone(),
        times: times.to_vec(),
        norms: states.iter().map(SampledFunction::norm).collect(),
        states,
    })
}

/// Export row `(t, ‖v‖, ‖v‖_{L²(ℝ∖S)}, rhs, pass)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationRow {
    pub t: f64,
    pub norm: f64,
    pub outside: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `‖v(·,t)‖_{L²(ℝ∖S)} ≥ D(S,Σ) ‖v₀‖` times `e^{-πa²t}` for heat with `Σ = [-a, a]`.
pub fn dissipation_report(run: &EvolutionRun, s: &SetOnGrid, sigma: &SetOnGrid) -> Result<Vec<BoundReport>> {
    let leak = band_leakage(&run.v0, sigma)?;
    if leak > BAND_TOLERANCE {
        return Err(UcpError::invalid(format!(
            "initial spectrum leaks outside Sigma: relative mass {leak:.3e}"
        )));
    }
    let decay_rate = match run.equation {
        Equation::Schrodinger => 0.0,
        Equation::Heat => {
            let iv = sigma.intervals().intervals();
            let symmetric = iv.len() == 1 && (iv[0].start + iv[0].end).abs() <= 1e-12 * iv[0].end.abs();
            if !symmetric {
                return Err(UcpError::invalid("heat bound needs Sigma = [-a, a]"));
            }
            PI * iv[0].end * iv[0].end
        }
    };
    let d = annihilation_constant(s, sigma)?.d;
    let norm0 = run.v0.norm();
    run.times
        .iter()
        .zip(&run.states)
        .map(|(&t, v)| {
            let lhs = s.complement_energy(v)?.max(0.0).sqrt();
            let rhs = d * norm0 * (-decay_rate * t).exp();
            Ok(BoundReport::at_least("dissipation", lhs, rhs, 1e-6, 1e-9)
                .with_note(format!("t = {t}, D = {d}")))
        })
        .collect()
}

pub fn dissipation_rows(run: &EvolutionRun, reports: &[BoundReport]) -> Vec<DissipationRow> {
    run.times
        .iter()
        .zip(&run.norms)
        .zip(reports)
        .map(|((&t, &norm), r)| DissipationRow {
            t,
            norm,
            outside: r.lhs,
            rhs: r.rhs,
            pass: r.pass,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickDispersion {
    pub gamma: f64,
    pub a: f64,
    pub times: Vec<f64>,
    /// `‖v(·,t)‖_{L²(E)} / ‖v₀‖`
    pub ratios: Vec<f64>,
    /// `C` solving `ratio = (γ/C)^{Ca}`, `C ≥ γ`.
    pub empirical_constants: Vec<f64>,
}

/// Solves `(γ/C)^{Ca} = ratio` for `C ≥ γ`; the left side decreases in `C`.
pub fn empirical_constant(gamma: f64, a: f64, ratio: f64) -> f64 {
    if ratio >= 1.0 {
        return gamma;
    }
    let target = ratio.ln();
    let g = |c: f64| c * a * (gamma / c).ln();
    let mut hi = gamma.max(1.0) * 2.0;
    while g(hi) > target {
        hi *= 2.0;
    }
    let mut lo = gamma;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Energy kept on a thick set `E` along the flow, for `v̂₀` supported in `[-1, 1]`.
pub fn thick_set_dispersion(run: &EvolutionRun, e: &SetOnGrid, a: f64) -> Result<ThickDispersion> {
    let band = SetOnGrid::symmetric(run.v0.grid().dual(), 1.0)?;
    let leak = band_leakage(&run.v0, &band)?;
    if leak > BAND_TOLERANCE {
        return Err(UcpError::invalid(format!(
            "initial spectrum leaks outside [-1, 1]: relative mass {leak:.3e}"
        )));
    }
    let gamma = thickness(e, a)?;
    if gamma <= 0.0 {
        return Err(UcpError::degenerate("set has thickness 0 at this scale"));
    }
    let norm0 = run.v0.norm();
    if norm0 == 0.0 {
        return Err(UcpError::degenerate("zero initial data"));
    }
    let ratios = run
        .states
        .iter()
        .map(|v| Ok(e.energy(v)?.max(0.0).sqrt() / norm0))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ThickDispersion {
        gamma,
        a,
        times: run.times.clone(),
        empirical_constants: ratios.iter().map(|&r| empirical_constant(gamma, a, r)).collect(),
        ratios,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpread {
    pub a: f64,
    pub t0: f64,
    pub t: f64,
    /// Fitted coefficient of `x²` in `log|v(x,t)|`.
    pub coefficient: f64,
    /// `-πa/(a² + (t - t₀)²)`
    pub expected: f64,
    pub relative_error: f64,
    pub pass: bool,
    /// `exp` of the fitted constant term.
    pub measured_prefactor: f64,
    /// `(a² + t₀²)^{1/4} / (a² + (t - t₀)²)^{1/4}`
    pub multiplier_prefactor: f64,
    /// `1/√(a² + (t - t₀)²)`
    pub printed_prefactor: f64,
}

/// Evolves `e^{-πx²/(a - it₀)}` under the Schrödinger flow and fits the
/// Gaussian exponent of `|v(·, t)|`.
pub fn gaussian_spread_check(a: f64, t0: f64, t: f64, grid: Grid) -> Result<GaussianSpread> {
    if !(a > 0.0 && a.is_finite() && t0.is_finite() && t.is_finite()) {
        return Err(UcpError::invalid("need a > 0 and finite times"));
    }
    let w = Complex64::new(a, -t0);
    let v0 = SampledFunction::from_fn(grid, |x| (-PI * x * x / w).exp());
    let v = propagate(&v0, t, Equation::Schrodinger)?;
    let peak = v.max_abs();
    let rows: Vec<(f64, f64)> = grid
        .points()
        .zip(v.values())
        .map(|(x, z)| (x, z.norm()))
        .filter(|&(_, m)| m > 1e-8 * peak)
        .collect();
    if rows.len() < 16 {
        return Err(UcpError::precision(format!(
            "only {} samples above 1e-8 of the peak",
            rows.len()
        )));
    }
    let design = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r].0.powi(c as i32));
    let rhs = DVector::from_fn(rows.len(), |r, _| rows[r].1.ln());
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| UcpError::precision(format!("least squares failed: {e}")))?;
    let tau = t - t0;
    let expected = -PI * a / (a * a + tau * tau);
    let relative_error = ((coef[2] - expected) / expected).abs();
    Ok(GaussianSpread {
        a,
        t0,
        t,
        coefficient: coef[2],
        expected,
        relative_error,
        pass: relative_error <= 1e-4,
        measured_prefactor: coef[0].exp(),
        multiplier_prefactor: ((a * a + t0 * t0) / (a * a + tau * tau)).powf(0.25),
        printed_prefactor: 1.0 / (a * a + tau * tau).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_half_width(16.0, 2048).unwrap()
    }

    fn gaussian() -> SampledFunction {
        SampledFunction::from_real_fn(grid(), |x| (-PI * x * x).exp())
    }

    #[test]
    fn heat_closed_form() {
        let v = propagate(&gaussian(), 1.0, Equation::Heat).unwrap();
        let exact = SampledFunction::from_real_fn(grid(), |x| (-PI * x * x / 2.0).exp() / 2f64.sqrt());
        assert!(v.sub(&exact).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn backward_heat_rejected() {
        assert!(matches!(
            propagate(&gaussian(), -1.0, Equation::Heat),
            Err(UcpError::InvalidInput(_))
        ));
        assert!(propagate(&gaussian(), -1.0, Equation::Schrodinger).is_ok());
    }

    #[test]
    fn zero_time_identity() {
        assert_eq!(propagate(&gaussian(), 0.0, Equation::Heat).unwrap(), gaussian());
    }

    #[test]
    fn wrap_detected() {
        let r = propagate(&gaussian(), 100.0, Equation::Schrodinger);
        assert!(matches!(r, Err(UcpError::WindowTooSmall(_))));
    }

    #[test]
    fn empirical_constant_solves_equation() {
        let c = empirical_constant(0.5, 1.0, 0.3);
        assert!(((0.5f64 / c).powf(c) - 0.3).abs() < 1e-12);
        assert_eq!(empirical_constant(0.5, 1.0, 1.0), 0.5);
    }

    #[test]
    fn spread_example() {
        let r = gaussian_spread_check(1.0, 0.0, 1.0, grid()).unwrap();
        assert!((r.coefficient + PI / 2.0).abs() < 1e-4 * PI / 2.0);
        assert!(r.pass);
        assert!((r.measured_prefactor - r.multiplier_prefactor).abs() < 1e-8);
    }

    #[test]
    fn parse_equation() {
        assert_eq!("heat".parse::<Equation>().unwrap(), Equation::Heat);
        assert!("wave".parse::<Equation>().is_err());
    }
}
