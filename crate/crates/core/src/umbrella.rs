//! Envelope concentration radii, spherical-code bounds and the umbrella
//! certificate bounding orthonormal families dominated by fixed envelopes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{Grid, SampledFunction};
use crate::sets::SetOnGrid;

/// Number of log-spaced `ε` values tried by [`umbrella_bound`].
pub const EPSILON_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    /// `C e^{-πa x²}`
    Gaussian { c: f64, a: f64 },
    /// `C (1 + |x|)^{-p}`
    Power { c: f64, p: f64 },
    Tabulated { function: SampledFunction },
}

impl Envelope {
    pub fn gaussian(c: f64, a: f64) -> Result<Self> {
        if !(c > 0.0 && a > 0.0 && c.is_finite() && a.is_finite()) {
            return Err(UcpError::invalid("gaussian envelope needs C > 0 and a > 0"));
        }
        Ok(Envelope::Gaussian { c, a })
    }

    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && p > 0.5 && p.is_finite()) {
            return Err(UcpError::invalid(
                "power envelope needs C > 0 and p > 1/2 to be square integrable",
            ));
        }
        Ok(Envelope::Power { c, p })
    }

    pub fn tabulated(function: SampledFunction) -> Result<Self> {
        if function
            .values()
            .iter()
            .any(|v| v.re < 0.0 || v.im != 0.0)
        {
            return Err(UcpError::invalid("tabulated envelope must be real and nonnegative"));
        }
        Ok(Envelope::Tabulated { function })
    }

    /// Pointwise `|f|` as a tabulated envelope.
    pub fn modulus_of(f: &SampledFunction) -> Self {
        Envelope::Tabulated {
            function: f.map(|v| Complex64::new(v.norm(), 0.0)),
        }
    }

    /// Pointwise maximum of `|f_k|` over a family on one grid.
    pub fn pointwise_max(family: &[SampledFunction]) -> Result<Self> {
        let first = family
            .first()
            .ok_or_else(|| UcpError::invalid("empty family"))?;
        let mut m = vec![0.0f64; first.grid().n()];
        for f in family {
            first.grid().ensure_compatible(f.grid())?;
            for (acc, v) in m.iter_mut().zip(f.values()) {
                *acc = acc.max(v.norm());
            }
        }
        Ok(Envelope::Tabulated {
            function: SampledFunction::new(
                *first.grid(),
                m.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            )?,
        })
    }

    pub fn norm(&self) -> f64 {
        match *self {
            Envelope::Gaussian { c, a } => c * (2.0 * a).powf(-0.25),
            Envelope::Power { c, p } => c * (2.0 / (2.0 * p - 1.0)).sqrt(),
            Envelope::Tabulated { ref function } => function.norm(),
        }
    }

    /// Envelope value at `x`, used to check domination.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Envelope::Gaussian { c, a } => c * (-PI * a * x * x).exp(),
            Envelope::Power { c, p } => c * (1.0 + x.abs()).powf(-p),
            Envelope::Tabulated { ref function } => {
                let g = function.grid();
                let j = ((x / g.spacing()).round() + g.origin() as f64) as isize;
                if j < 0 || j as usize >= g.n() {
                    0.0
                } else {
                    function.values()[j as usize].re
                }
            }
        }
    }

    /// Sample spacing of a tabulated envelope.
    fn slack(&self) -> f64 {
        match self {
            Envelope::Tabulated { function } => function.grid().spacing(),
            _ => 0.0,
        }
    }
}

fn bisect(mut lo: f64, mut hi: f64, iterations: usize, mut above: impl FnMut(f64) -> bool) -> f64 {
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1e-300) {
            break;
        }
    }
    hi
}

/// `inf { T : ∫_{|t|>T} |φ|² ≤ ε² ‖φ‖² }`.
pub fn concentration_radius(phi: &Envelope, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(UcpError::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let e2 = epsilon * epsilon;
    match *phi {
        Envelope::Gaussian { a, .. } => {
            let k = (2.0 * PI * a).sqrt();
            let mut hi = 1.0;
            while libm::erfc(k * hi) > e2 {
                hi *= 2.0;
            }
            Ok(bisect(0.0, hi, 200, |t| libm::erfc(k * t) <= e2))
        }
        Envelope::Power { p, .. } => Ok((epsilon.powf(-2.0 / (2.0 * p - 1.0)) - 1.0).max(0.0)),
        Envelope::Tabulated { ref function } => tabulated_radius(function, e2),
    }
}

fn tabulated_radius(f: &SampledFunction, e2: f64) -> Result<f64> {
    let grid = *f.grid();
    let total = f.norm_sq();
    if total == 0.0 {
        return Err(UcpError::degenerate("zero envelope"));
    }
    let tail = |t: f64| -> Result<f64> {
        Ok((total - SetOnGrid::symmetric(grid, t)?.energy(f)?).max(0.0))
    };
    let hi = -grid.point(0);
    let mut failure = None;
    let t = bisect(0.0, hi, 200, |t| match tail(t) {
        Ok(v) => v <= e2 * total,
        Err(e) => {
            failure.get_or_insert(e);
            true
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

/// Which spherical-code bound produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Trivial,
    Volume,
    Dgs,
    ClosedForm,
}

/// `2d` when `α < 1/(2d)`: the code is then linearly independent.
pub fn trivial_code_bound(d_complex: u64, alpha: f64) -> Option<f64> {
    let real_dim = 2.0 * d_complex as f64;
    (alpha < 1.0 / real_dim).then_some(real_dim)
}

/// `((2 - α)/(1 - α))^{2d}`.
pub fn volume_code_bound(d_complex: u64, alpha: f64) -> f64 {
    ((2.0 - alpha) / (1.0 - alpha)).powf(2.0 * d_complex as f64)
}

/// `2d (1 - α²)/(1 - 2α²d)` when `α < 1/√(2d)`.
pub fn dgs_code_bound(d_complex: u64, alpha: f64) -> Option<f64> {
    let d = d_complex as f64;
    (alpha < 1.0 / (2.0 * d).sqrt())
        .then(|| 2.0 * d * (1.0 - alpha * alpha) / (1.0 - 2.0 * alpha * alpha * d))
}

/// Smallest applicable bound on a `[-α, α]` code in `ℂ^d ≅ ℝ^{2d}`, floored.
pub fn spherical_code_bound(d_complex: u64, alpha: f64) -> Result<(u64, BoundSource)> {
    if d_complex < 1 || !(0.0..1.0).contains(&alpha) {
        return Err(UcpError::invalid(format!(
            "need d >= 1 and 0 <= alpha < 1, got d = {d_complex}, alpha = {alpha}"
        )));
    }
    let mut best = (volume_code_bound(d_complex, alpha), BoundSource::Volume);
    for cand in [
        dgs_code_bound(d_complex, alpha).map(|v| (v, BoundSource::Dgs)),
        trivial_code_bound(d_complex, alpha).map(|v| (v, BoundSource::Trivial)),
    ]
    .into_iter()
    .flatten()
    {
        if cand.0.floor() <= best.0.floor() {
            best = cand;
        }
    }
    Ok((saturating_floor(best.0), best.1))
}

fn saturating_floor(v: f64) -> u64 {
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v.floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmbrellaCertificate {
    pub m: f64,
    pub epsilon: f64,
    pub t: f64,
    pub d: u64,
    pub eta: f64,
    /// `η²/(1-η)²`, the value used.
    pub alpha: f64,
    /// `η²/(1-η²)`, as printed alongside the proof.
    pub alpha_printed: f64,
    pub bound: u64,
    pub bound_source: BoundSource,
}

/// `η²/(1-η)²`.
pub fn code_angle(eta: f64) -> f64 {
    eta * eta / ((1.0 - eta) * (1.0 - eta))
}

/// Certificate at one `ε`.
pub fn certificate_at(phi: &Envelope, psi: &Envelope, epsilon: f64) -> Result<UmbrellaCertificate> {
    let m = phi.norm().max(psi.norm());
    if !(epsilon > 0.0 && epsilon < 1.0 / (50.0 * m)) {
        return Err(UcpError::invalid(format!(
            "epsilon must lie in (0, 1/(50M)) = (0, {})",
            1.0 / (50.0 * m)
        )));
    }
    let t = (concentration_radius(phi, epsilon)? + phi.slack())
        .max(concentration_radius(psi, epsilon)? + psi.slack());
    let d = (4.0 * t * t).floor() as u64 + 1;
    let eta = 7.0 * m * epsilon;
    let alpha = code_angle(eta);
    if alpha >= 1.0 {
        return Err(UcpError::UnboundedCertificate(format!("alpha = {alpha} >= 1")));
    }
    let (bound, bound_source) = spherical_code_bound(d, alpha)?;
    Ok(UmbrellaCertificate {
        m,
        epsilon,
        t,
        d,
        eta,
        alpha,
        alpha_printed: eta * eta / (1.0 - eta * eta),
        bound,
        bound_source,
    })
}

/// Best certificate over `ε` log-spaced strictly inside `(10⁻⁶/M, 1/(50M))`.
pub fn umbrella_bound(phi: &Envelope, psi: &Envelope) -> Result<UmbrellaCertificate> {
    let m = phi.norm().max(psi.norm());
    if !(m.is_finite() && m > 0.0) {
        return Err(UcpError::invalid("envelopes must have finite nonzero norm"));
    }
    let (lo, hi) = ((1e-6 / m).ln(), (1.0 / (50.0 * m)).ln());
    let mut best: Option<UmbrellaCertificate> = None;
    let mut last_err = None;
    for i in 0..EPSILON_STEPS {
        let s = (i + 1) as f64 / (EPSILON_STEPS + 1) as f64;
        match certificate_at(phi, psi, (lo + s * (hi - lo)).exp()) {
            Ok(c) => {
                if best.as_ref().is_none_or(|b| c.bound < b.bound) {
                    best = Some(c);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or_else(|| UcpError::UnboundedCertificate("no admissible epsilon".into()))
    })
}

/// `2 + (2/(πa)) max(1 + ln(C/a^{5/2}), π + ½ ln(C²/(2a)))`, the max clamped at 0.
pub fn gaussian_envelope_bound(c: f64, a: f64) -> Result<f64> {
    if !(c > 0.0 && a > 0.0) {
        return Err(UcpError::invalid("need C > 0 and a > 0"));
    }
    let first = 1.0 + (c / a.powf(2.5)).ln();
    let second = PI + 0.5 * (c * c / (2.0 * a)).ln();
    Ok(2.0 + 2.0 / (PI * a) * first.max(second).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEnvelopeBounds {
    /// `3^{8 (20C/√(2p-1))^{4/(2p-1)}}`
    pub volume: f64,
    /// Value of the branch selected by `p`.
    pub branch: f64,
    pub branch_source: BoundSource,
    /// Set when the branch value is below one or infinite.
    pub inconsistent: bool,
}

/// Closed forms for `φ = ψ = C(1+|x|)^{-p}`, `p > 1`.
pub fn power_envelope_bound(c: f64, p: f64) -> Result<PowerEnvelopeBounds> {
    if !(c > 0.0 && c.is_finite()) || !(p > 1.0 && p.is_finite()) {
        return Err(UcpError::invalid("need C > 0 and p > 1"));
    }
    let q = 2.0 * p - 1.0;
    let volume = 3f64.powf(8.0 * (20.0 * c / q.sqrt()).powf(4.0 / q));
    let (branch, branch_source) = if p > 1.5 {
        (4.0 * (800.0 * c * c / q).powf(2.0 / (2.0 * p - 3.0)), BoundSource::Trivial)
    } else if p == 1.5 {
        (f64::INFINITY, BoundSource::Dgs)
    } else {
        (32.0 * (20.0 * c).powf(2.0 / (2.0 * p - 3.0)), BoundSource::Dgs)
    };
    Ok(PowerEnvelopeBounds {
        volume,
        branch,
        branch_source,
        inconsistent: !(branch.is_finite() && branch >= 1.0),
    })
}

/// Angle statistics of the code built from a family by projecting onto the
/// first `d` coordinates, as in the umbrella argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedCode {
    /// `max ‖e_n - P e_n‖`
    pub eta: f64,
    /// `max |⟨a_n, a_m⟩|` over `n ≠ m`
    pub max_raw: f64,
    /// `min ‖a_n‖`
    pub min_norm: f64,
    /// `max |⟨b_n, b_m⟩|` with `b_n = a_n/‖a_n‖`
    pub max_normalized: f64,
    /// `η²/(1-η)²`
    pub alpha: f64,
}

impl ProjectedCode {
    /// The three inequalities of the argument, each with relative slack `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.max_raw <= self.eta * self.eta * (1.0 + tol) + tol
            && self.min_norm >= (1.0 - self.eta) * (1.0 - tol)
            && (self.eta >= 1.0 || self.max_normalized <= self.alpha * (1.0 + tol) + tol)
    }
}

/// `coefficients[n]` holds the coordinates of `e_n` in an orthonormal basis
/// whose first `d` vectors span the projection range.
pub fn projected_code(coefficients: &[Vec<Complex64>], d: usize) -> Result<ProjectedCode> {
    if coefficients.iter().any(|c| c.len() < d) {
        return Err(UcpError::invalid("coordinate vectors shorter than d"));
    }
    let a: Vec<&[Complex64]> = coefficients.iter().map(|c| &c[..d]).collect();
    let norms: Vec<f64> = a
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let eta = coefficients
        .iter()
        .map(|c| c[d..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut max_raw = 0.0f64;
    let mut max_normalized = 0.0f64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let ip: Complex64 = a[i].iter().zip(a[j]).map(|(x, y)| x * y.conj()).sum();
            max_raw = max_raw.max(ip.norm());
            max_normalized = max_normalized.max(ip.norm() / (norms[i] * norms[j]));
        }
    }
    Ok(ProjectedCode {
        eta,
        max_raw,
        min_norm: norms.iter().copied().fold(f64::INFINITY, f64::min),
        max_normalized,
        alpha: code_angle(eta),
    })
}

/// Grid the envelope is most naturally sampled on, for export.
pub fn sample_envelope(phi: &Envelope, grid: Grid) -> SampledFunction {
    SampledFunction::from_real_fn(grid, |x| phi.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_bound_examples() {
        assert_eq!(spherical_code_bound(3, 0.1).unwrap(), (6, BoundSource::Trivial));
        assert_eq!(spherical_code_bound(2, 0.3).unwrap(), (5, BoundSource::Dgs));
        assert!((dgs_code_bound(2, 0.3).unwrap() - 5.6875).abs() < 1e-12);
        assert!((volume_code_bound(1, 1.0 / 3.0) - 6.25).abs() < 1e-12);
        assert_eq!(spherical_code_bound(1, 1.0 / 3.0).unwrap(), (2, BoundSource::Trivial));
        assert!(spherical_code_bound(0, 0.1).is_err());
        assert!(spherical_code_bound(2, 1.0).is_err());
    }

    #[test]
    fn gaussian_closed_form() {
        assert!((gaussian_envelope_bound(1.0, 1.0).unwrap() - 3.77937).abs() < 1e-4);
        assert!((gaussian_envelope_bound(std::f64::consts::E, 1.0).unwrap() - 4.41598).abs() < 1e-4);
        let far = gaussian_envelope_bound(1.0, 1e9).unwrap();
        assert!((2.0..2.0 + 1e-8).contains(&far));
    }

    #[test]
    fn power_closed_forms() {
        let b = power_envelope_bound(1.0, 2.0).unwrap();
        assert!((b.branch - 4.0 * (800.0f64 / 3.0).powi(2)).abs() < 1e-6);
        assert_eq!(b.branch_source, BoundSource::Trivial);
        let expected = 3f64.powf(8.0 * (20.0 / 3f64.sqrt()).powf(4.0 / 3.0));
        assert!((b.volume / expected - 1.0).abs() < 1e-12);
        let b = power_envelope_bound(1.0, 1.25).unwrap();
        assert!((b.branch - 32.0 * 20f64.powi(-4)).abs() < 1e-15);
        assert!(b.inconsistent);
        assert!(power_envelope_bound(1.0, 1.5).unwrap().inconsistent);
        assert!(power_envelope_bound(1.0, 1.0).is_err());
    }

    #[test]
    fn radius_limits() {
        let g = Envelope::gaussian(1.0, 1.0).unwrap();
        assert!(concentration_radius(&g, 1.0 - 1e-12).unwrap() < 1e-10);
        assert!(concentration_radius(&g, 1.0).is_err());
        let p = Envelope::power(1.0, 2.0).unwrap();
        let t = concentration_radius(&p, 0.1).unwrap();
        assert!(((1.0 + t).powf(-3.0) - 0.01).abs() < 1e-14);
    }

    #[test]
    fn envelope_validation() {
        assert!(Envelope::power(1.0, 0.5).is_err());
        assert!(Envelope::gaussian(0.0, 1.0).is_err());
        let grid = Grid::with_half_width(4.0, 64).unwrap();
        let neg = SampledFunction::from_real_fn(grid, |x| x);
        assert!(Envelope::tabulated(neg).is_err());
    }
}
