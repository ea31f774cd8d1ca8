//! Mean–dispersion sums over orthonormal sequences and their Rayleigh–Ritz
//! compression onto the Hermite operator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{inner_product, SampledFunction};
use crate::hermite::{hermite_eigenvalue, HermiteBasis};
use crate::linalg::{hermitian_eigenvalues, orthonormalize};
use crate::moments::{hermite_form_from, time_frequency_moments};
use crate::report::BoundReport;

/// Largest Gram tolerance accepted by [`shapiro_sum`].
pub const SHAPIRO_GRAM_LIMIT: f64 = 1e-6;
/// Expansion tail (relative) accepted by [`rayleigh_ritz_compress`].
pub const COMPRESSION_TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OrthonormalSequence {
    members: Vec<SampledFunction>,
    gram_tolerance: f64,
}

impl OrthonormalSequence {
    /// Validates `|⟨e_j, e_k⟩ - δ_jk| ≤ gram_tolerance`.
    pub fn new(members: Vec<SampledFunction>, gram_tolerance: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(UcpError::invalid("empty sequence"));
        }
        let (worst, j, k) = gram_violation(&members)?;
        if worst > gram_tolerance {
            return Err(UcpError::invalid(format!(
                "sequence is not orthonormal: |<e_{j}, e_{k}> - delta| = {worst:.3e} > {gram_tolerance:e}"
            )));
        }
        Ok(OrthonormalSequence {
            members,
            gram_tolerance,
        })
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn gram_tolerance(&self) -> f64 {
        self.gram_tolerance
    }

    pub fn gram_deviation(&self) -> f64 {
        gram_violation(&self.members).map(|(w, _, _)| w).unwrap_or(f64::INFINITY)
    }

    /// The Hermite functions `h_0..h_{len-1}` of a basis.
    pub fn hermite(basis: &HermiteBasis, len: usize) -> Result<Self> {
        if len == 0 || len > basis.len() {
            return Err(UcpError::invalid(format!(
                "requested {len} Hermite functions from a basis of {}",
                basis.len()
            )));
        }
        OrthonormalSequence::new(basis.functions()[..len].to_vec(), 1e-8)
    }
}

fn gram_violation(members: &[SampledFunction]) -> Result<(f64, usize, usize)> {
    let mut worst = (0.0, 0, 0);
    for j in 0..members.len() {
        for k in j..members.len() {
            let g = inner_product(&members[j], &members[k])?;
            let target = if j == k { 1.0 } else { 0.0 };
            let d = (g - target).norm();
            if d > worst.0 {
                worst = (d, j, k);
            }
        }
    }
    Ok(worst)
}

/// Per-member term `Δ²(e) + Δ²(ê) + |μ(e)|² + |μ(ê)|²` for unit-norm `e`.
fn member_term(e: &SampledFunction) -> Result<(f64, f64)> {
    let norm = e.norm();
    let unit = e.normalized()?;
    let (t, w) = time_frequency_moments(&unit)?;
    Ok((hermite_form_from(&t, &w), (norm - 1.0).abs()))
}

/// `Σ_{k≤n} (Δ²(e_k) + Δ²(ê_k) + |μ(e_k)|² + |μ(ê_k)|²) ≥ (n+1)²/(2π)`.
///
/// Members are renormalized to unit norm; a note records any member whose
/// norm was off by more than `1e-8`. Equality is only ever reported as
/// "extremal within tolerance".
pub fn shapiro_sum(seq: &OrthonormalSequence, n: usize) -> Result<BoundReport> {
    if n >= seq.len() {
        return Err(UcpError::invalid(format!(
            "n = {n} but the sequence has {} members",
            seq.len()
        )));
    }
    if seq.gram_tolerance > SHAPIRO_GRAM_LIMIT {
        return Err(UcpError::invalid(format!(
            "gram tolerance {:e} exceeds {SHAPIRO_GRAM_LIMIT:e}",
            seq.gram_tolerance
        )));
    }
    let mut lhs = 0.0;
    let mut renormalized = Vec::new();
    for (k, e) in seq.members[..=n].iter().enumerate() {
        let (term, drift) = member_term(e)?;
        lhs += term;
        if drift > 1e-8 {
            renormalized.push(format!("member {k} renormalized (norm off by {drift:.2e})"));
        }
    }
    let rhs = ((n + 1) * (n + 1)) as f64 / (2.0 * PI);
    let mut report = BoundReport::at_least("shapiro_mean_dispersion", lhs, rhs, 1e-6, 1e-6);
    if report.extremal {
        report = report.with_note("extremal within tolerance");
    }
    for note in renormalized {
        report = report.with_note(note);
    }
    Ok(report)
}

/// [`shapiro_sum`] for every prefix `n = 0..len-1`.
pub fn shapiro_table(seq: &OrthonormalSequence) -> Result<Vec<BoundReport>> {
    (0..seq.len()).map(|n| shapiro_sum(seq, n)).collect()
}

/// `floor(8πC²)`: the most elements an orthonormal sequence can have when all
/// four means and dispersions are bounded by `C`.
pub fn max_sequence_size(c: f64) -> Result<u64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(UcpError::invalid(format!("C must be positive, got {c}")));
    }
    Ok((8.0 * PI * c * c).floor() as u64)
}

fn coefficients(v: &OrthonormalSequence, basis: &HermiteBasis) -> Result<Vec<Vec<Complex64>>> {
    v.members
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let c = basis.expand(e)?;
            let captured: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let norm_sq = e.norm_sq();
            let tail = norm_sq - captured;
            if tail > COMPRESSION_TAIL_TOLERANCE * norm_sq {
                return Err(UcpError::precision(format!(
                    "member {j} has expansion tail {tail:.3e} (> {COMPRESSION_TAIL_TOLERANCE:e} relative)"
                )));
            }
            Ok(c)
        })
        .collect()
}

/// Matrix `M_jk = ⟨H e_j, e_k⟩` of the Hermite operator compressed onto
/// `span(V)`, assembled from Hermite coefficients.
pub fn compressed_operator(v: &OrthonormalSequence, basis: &HermiteBasis) -> Result<DMatrix<Complex64>> {
    let c = coefficients(v, basis)?;
    let m = c.len();
    Ok(DMatrix::from_fn(m, m, |j, k| {
        c[j].iter()
            .zip(&c[k])
            .enumerate()
            .map(|(idx, (a, b))| a * b.conj() * hermite_eigenvalue(idx))
            .sum()
    }))
}

/// Eigenvalues `μ_0 ≤ … ≤ μ_n` of the compressed operator; each satisfies
/// `μ_k ≥ (2k+1)/(2π)`.
pub fn rayleigh_ritz_compress(v: &OrthonormalSequence, basis: &HermiteBasis) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&compressed_operator(v, basis)?)
}

/// The Shapiro left-hand side computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRoutes {
    /// Moments of each member and of its transform.
    pub moments: f64,
    /// `Σ ⟨H e_k, e_k⟩` with `H` applied on the grid.
    pub operator: f64,
    /// Trace of the compressed matrix.
    pub compressed_trace: f64,
}

impl TraceRoutes {
    pub fn max_relative_spread(&self) -> f64 {
        let v = [self.moments, self.operator, self.compressed_trace];
        let hi = v.iter().copied().fold(f64::MIN, f64::max);
        let lo = v.iter().copied().fold(f64::MAX, f64::min);
        (hi - lo) / hi.abs()
    }
}

pub fn trace_routes(v: &OrthonormalSequence, basis: &HermiteBasis) -> Result<TraceRoutes> {
    let moments = shapiro_sum(v, v.len() - 1)?.lhs;
    let mut operator = 0.0;
    for e in &v.members {
        let unit = e.normalized()?;
        operator += inner_product(&basis.apply_operator(&unit)?, &unit)?.re;
    }
    let m = compressed_operator(v, basis)?;
    let compressed_trace = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    Ok(TraceRoutes {
        moments,
        operator,
        compressed_trace,
    })
}

/// Deterministic random orthonormal family of size `dim` inside
/// `span(h_0..h_K)`, orthonormalized in coefficient space.
pub fn random_orthonormal(basis: &HermiteBasis, dim: usize, seed: u64) -> Result<OrthonormalSequence> {
    if dim == 0 || dim > basis.len() {
        return Err(UcpError::invalid(format!(
            "dim = {dim} must lie in 1..={}",
            basis.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..basis.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    orthonormalize(&mut vectors)?;
    let members = vectors
        .iter()
        .map(|c| basis.synthesize(c))
        .collect::<Result<Vec<_>>>()?;
    OrthonormalSequence::new(members, 1e-10)
}
