//! Uniform centered grids, sampled functions and the continuous-convention
//! Fourier transform `f̂(ξ) = ∫ f(x) e^{-2iπxξ} dx`.
//!
//! A grid with `n` points and spacing `h` samples `x_j = (j - n/2) h`. Its dual
//! grid has the same number of points and spacing `1/(n h)`, so the discrete
//! sums below are exact discrete Fourier transforms up to `±1` phase factors.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};

const GRID_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(n: usize, spacing: f64) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(UcpError::invalid(format!(
                "grid size must be a positive even integer, got {n}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(UcpError::invalid(format!(
                "grid spacing must be positive and finite, got {spacing}"
            )));
        }
        Ok(Grid { n, spacing })
    }

    /// Grid covering `[-half_width, half_width)` with `n` points.
    pub fn with_half_width(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(UcpError::invalid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        Grid::new(n, 2.0 * half_width / n as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Length of the periodic window, `n h`.
    pub fn period(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.period()
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Index of the sample at `x = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    pub fn dual(&self) -> Grid {
        Grid {
            n: self.n,
            spacing: 1.0 / self.period(),
        }
    }

    /// Equal size and spacing up to rounding.
    pub fn is_compatible(&self, other: &Grid) -> bool {
        self.n == other.n
            && (self.spacing - other.spacing).abs() <= GRID_RTOL * self.spacing.max(other.spacing)
    }

    /// Whether `x` lies in the sampled window `[x_0, x_{n-1}]`.
    pub fn covers(&self, x: f64) -> bool {
        x >= self.point(0) && x <= self.point(self.n - 1)
    }

    pub(crate) fn ensure_compatible(&self, other: &Grid) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(UcpError::invalid(format!(
                "grid mismatch: (n={}, h={}) vs (n={}, h={})",
                self.n, self.spacing, other.n, other.spacing
            )))
        }
    }
}

/// Complex samples of an L² function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(UcpError::invalid(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(UcpError::invalid(format!("non-finite sample at index {j}")));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        SampledFunction { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        SampledFunction { grid, values }
    }

    /// Quadrature norm squared, `h Σ |f_j|²`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        inner_product(self, other)
    }

    pub fn scaled(&self, c: Complex64) -> SampledFunction {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_compatible(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Ok(SampledFunction {
            grid: self.grid,
            values,
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    pub fn normalized(&self) -> Result<SampledFunction> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(UcpError::degenerate("cannot normalize the zero function"));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Energy in the two samples at the window edges, `h (|f_0|² + |f_{n-1}|²)`.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.values.len();
        self.grid.spacing() * (self.values[0].norm_sqr() + self.values[n - 1].norm_sqr())
    }

    /// Circular shift by `steps` samples (positive moves the graph to the right).
    pub fn shifted(&self, steps: isize) -> SampledFunction {
        let n = self.values.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j - steps).rem_euclid(n) as usize])
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }

    pub fn fourier_transform(&self) -> Result<SampledFunction> {
        fourier_transform(self)
    }

    pub fn inverse_fourier_transform(&self) -> Result<SampledFunction> {
        inverse_fourier_transform(self)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// `out_k = scale Σ_j f_j e^{∓2iπ x_j ξ_k}` on centered grids.
///
/// Writing `x_j ξ_k = jk/n - j/2 - k/2 + n/4` turns the centered kernel into
/// the plain DFT kernel times `(-1)^{j+k+n/2}`.
pub(crate) fn centered_dft(values: &[Complex64], forward: bool, scale: f64) -> Vec<Complex64> {
    let n = values.len();
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let global = if (n / 2).is_multiple_of(2) { scale } else { -scale };
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| v * sign(j))
        .collect();
    plan(n, forward).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= global * sign(k);
    }
    buf
}

/// Samples of `f̂` on the dual grid.
pub fn fourier_transform(f: &SampledFunction) -> Result<SampledFunction> {
    check_finite(f)?;
    let h = f.grid.spacing();
    Ok(SampledFunction {
        grid: f.grid.dual(),
        values: centered_dft(&f.values, true, h),
    })
}

/// Inverse transform, kernel `e^{+2iπxξ}`; the output lives on the dual of
/// `g`'s grid.
pub fn inverse_fourier_transform(g: &SampledFunction) -> Result<SampledFunction> {
    check_finite(g)?;
    let h = g.grid.spacing();
    Ok(SampledFunction {
        grid: g.grid.dual(),
        values: centered_dft(&g.values, false, h),
    })
}

fn check_finite(f: &SampledFunction) -> Result<()> {
    match f
        .values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        Some(j) => Err(UcpError::invalid(format!("non-finite sample at index {j}"))),
        None => Ok(()),
    }
}

/// `⟨f, g⟩ = h Σ f_j conj(g_j)`.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<Complex64> {
    f.grid.ensure_compatible(&g.grid)?;
    let s: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * f.grid.spacing())
}

/// Band-limited (trigonometric) interpolation of a sampled function.
///
/// The samples are read as the restriction of the trigonometric polynomial
/// whose coefficients are the function's dual-grid samples; the Nyquist term is
/// split symmetrically so real samples interpolate to a real function.
#[derive(Debug, Clone)]
pub struct Interpolator {
    grid: Grid,
    spectrum: SampledFunction,
}

impl Interpolator {
    pub fn new(f: &SampledFunction) -> Result<Self> {
        Ok(Interpolator {
            grid: f.grid,
            spectrum: fourier_transform(f)?,
        })
    }

    /// Value at `x`; points outside the sampled window evaluate to zero.
    pub fn eval(&self, x: f64) -> Complex64 {
        if !self.grid.covers(x) {
            return Complex64::new(0.0, 0.0);
        }
        self.eval_periodic(x)
    }

    /// Value of the periodic interpolant, defined for every real `x`.
    pub fn eval_periodic(&self, x: f64) -> Complex64 {
        let dual = self.spectrum.grid();
        let dxi = dual.spacing();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.spectrum.values().iter().enumerate() {
            let xi = dual.point(k);
            if k == 0 {
                acc += c * (2.0 * PI * x * xi).cos();
            } else {
                acc += c * Complex64::from_polar(1.0, 2.0 * PI * x * xi);
            }
        }
        acc * dxi
    }
}

/// Outcome of a Poisson summation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonResidual {
    pub residual: f64,
    /// Size of the outermost retained terms on both sides, a proxy for the
    /// truncation error.
    pub tail_estimate: f64,
}

/// Residual of the Poisson summation identity
/// `Σ_j f(x+j) e^{-2iπ(x+j)ξ} = Σ_k f̂(ξ+k) e^{2iπkx}`, both sums truncated
/// at `|j|, |k| ≤ terms`, off-grid values by band-limited interpolation.
pub fn poisson_residual(
    f: &SampledFunction,
    x: f64,
    xi: f64,
    terms: usize,
) -> Result<PoissonResidual> {
    if !f.grid.covers(x) {
        return Err(UcpError::invalid(format!("x = {x} lies outside the grid window")));
    }
    let fhat = fourier_transform(f)?;
    if !fhat.grid.covers(xi) {
        return Err(UcpError::invalid(format!(
            "xi = {xi} lies outside the dual grid window"
        )));
    }
    let time = Interpolator::new(f)?;
    let freq = Interpolator::new(&fhat)?;
    let t = terms as i64;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for j in -t..=t {
        let y = x + j as f64;
        lhs += time.eval(y) * Complex64::from_polar(1.0, -2.0 * PI * y * xi);
        let eta = xi + j as f64;
        rhs += freq.eval(eta) * Complex64::from_polar(1.0, 2.0 * PI * j as f64 * x);
    }
    let edge = |i: &Interpolator, c: f64| i.eval(c - t as f64).norm() + i.eval(c + t as f64).norm();
    Ok(PoissonResidual {
        residual: (lhs - rhs).norm(),
        tail_estimate: edge(&time, x) + edge(&freq, xi),
    })
}
