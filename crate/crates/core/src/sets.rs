//! Finite unions of closed intervals attached to a grid.
//!
//! Besides the per-sample mask, every set carries quadrature weights that
//! integrate band-limited integrands over the set exactly: for any
//! trigonometric polynomial `p` of the grid with frequencies below Nyquist,
//! `Σ_j w_j p(x_j) = ∫_{S ∩ window} p(x) dx`. Energies and restricted inner
//! products of functions in `range(Q_Σ)` therefore carry no endpoint error.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UcpError};
use crate::grid::{centered_dft, Grid, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start > end {
            return Err(UcpError::invalid(format!("bad interval [{start}, {end}]")));
        }
        Ok(Interval { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end
    }

    /// Length of the overlap with `[a, b]`.
    pub fn overlap(&self, a: f64, b: f64) -> f64 {
        (self.end.min(b) - self.start.max(a)).max(0.0)
    }
}

/// Sorted, pairwise disjoint intervals, parsed from `"a,b;c,d"`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet(Vec<Interval>);

impl IntervalSet {
    /// Sorts the intervals and merges any that overlap or touch.
    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().collect();
        v.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match merged.last_mut() {
                Some(last) if iv.start <= last.end => last.end = last.end.max(iv.end),
                _ => merged.push(iv),
            }
        }
        IntervalSet(merged)
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let ivs = pairs
            .iter()
            .map(|&(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::new(ivs))
    }

    /// `[offset + k·period, offset + k·period + length]` for every `k` whose
    /// copy meets `[lo, hi]`, clipped to `[lo, hi]`.
    pub fn periodic(period: f64, offset: f64, length: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(period > 0.0 && length >= 0.0 && length <= period && lo <= hi) {
            return Err(UcpError::invalid("bad periodic set parameters"));
        }
        let k0 = ((lo - offset - length) / period).floor() as i64;
        let k1 = ((hi - offset) / period).ceil() as i64;
        let mut out = Vec::new();
        for k in k0..=k1 {
            let a = (offset + k as f64 * period).max(lo);
            let b = (offset + k as f64 * period + length).min(hi);
            if a <= b {
                out.push(Interval::new(a, b)?);
            }
        }
        Ok(IntervalSet::new(out))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.0.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|iv| iv.contains(x))
    }

    /// `|self ∩ [a, b]|`.
    pub fn overlap(&self, a: f64, b: f64) -> f64 {
        self.0.iter().map(|iv| iv.overlap(a, b)).sum()
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.0.iter().all(|iv| {
            other
                .0
                .iter()
                .any(|o| o.start <= iv.start && iv.end <= o.end)
        })
    }
}

impl FromStr for IntervalSet {
    type Err = UcpError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(IntervalSet::default());
        }
        let mut out = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once(',')
                .ok_or_else(|| UcpError::invalid(format!("interval '{part}' is not 'a,b'")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| UcpError::invalid(format!("'{t}' is not a number")))
            };
            out.push(Interval::new(parse(a)?, parse(b)?)?);
        }
        Ok(IntervalSet::new(out))
    }
}

/// A subset of the line as seen by one grid.
#[derive(Debug, Clone)]
pub struct SetOnGrid {
    grid: Grid,
    intervals: IntervalSet,
    mask: Vec<bool>,
    measure: f64,
    exact: bool,
    weights: Vec<f64>,
}

impl SetOnGrid {
    pub fn from_intervals(grid: Grid, intervals: IntervalSet) -> Self {
        let mask = grid.points().map(|x| intervals.contains(x)).collect();
        let measure = intervals.measure();
        let mut set = SetOnGrid {
            grid,
            intervals,
            mask,
            measure,
            exact: true,
            weights: Vec::new(),
        };
        set.weights = set.band_exact_weights();
        set
    }

    pub fn parse(grid: Grid, literal: &str) -> Result<Self> {
        Ok(SetOnGrid::from_intervals(grid, literal.parse()?))
    }

    pub fn empty(grid: Grid) -> Self {
        SetOnGrid::from_intervals(grid, IntervalSet::default())
    }

    /// `[-r, r]`.
    pub fn symmetric(grid: Grid, radius: f64) -> Result<Self> {
        Ok(SetOnGrid::from_intervals(
            grid,
            IntervalSet::from_pairs(&[(-radius, radius)])?,
        ))
    }

    /// The whole sampled window `[x_0, x_0 + n h]`.
    pub fn window(grid: Grid) -> Self {
        let lo = grid.point(0);
        SetOnGrid::from_intervals(
            grid,
            IntervalSet(vec![Interval {
                start: lo,
                end: lo + grid.period(),
            }]),
        )
    }

    /// A set known only through its samples. The measure falls back to
    /// `h · count` and the set is flagged inexact.
    pub fn from_mask(grid: Grid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.n() {
            return Err(UcpError::invalid(format!(
                "mask has {} entries for a grid of {}",
                mask.len(),
                grid.n()
            )));
        }
        let h = grid.spacing();
        let count = mask.iter().filter(|&&m| m).count();
        let mut runs = Vec::new();
        let mut j = 0;
        while j < mask.len() {
            if mask[j] {
                let start = j;
                while j + 1 < mask.len() && mask[j + 1] {
                    j += 1;
                }
                runs.push(Interval {
                    start: grid.point(start),
                    end: grid.point(j),
                });
            }
            j += 1;
        }
        let weights = mask.iter().map(|&m| if m { h } else { 0.0 }).collect();
        Ok(SetOnGrid {
            grid,
            intervals: IntervalSet(runs),
            mask,
            measure: h * count as f64,
            exact: false,
            weights,
        })
    }

    /// The same intervals seen through their sample mask only.
    pub fn to_mask_set(&self) -> SetOnGrid {
        SetOnGrid::from_mask(self.grid, self.mask.clone()).expect("mask matches grid")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn intervals(&self) -> &IntervalSet {
        &self.intervals
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Whether the measure and weights come from exact interval data.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn mask_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_subset_of(&self, other: &SetOnGrid) -> bool {
        self.intervals.is_subset_of(&other.intervals)
    }

    /// `∫_{S ∩ window} e^{2iπ x m / P} dx`, `P` the window period.
    pub fn fourier_moment(&self, m: i64) -> Complex64 {
        let p = self.grid.period();
        if !self.exact {
            let h = self.grid.spacing();
            return self
                .grid
                .points()
                .zip(&self.mask)
                .filter(|(_, &in_set)| in_set)
                .map(|(x, _)| Complex64::from_polar(h, 2.0 * PI * x * m as f64 / p))
                .sum();
        }
        let lo = self.grid.point(0);
        let hi = lo + p;
        let theta = 2.0 * PI * m as f64 / p;
        self.intervals
            .intervals()
            .iter()
            .map(|iv| {
                let a = iv.start.max(lo);
                let b = iv.end.min(hi);
                if a >= b {
                    Complex64::new(0.0, 0.0)
                } else if m == 0 {
                    Complex64::new(b - a, 0.0)
                } else {
                    (Complex64::from_polar(1.0, theta * b) - Complex64::from_polar(1.0, theta * a))
                        / Complex64::new(0.0, theta)
                }
            })
            .sum()
    }

    fn band_exact_weights(&self) -> Vec<f64> {
        let n = self.grid.n() as i64;
        let moments: Vec<Complex64> = (0..n).map(|k| self.fourier_moment(k - n / 2)).collect();
        centered_dft(&moments, true, 1.0 / n as f64)
            .into_iter()
            .map(|w| w.re)
            .collect()
    }

    fn check(&self, f: &SampledFunction) -> Result<()> {
        self.grid.ensure_compatible(f.grid())
    }

    /// `∫_S |f|²`.
    pub fn energy(&self, f: &SampledFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self
            .weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v.norm_sqr())
            .sum())
    }

    /// `∫_{ℝ∖S} |f|²`.
    pub fn complement_energy(&self, f: &SampledFunction) -> Result<f64> {
        Ok(f.norm_sq() - self.energy(f)?)
    }

    /// `∫_S f conj(g)`.
    pub fn inner(&self, f: &SampledFunction, g: &SampledFunction) -> Result<Complex64> {
        self.check(f)?;
        self.check(g)?;
        Ok(self
            .weights
            .iter()
            .zip(f.values().iter().zip(g.values()))
            .map(|(w, (a, b))| a * b.conj() * *w)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::with_half_width(16.0, 512).unwrap()
    }

    #[test]
    fn literal_parsing_and_merging() {
        let s: IntervalSet = "2,3; -1,1;0.5,1.5".parse().unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.intervals()[0], Interval { start: -1.0, end: 1.5 });
        assert!((s.measure() - 3.5).abs() < 1e-15);
        assert!("1,a".parse::<IntervalSet>().is_err());
        assert!("3,1".parse::<IntervalSet>().is_err());
        assert!("".parse::<IntervalSet>().unwrap().is_empty());
    }

    #[test]
    fn mask_and_measure() {
        let s = SetOnGrid::parse(grid(), "-1,1").unwrap();
        assert_eq!(s.measure(), 2.0);
        // closed interval: both endpoints are grid points
        assert_eq!(s.mask_count(), 33);
        let m = s.to_mask_set();
        assert!(!m.is_exact());
        assert!((m.measure() - 33.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn weights_integrate_band_limited_functions_exactly() {
        let g = grid();
        let s = SetOnGrid::parse(g, "-1.3,0.7;2,5.25").unwrap();
        let total: f64 = s.weights().iter().sum();
        assert!((total - s.measure()).abs() < 1e-12);
        // |e^{2iπ x m/P} + 1|² = 2 + 2 cos(2π x m / P)
        let p = g.period();
        let m = 7.0;
        let f = SampledFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * PI * x * m / p) + 1.0);
        let exact: f64 = s
            .intervals()
            .intervals()
            .iter()
            .map(|iv| {
                2.0 * iv.length()
                    + 2.0 * p / (2.0 * PI * m)
                        * ((2.0 * PI * m * iv.end / p).sin() - (2.0 * PI * m * iv.start / p).sin())
            })
            .sum();
        assert!((s.energy(&f).unwrap() - exact).abs() < 1e-11);
    }

    #[test]
    fn window_weights_are_uniform() {
        let s = SetOnGrid::window(grid());
        let h = grid().spacing();
        assert!(s.weights().iter().all(|w| (w - h).abs() < 1e-14));
        assert!(SetOnGrid::empty(grid()).weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn periodic_union() {
        let s = IntervalSet::periodic(2.0, 0.0, 1.0, -4.0, 4.0).unwrap();
        assert_eq!(s.intervals().len(), 5);
        assert_eq!(s.intervals()[0], Interval { start: -4.0, end: -3.0 });
        assert_eq!(s.intervals()[4], Interval { start: 4.0, end: 4.0 });
        assert!((s.measure() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn subsets() {
        let a: IntervalSet = "-1,1".parse().unwrap();
        let b: IntervalSet = "-2,2;3,4".parse().unwrap();
        assert!(a.is_subset_of(&b) && !b.is_subset_of(&a));
    }
}
