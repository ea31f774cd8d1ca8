#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucp_core::hermite::{hermite_basis, HermiteBasis};
use ucp_core::{Grid, SampledFunction};

pub fn default_grid() -> Grid {
    Grid::with_half_width(16.0, 2048).unwrap()
}

pub fn small_grid() -> Grid {
    Grid::with_half_width(16.0, 512).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn basis(k: usize) -> HermiteBasis {
    hermite_basis(default_grid(), k).unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random combination of `h_0..h_K` with `K` itself random in `1..=max_k`.
pub fn random_hermite_combo(basis: &HermiteBasis, rng: &mut ChaCha8Rng) -> SampledFunction {
    let k = rng.random_range(1..=basis.max_index());
    let mut c: Vec<Complex64> = (0..=k).map(|_| random_complex(rng)).collect();
    c.resize(basis.len(), Complex64::new(0.0, 0.0));
    basis.synthesize(&c).unwrap()
}

/// Dense `O(n)` evaluation of `h Σ f(x_j) e^{-2iπ x_j ξ}`.
pub fn direct_transform(f: &SampledFunction, xi: f64) -> Complex64 {
    let g = f.grid();
    g.points()
        .zip(f.values())
        .map(|(x, &v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x * xi))
        .sum::<Complex64>()
        * g.spacing()
}

pub fn rel_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.sub(b).unwrap().norm() / b.norm()
}
