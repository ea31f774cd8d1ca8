mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use ucp_core::hermite::{admissible_half_width, apply_hermite_operator, hermite_basis, hermite_expand, hermite_value};
use ucp_core::moments::hermite_form;
use ucp_core::{io, inner_product, Grid, SampledFunction, UcpError};

/// `h_k(t) = 2^{1/4}/√(k!) (-1/(2√π))^k e^{πt²} d^k/dt^k e^{-2πt²}`, with the
/// derivative from Cauchy's integral formula on a circle, summed by the
/// trapezoid rule (spectrally accurate for an entire integrand).
fn rodrigues(k: usize, t: f64) -> f64 {
    let m = 256;
    let radius = 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let w = Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
        let z = t + w;
        acc += (-2.0 * PI * z * z).exp() / w.powi(k as i32);
    }
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let derivative = (acc / m as f64).re * factorial;
    2f64.powf(0.25) / factorial.sqrt() * (-1.0 / (2.0 * PI.sqrt())).powi(k as i32) * (PI * t * t).exp() * derivative
}

#[test]
fn recurrence_matches_rodrigues() {
    for k in 0..=10 {
        for &t in &[-1.7, -0.9, -0.25, 0.0, 0.4, 1.1, 2.3] {
            let (a, b) = (hermite_value(k, t), rodrigues(k, t));
            assert!((a - b).abs() < 1e-10, "k = {k}, t = {t}: {a} vs {b}");
        }
    }
}

#[test]
fn low_order_values() {
    let b = basis(1);
    assert!((b.function(0).values()[1024].re - 2f64.powf(0.25)).abs() < 1e-15);
    let h1 = b.function(1);
    assert_eq!(h1.values()[1024].re, 0.0);
    for j in 1..100 {
        assert!((h1.values()[1024 + j].re + h1.values()[1024 - j].re).abs() < 1e-15);
    }
    let x = 0.3;
    let closed = 2f64.powf(0.25) * 2.0 * PI.sqrt() * x * (-PI * x * x).exp();
    assert!((hermite_value(1, x) - closed).abs() < 1e-15);
}

#[test]
fn gram_and_fourier_invariants() {
    let b = basis(20);
    assert!(b.gram_deviation() < 1e-8);
    assert!(b.fourier_eigen_deviation().unwrap() < 1e-8);
}

#[test]
fn narrow_window_is_reported() {
    let g = Grid::with_half_width(3.0, 512).unwrap();
    match hermite_basis(g, 20) {
        Err(UcpError::PrecisionLoss(msg)) => {
            let w = admissible_half_width(20, 1e-12);
            assert!(msg.contains(&format!("{w:.4}")), "{msg}");
        }
        other => panic!("expected precision loss, got {other:?}"),
    }
}

#[test]
fn expansion_examples() {
    let b = basis(40);
    let c = hermite_expand(b.function(3), &b).unwrap();
    for (k, ck) in c.iter().enumerate() {
        let want = if k == 3 { 1.0 } else { 0.0 };
        assert!((ck - want).norm() < 1e-8);
    }
    let f = b.function(0).add_scaled(Complex64::new(2.0, 0.0), b.function(2)).unwrap();
    let c = hermite_expand(&f, &b).unwrap();
    assert!((c[0] - 1.0).norm() < 1e-8 && (c[2] - 2.0).norm() < 1e-8);
    assert!(c.iter().enumerate().filter(|(k, _)| *k != 0 && *k != 2).all(|(_, z)| z.norm() < 1e-8));

    let g = SampledFunction::from_real_fn(*b.grid(), |x| (-PI * (x - 0.5).powi(2)).exp());
    // ‖g‖² = ∫ e^{-2π(x-1/2)²} = 1/√2
    assert!((g.norm_sq() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    let captured: f64 = hermite_expand(&g, &b).unwrap().iter().map(|z| z.norm_sqr()).sum();
    assert!(captured <= g.norm_sq() * (1.0 + 1e-8));
    assert!(g.norm_sq() - captured < 1e-6 * g.norm_sq());
}

#[test]
fn operator_examples() {
    let b = basis(20);
    for k in [0, 3, 7] {
        let hf = apply_hermite_operator(b.function(k), &b).unwrap();
        let want = b.function(k).scaled(Complex64::new((2 * k + 1) as f64 / (2.0 * PI), 0.0));
        assert!(hf.sub(&want).unwrap().norm() < 1e-10);
    }
    let zero = apply_hermite_operator(&SampledFunction::zeros(*b.grid()), &b).unwrap();
    assert_eq!(zero.norm(), 0.0);
    let wide = SampledFunction::from_real_fn(*b.grid(), |x| (-PI * x * x / 64.0).exp());
    assert!(matches!(apply_hermite_operator(&wide, &b), Err(UcpError::PrecisionLoss(_))));
}

#[test]
fn basis_matrix_export() {
    let b = basis(4);
    let mut buf = Vec::new();
    io::write_matrix(b.functions(), &mut buf).unwrap();
    let rows = io::read_matrix(&buf[..]).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4], *b.function(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_matches_moment_form_and_is_self_adjoint(seed in any::<u64>(), seed2 in any::<u64>()) {
        let b = basis(20);
        let f = random_hermite_combo(&b, &mut rng(seed));
        let g = random_hermite_combo(&b, &mut rng(seed2));
        let hf = b.apply_operator(&f).unwrap();
        let hg = b.apply_operator(&g).unwrap();
        let q = inner_product(&hf, &f).unwrap();
        let form = hermite_form(&f).unwrap();
        prop_assert!((q.re - form).abs() <= 1e-6 * form);
        prop_assert!(q.im.abs() <= 1e-10 * form);
        let lhs = inner_product(&hf, &g).unwrap();
        let rhs = inner_product(&f, &hg).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * hf.norm() * g.norm());
    }

    #[test]
    fn successive_optimality(seed in any::<u64>(), n in 1usize..=10) {
        let b = basis(24);
        let mut f = random_hermite_combo(&b, &mut rng(seed));
        let c = b.expand(&f).unwrap();
        for (k, &ck) in c.iter().enumerate().take(n) {
            f = f.add_scaled(-ck, b.function(k)).unwrap();
        }
        // ensure something survives the projection
        f = f.add_scaled(Complex64::new(0.5, 0.0), b.function(n)).unwrap();
        let form = hermite_form(&f).unwrap();
        prop_assert!(form >= (2 * n + 1) as f64 / (2.0 * PI) * f.norm_sq() * (1.0 - 1e-6));
    }
}
