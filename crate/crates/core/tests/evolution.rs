mod common;

use std::f64::consts::PI;

use common::{default_grid, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use ucp_core::analytic::envelope_fit;
use ucp_core::evolution::{
    dissipation_report, dissipation_rows, gaussian_spread_check, propagate, run, thick_set_dispersion,
    Equation,
};
use ucp_core::localization::{project_band, BandSubspace};
use ucp_core::sets::{IntervalSet, SetOnGrid};
use ucp_core::{SampledFunction, UcpError};

fn gaussian() -> SampledFunction {
    SampledFunction::from_real_fn(default_grid(), |x| (-PI * x * x).exp())
}

fn band(radius: f64) -> SetOnGrid {
    SetOnGrid::symmetric(default_grid().dual(), radius).unwrap()
}

fn sinc_type() -> SampledFunction {
    let f = SampledFunction::from_real_fn(default_grid(), |x| {
        if x == 0.0 {
            1.0
        } else {
            (PI * x).sin() / (PI * x)
        }
    });
    project_band(&f, &band(1.0)).unwrap()
}

fn max_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.sub(b).unwrap().max_abs()
}

#[test]
fn heat_gaussian_matches_convolution_quadrature() {
    let v = propagate(&gaussian(), 1.0, Equation::Heat).unwrap();
    let closed = SampledFunction::from_real_fn(default_grid(), |x| (-PI * x * x / 2.0).exp() / 2f64.sqrt());
    assert!(max_diff(&v, &closed) < 1e-8);
    // v(x, t) = ∫ v₀(y) t^{-1/2} e^{-π(x-y)²/t} dy
    let g = default_grid();
    for x in [0.0, 0.375, -1.25, 2.5] {
        let quad: f64 = g
            .points()
            .map(|y| (-PI * y * y).exp() * (-PI * (x - y) * (x - y)).exp())
            .sum::<f64>()
            * g.spacing();
        let j = g.origin() as isize + (x / g.spacing()).round() as isize;
        assert!((v.values()[j as usize].re - quad).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn schrodinger_preserves_norm() {
    // wide enough that the t = 10 state stays inside the window
    let v0 = SampledFunction::from_real_fn(default_grid(), |x| (-PI * x * x / 4.0).exp());
    let r = run(&v0, &[0.1, 1.0, 10.0], Equation::Schrodinger).unwrap();
    for n in &r.norms {
        assert!((n - v0.norm()).abs() < 1e-10 * v0.norm());
    }
}

#[test]
fn heat_norms_non_increasing() {
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
    let r = run(&gaussian(), &times, Equation::Heat).unwrap();
    for w in r.norms.windows(2) {
        assert!(w[1] <= w[0] + 1e-15);
    }
}

#[test]
fn zero_time_is_identity() {
    for eq in [Equation::Heat, Equation::Schrodinger] {
        assert_eq!(propagate(&gaussian(), 0.0, eq).unwrap(), gaussian());
    }
}

#[test]
fn backward_heat_is_invalid() {
    assert!(matches!(
        propagate(&gaussian(), -0.5, Equation::Heat),
        Err(UcpError::InvalidInput(_))
    ));
}

#[test]
fn semigroup_property() {
    let v0 = gaussian().add_scaled(Complex64::new(0.0, 0.5), &gaussian().shifted(64)).unwrap();
    for eq in [Equation::Heat, Equation::Schrodinger] {
        for (s, t) in [(0.3, 0.7), (1.0, 2.5)] {
            let two = propagate(&propagate(&v0, s, eq).unwrap(), t, eq).unwrap();
            let one = propagate(&v0, s + t, eq).unwrap();
            assert!(max_diff(&two, &one) < 1e-10, "{eq:?} {s} {t}");
        }
    }
}

#[test]
fn commutes_with_translation() {
    let v0 = gaussian();
    for eq in [Equation::Heat, Equation::Schrodinger] {
        for steps in [-100isize, 37, 200] {
            let a = propagate(&v0.shifted(steps), 1.5, eq).unwrap();
            let b = propagate(&v0, 1.5, eq).unwrap().shifted(steps);
            assert!(max_diff(&a, &b) < 1e-8, "{eq:?} {steps}");
        }
    }
}

#[test]
fn heat_rate_stays_below_kernel_rate() {
    // compact nonnegative data: e^{πx²/t} v(x,t) is unbounded, so the fitted
    // Gaussian rate of v(·,t) must fall short of 1/t
    let v0 = SampledFunction::from_real_fn(default_grid(), |x| {
        if x.abs() < 1.0 {
            (1.0 - x * x).powi(2)
        } else {
            0.0
        }
    });
    for t in [0.5, 1.0, 2.0] {
        let v = propagate(&v0, t, Equation::Heat).unwrap();
        let rate = envelope_fit(&v).unwrap().gauss_rate;
        assert!(rate <= (1.0 - 1e-3) / t, "t = {t}: rate {rate}");
    }
}

#[test]
fn schrodinger_dissipation_passes_on_intervals() {
    let s = SetOnGrid::symmetric(default_grid(), 1.0).unwrap();
    let sigma = band(1.0);
    let sub = BandSubspace::new(&sigma).unwrap();
    let mut r = rng(21);
    for _ in 0..5 {
        let v0 = sub.random_element(&mut r).unwrap();
        let ev = run(&v0, &[0.1, 1.0, 10.0], Equation::Schrodinger).unwrap();
        let reports = dissipation_report(&ev, &s, &sigma).unwrap();
        assert!(reports.iter().all(|rep| rep.pass), "{reports:?}");
        let rows = dissipation_rows(&ev, &reports);
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|row| row.pass && row.outside >= row.rhs * (1.0 - 1e-6)));
    }
}

#[test]
fn heat_dissipation_passes_with_margin() {
    let s = SetOnGrid::symmetric(default_grid(), 1.0).unwrap();
    let sigma = band(1.0);
    let v0 = BandSubspace::new(&sigma).unwrap().random_element(&mut rng(22)).unwrap();
    let ev = run(&v0, &[0.1, 1.0, 10.0], Equation::Heat).unwrap();
    for rep in dissipation_report(&ev, &s, &sigma).unwrap() {
        assert!(rep.pass);
        assert!(rep.lhs - rep.rhs >= 0.0, "{rep:?}");
    }
}

#[test]
fn empty_set_reports_full_norm() {
    let s = SetOnGrid::empty(default_grid());
    let sigma = band(1.0);
    let v0 = sinc_type();
    let ev = run(&v0, &[0.5, 2.0], Equation::Schrodinger).unwrap();
    for (rep, n) in dissipation_report(&ev, &s, &sigma).unwrap().iter().zip(&ev.norms) {
        assert!(rep.pass);
        assert!((rep.lhs - n).abs() < 1e-10 * n);
    }
}

#[test]
fn dissipation_rejects_leaking_spectrum_and_bad_heat_band() {
    let s = SetOnGrid::symmetric(default_grid(), 1.0).unwrap();
    let ev = run(&gaussian(), &[1.0], Equation::Schrodinger).unwrap();
    let err = dissipation_report(&ev, &s, &band(1.0)).unwrap_err();
    assert!(matches!(err, UcpError::InvalidInput(ref m) if m.contains("leak")));

    let shifted = SetOnGrid::parse(default_grid().dual(), "-1,2").unwrap();
    let ev = run(&sinc_type(), &[1.0], Equation::Heat).unwrap();
    assert!(matches!(
        dissipation_report(&ev, &s, &shifted),
        Err(UcpError::InvalidInput(_))
    ));
}

fn comb(length: f64) -> SetOnGrid {
    let g = default_grid();
    let lo = g.point(0);
    SetOnGrid::from_intervals(g, IntervalSet::periodic(2.0, 0.0, length, lo, lo + g.period()).unwrap())
}

#[test]
fn whole_window_keeps_all_energy() {
    let v0 = sinc_type();
    let ev = run(&v0, &[0.0, 1.0, 5.0], Equation::Schrodinger).unwrap();
    let rep = thick_set_dispersion(&ev, &SetOnGrid::window(default_grid()), 1.0).unwrap();
    for r in rep.ratios {
        assert!((r - 1.0).abs() < 1e-10);
    }
}

#[test]
fn thick_comb_ratio_matches_direct_evolution() {
    let v0 = sinc_type();
    let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
    let ev = run(&v0, &times, Equation::Schrodinger).unwrap();
    let e = comb(1.0);
    let rep = thick_set_dispersion(&ev, &e, 1.0).unwrap();
    assert!((rep.gamma - 0.5).abs() < 1e-9);

    // oracle: sum the band exponentials with their phases directly
    let sigma = band(1.0);
    let sub = BandSubspace::new(&sigma).unwrap();
    let c = sub.coefficients(&v0).unwrap();
    let p = default_grid().period();
    let g = default_grid();
    for (k, &t) in times.iter().enumerate() {
        let values: Vec<Complex64> = g
            .points()
            .map(|x| {
                sub.indices()
                    .iter()
                    .zip(&c)
                    .map(|(&j, &cj)| {
                        let xi = g.dual().point(j);
                        cj * Complex64::from_polar(1.0 / p.sqrt(), 2.0 * PI * x * xi - PI * xi * xi * t)
                    })
                    .sum()
            })
            .collect();
        let direct = SampledFunction::new(g, values).unwrap();
        let ratio = e.energy(&direct).unwrap().sqrt() / v0.norm();
        assert!((rep.ratios[k] - ratio).abs() < 1e-9, "t = {t}");
        assert!(rep.ratios[k] > 0.0);
        assert!(rep.empirical_constants[k].is_finite() && rep.empirical_constants[k] >= rep.gamma);
    }
}

#[test]
fn shrinking_set_lowers_ratio() {
    let v0 = sinc_type();
    let times = [0.0, 0.5, 2.0, 7.0];
    let ev = run(&v0, &times, Equation::Schrodinger).unwrap();
    let big = thick_set_dispersion(&ev, &comb(1.0), 1.0).unwrap();
    let small = thick_set_dispersion(&ev, &comb(0.5), 1.0).unwrap();
    for (a, b) in big.ratios.iter().zip(&small.ratios) {
        assert!(b <= a);
    }
}

#[test]
fn spread_exponent_examples() {
    let g = default_grid();
    let r = gaussian_spread_check(1.0, 0.0, 1.0, g).unwrap();
    assert!((r.coefficient + PI / 2.0).abs() < 1e-4 * PI / 2.0);
    assert!(r.pass);

    let at_focus = gaussian_spread_check(0.7, 0.4, 0.4, g).unwrap();
    assert!((at_focus.coefficient + PI / 0.7).abs() < 1e-4 * PI / 0.7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spread_symmetric_about_focus(a in 0.5f64..2.0, t0 in -1.0f64..1.0, dt in 0.0f64..2.0) {
        let g = default_grid();
        let fwd = gaussian_spread_check(a, t0, t0 + dt, g).unwrap();
        let back = gaussian_spread_check(a, t0, t0 - dt, g).unwrap();
        prop_assert!(fwd.pass && back.pass);
        prop_assert!((fwd.coefficient - back.coefficient).abs() <= 1e-6 * fwd.coefficient.abs());
        prop_assert!((fwd.measured_prefactor - fwd.multiplier_prefactor).abs() < 1e-8);
    }
}
