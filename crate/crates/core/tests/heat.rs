mod common;

use std::f64::consts::PI;

use apcorr::field::{SupSampler, TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::heat::{
    ergodic_bound_check, fit_hermite_constant, grad_heat_l1, heat_evolve, heat_kernel, hermite,
    multiscale_poincare_rhs, osc, ErgodicConfig, FrequencyField, HeatState, TimeQuadrature,
};
use common::{golden_poly, random_poly, rng};
use proptest::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn cosine_field() -> FrequencyField {
    FrequencyField::new(
        WindingMatrix::identity(1),
        TrigPolynomial::cosine(vec![1], 1.0),
    )
    .unwrap()
}

fn golden_two_mode() -> FrequencyField {
    FrequencyField::new(WindingMatrix::golden(), golden_poly()).unwrap()
}

#[test]
fn kernel_values() {
    assert!((heat_kernel(&[0.0], 1.0 / (4.0 * PI)).unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(
        heat_kernel(&[0.7, -0.2], 0.3).unwrap(),
        heat_kernel(&[-0.7, 0.2], 0.3).unwrap()
    );
    assert!(heat_kernel(&[0.0], 0.0).is_err());
    assert!(heat_kernel(&[0.0], -1.0).is_err());
}

fn trapezoid_mass(t: f64, radius: f64) -> f64 {
    // Trapezoid on a Gaussian converges spectrally.
    let n = 4000;
    let h = 2.0 * radius / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * heat_kernel(&[-radius + i as f64 * h], t).unwrap()
        })
        .sum::<f64>()
        * h
}

#[test]
fn kernel_mass_by_trapezoid() {
    let t: f64 = 1.0;
    // Radius 8 sqrt(t) cuts off erfc(4) of the mass.
    let mass = trapezoid_mass(t, 8.0 * t.sqrt());
    assert!(
        (mass - (1.0 - 1.541725790028002e-8)).abs() < 1e-12,
        "{mass}"
    );
    let mass = trapezoid_mass(t, 12.0 * t.sqrt());
    assert!((mass - 1.0).abs() < 1e-10, "{mass}");
}

#[test]
fn hermite_matches_rodrigues() {
    assert_eq!(hermite(0, 3.3), 1.0);
    // d^n/dt^n exp(-t^2) by central differences, for n = 1, 2.
    let g = |t: f64| (-t * t).exp();
    let h = 1e-4;
    for i in 0..20 {
        let t = -2.0 + 0.2 * i as f64;
        let d1 = (g(t + h) - g(t - h)) / (2.0 * h);
        let d2 = (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h);
        assert!((-(t * t).exp() * d1 - hermite(1, t)).abs() < 1e-6);
        assert!(((t * t).exp() * d2 - hermite(2, t)).abs() < 1e-5);
        assert!((hermite(2, t) - (4.0 * t * t - 2.0)).abs() < 1e-12);
    }
    for n in 0..=10 {
        for t in [0.3, 1.1, 2.7] {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (hermite(n, -t) - sign * hermite(n, t)).abs()
                    <= 1e-12 * hermite(n, t).abs().max(1.0)
            );
        }
    }
}

#[test]
fn heat_l1_values() {
    for d in 1..=3 {
        for t in [0.25, 1.0, 7.0] {
            assert!((grad_heat_l1(0, t, d).unwrap() - 1.0).abs() < 1e-10);
        }
    }
    let v = grad_heat_l1(1, 0.25, 1).unwrap();
    assert!((v - 2.0 / PI.sqrt()).abs() < 1e-10, "{v}");
    assert!(grad_heat_l1(1, 0.25, 4).is_err());
    assert!(grad_heat_l1(1, 0.0, 1).is_err());
}

#[test]
fn heat_l1_hermite_shape() {
    for d in 1..=2 {
        let mut worst = 0.0f64;
        for t in [0.25, 1.0, 4.0] {
            let values: Vec<(usize, f64)> = (0..=8)
                .map(|n| (n, grad_heat_l1(n, t, d).unwrap()))
                .collect();
            // Self-similarity: t^{n/2} * value does not depend on t.
            for (n, v) in &values {
                let base = grad_heat_l1(*n, 0.25, d).unwrap() * 0.25f64.powf(*n as f64 / 2.0);
                assert!((v * t.powf(*n as f64 / 2.0) - base).abs() <= 1e-9 * base);
            }
            worst = worst.max(fit_hermite_constant(t, &values));
        }
        assert!(worst <= 16.0, "d={d}: C={worst}");
    }
}

#[test]
fn evolve_closed_forms() {
    let c =
        FrequencyField::new(WindingMatrix::identity(1), TrigPolynomial::constant(1, 2.5)).unwrap();
    assert_eq!(heat_evolve(&c, 3.0).unwrap(), c);
    let f = cosine_field();
    let t = 0.01;
    let u = heat_evolve(&f, t).unwrap();
    for x in [0.0, 0.13, 0.77] {
        let want = (-4.0 * PI * PI * t).exp() * (2.0 * PI * x).cos();
        assert!((u.eval(&[x]) - want).abs() < 1e-15);
    }
    assert!(heat_evolve(&f, -1.0).is_err());
}

#[test]
fn evolve_matches_grid_dft() {
    // Frequencies k / 8 are periodic on a box of side 64.
    let w = WindingMatrix::new(vec![vec![0.125]]).unwrap();
    let p = TrigPolynomial::new(
        1,
        vec![
            TrigTerm {
                k: vec![1],
                c: 1.0,
                s: 0.0,
            },
            TrigTerm {
                k: vec![3],
                c: 0.0,
                s: 0.3,
            },
        ],
    )
    .unwrap();
    let f = FrequencyField::new(w, p).unwrap();
    let (side, n, t) = (64.0, 512usize, 0.7);
    let h = side / n as f64;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::new(f.eval(&[i as f64 * h]), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        let wave = if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        } / side;
        *v *= (-4.0 * PI * PI * wave * wave * t).exp() / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let u = heat_evolve(&f, t).unwrap();
    let err = (0..n)
        .map(|i| (buf[i].re - u.eval(&[i as f64 * h])).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn oscillation_examples() {
    let s = SupSampler::default();
    let c = FrequencyField::new(WindingMatrix::golden(), TrigPolynomial::constant(2, 1.0)).unwrap();
    assert_eq!(osc(&c, &s).unwrap().osc(), 0.0);
    assert!((osc(&cosine_field(), &s).unwrap().osc() - 2.0).abs() < 1e-12);
    // Golden two-mode field: the sampled path against a 4x finer scan.
    let g = golden_two_mode();
    let coarse = SupSampler {
        exact_when_independent: false,
        resolution: 32,
        ..SupSampler::default()
    };
    let fine = SupSampler {
        exact_when_independent: false,
        resolution: 128,
        refine: false,
        ..SupSampler::default()
    };
    let a = osc(&g, &coarse).unwrap().osc();
    let b = osc(&g, &fine).unwrap().osc();
    assert!((a - b).abs() <= 0.01 * b, "{a} vs {b}");
    assert!((a - 2.0).abs() < 1e-9);
}

#[test]
fn ergodic_constant_and_cosine() {
    let cfg = ErgodicConfig::default();
    let c =
        FrequencyField::new(WindingMatrix::identity(1), TrigPolynomial::constant(1, 4.0)).unwrap();
    let r = ergodic_bound_check(&c, &[1.0, 2.0], 1, &[1.0, 2.0], &cfg).unwrap();
    assert!(r.rows.iter().all(|row| row.lhs_osc == 0.0));
    assert!(r.holds());
    let r = ergodic_bound_check(
        &cosine_field(),
        &[1.0, 4.0, 16.0],
        1,
        &[1.0, 2.0, 4.0],
        &cfg,
    )
    .unwrap();
    assert!(r.holds());
    assert!(r.fitted_big_c <= 2.0, "{}", r.fitted_big_c);
    assert!(ergodic_bound_check(&cosine_field(), &[0.5], 1, &[1.0], &cfg).is_err());
    assert!(ergodic_bound_check(&cosine_field(), &[1.5], 2, &[1.0], &cfg).is_err());
}

#[test]
fn ergodic_golden() {
    let cfg = ErgodicConfig::default();
    let g = golden_two_mode();
    for k in [1, 2] {
        let r = ergodic_bound_check(&g, &[2.0, 4.0, 16.0, 64.0], k, &[1.0, 2.0, 4.0, 8.0], &cfg)
            .unwrap();
        assert!(r.holds(), "k={k}");
        assert!(r.fitted_big_c.is_finite() && r.grad_big_c.is_finite());
        assert_eq!(r.csv_rows().len(), 4);
    }
}

#[test]
fn poincare_single_modes() {
    let q = TimeQuadrature::default();
    let c =
        FrequencyField::new(WindingMatrix::identity(1), TrigPolynomial::constant(1, 1.0)).unwrap();
    assert_eq!(multiscale_poincare_rhs(&c, &q).unwrap().rhs, 0.0);
    let r = multiscale_poincare_rhs(&cosine_field(), &q).unwrap();
    assert!((r.rhs - 2.0).abs() < 1e-4, "{}", r.rhs);
    assert!(r.rhs >= r.osc);
    // Any single mode: rhs = osc = 2 |amplitude|.
    let w = WindingMatrix::golden();
    let p = TrigPolynomial::new(
        2,
        vec![TrigTerm {
            k: vec![2, -1],
            c: 0.3,
            s: -0.4,
        }],
    )
    .unwrap();
    let r = multiscale_poincare_rhs(&FrequencyField::new(w, p).unwrap(), &q).unwrap();
    assert!(
        (r.rhs - 1.0).abs() < 1e-4 && (r.osc - 1.0).abs() < 1e-9,
        "{r:?}"
    );
}

#[test]
fn poincare_inequality_on_random_fields() {
    let mut g = rng(11);
    let q = TimeQuadrature::default();
    for _ in 0..50 {
        let p = random_poly(&mut g, 2, 3);
        let f = FrequencyField::new(WindingMatrix::golden(), p).unwrap();
        let r = multiscale_poincare_rhs(&f, &q).unwrap();
        assert!(r.osc <= r.rhs + 1e-3, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_and_mean(seed in 0u64..1000, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let mut g = rng(seed);
        let f = FrequencyField::new(WindingMatrix::golden(), random_poly(&mut g, 2, 4)).unwrap();
        let two = heat_evolve(&heat_evolve(&f, s).unwrap(), t).unwrap();
        let one = heat_evolve(&f, s + t).unwrap();
        for (a, b) in two.modes().iter().zip(one.modes()) {
            prop_assert!((a.c - b.c).abs() <= 1e-14 * (1.0 + b.c.abs()));
            prop_assert!((a.s - b.s).abs() <= 1e-14 * (1.0 + b.s.abs()));
        }
        prop_assert_eq!(one.mean(), f.mean());
        let state = HeatState::new(&f, s).unwrap().advance(t).unwrap();
        prop_assert!((state.t - (s + t)).abs() < 1e-15);
        let amp: f64 = one.modes().iter().map(|m| m.c.hypot(m.s)).sum();
        let sampler = SupSampler { resolution: 16, refine: false, ..SupSampler::default() };
        prop_assert!(one.extrema(&sampler).osc() <= 2.0 * amp + 1e-12);
    }
}
