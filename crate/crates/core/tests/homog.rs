mod common;

use apcorr::corrector::{CorrectorConfig, GridField, PeriodicGrid, SolverConfig};
use apcorr::field::{CoefficientField, FieldSpec, TrigPolynomial, WindingMatrix};
use apcorr::homog::{
    arithmetic_mean, closed_form_1d, dirichlet_rate, effective_matrix, harmonic_mean,
    solve_dirichlet, two_scale_error, BoundaryData, RateConfig,
};
use common::{constant_field, cos_field, golden_field, rng};

fn fixture(name: &str) -> CoefficientField {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    FieldSpec::parse(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .build()
        .unwrap()
}

fn cheap() -> CorrectorConfig {
    CorrectorConfig {
        eps_l: 8.0,
        ..CorrectorConfig::default()
    }
}

#[test]
fn constant_matrix_is_its_own_effective_matrix() {
    let a = vec![1.5, 0.3, 0.3, 2.0];
    let field = CoefficientField::constant(a.clone(), 2, 3.0).unwrap();
    let cfg = cheap();
    let eps = 0.25;
    let m = effective_matrix(&field, eps, &cfg.grid(2, eps).unwrap(), &cfg).unwrap();
    for (x, y) in m.abar.iter().zip(&a) {
        assert!((x - y).abs() < 1e-10, "{:?}", m.abar);
    }
}

#[test]
fn one_dimensional_effective_coefficient_is_the_harmonic_mean() {
    let field = cos_field();
    let hm = harmonic_mean(&field, 256).unwrap();
    assert!((hm - 3f64.sqrt()).abs() < 1e-12);
    assert!((arithmetic_mean(&field, 256).unwrap() - 2.0).abs() < 1e-12);
    let cfg = CorrectorConfig {
        eps_l: 16.0,
        h_max: 1.0 / 256.0,
        ..CorrectorConfig::default()
    };
    let eps = 1.0 / 64.0;
    let m = effective_matrix(&field, eps, &cfg.grid(1, eps).unwrap(), &cfg).unwrap();
    assert!((m.entry(0, 0) - 3f64.sqrt()).abs() < 1e-3, "{}", m.entry(0, 0));

    let g = golden_field();
    let m = effective_matrix(&g, 1.0 / 16.0, &cheap().grid(1, 1.0 / 16.0).unwrap(), &cheap()).unwrap();
    assert!((m.entry(0, 0) - harmonic_mean(&g, 512).unwrap()).abs() < 1e-2);
}

#[test]
fn effective_matrix_lies_between_ellipticity_bounds() {
    let mut r = rng(3);
    let cfg = cheap();
    let eps = 0.25;
    let grid = cfg.grid(2, eps).unwrap();
    let m = effective_matrix(&fixture("golden2d.toml"), eps, &grid, &cfg).unwrap();
    let (lo, hi) = m.symmetric_range();
    assert!(lo >= 1.0 - 1e-9 && hi <= 4.0 + 1e-9, "{lo} {hi}");
    for _ in 0..3 {
        let poly = common::random_poly(&mut r, 2, 3);
        let amp: f64 = poly.terms().iter().map(|t| t.c.abs() + t.s.abs()).sum();
        let f = poly.scaled(1.0 / amp).plus_constant(2.0);
        let field = CoefficientField::isotropic(WindingMatrix::golden(), f, 3.0).unwrap();
        let m = effective_matrix(&field, 0.25, &cfg.grid(1, 0.25).unwrap(), &cfg).unwrap();
        let (lo, hi) = m.symmetric_range();
        assert!(lo >= 1.0 - 1e-9 && hi <= 3.0 + 1e-9, "{lo} {hi}");
    }
}

#[test]
fn dirichlet_solution_of_constant_coefficient_is_the_boundary_data() {
    let g = BoundaryData::linear(0.5, vec![1.0, -2.0]);
    let sol = solve_dirichlet(&constant_field(2), &g, 32, &SolverConfig::default()).unwrap();
    for &i in &sol.closure {
        let x = sol.u.grid.point(i);
        assert!((sol.u.values[i] - g.eval(&x)).abs() < 1e-9);
    }
    let rep = dirichlet_rate(
        &constant_field(1),
        &BoundaryData::linear(0.0, vec![1.0]),
        &[0.25, 0.125],
        &RateConfig {
            two_scale: false,
            ..RateConfig::default()
        },
    )
    .unwrap();
    assert!(rep.degenerate);
    assert!(rep.rows.iter().all(|r| r.err_linf < 1e-9));
}

#[test]
fn one_dimensional_discrete_solution_matches_closed_form() {
    let g = BoundaryData::linear(1.0, vec![2.0]);
    let eps = 0.125;
    let n = 512;
    let sol = solve_dirichlet(&cos_field().rescaled(eps).unwrap(), &g, n, &SolverConfig::default()).unwrap();
    let exact = closed_form_1d(&cos_field(), &g, eps, n).unwrap();
    for (p, u) in exact.iter().enumerate() {
        let i = sol.u.grid.index(&[p]);
        assert!((sol.u.values[i] - u).abs() < 1e-4, "{p}");
    }
}

#[test]
fn one_dimensional_rate_is_first_order() {
    let eps: Vec<f64> = (3..=6).map(|k| 2f64.powi(-k)).collect();
    let rep = dirichlet_rate(
        &cos_field().translated(&[0.3]),
        &BoundaryData::linear(0.0, vec![1.0]),
        &eps,
        &RateConfig::default(),
    )
    .unwrap();
    let slope = rep.slope.unwrap().slope;
    assert!((0.8..=1.2).contains(&slope), "{slope}");
    let closed = rep.slope_closed.unwrap().slope;
    assert!((slope - closed).abs() < 0.1);
    let w = rep.slope_w1p.unwrap().slope;
    assert!(w > 0.5, "{w} {:?}", rep.rows);
}

#[test]
fn two_scale_error_is_monotone_in_the_domain() {
    let grid = PeriodicGrid::with_origin(1, 2.0, 256, 0.0).unwrap();
    let u_eps = GridField::from_fn(&grid, |x| x[0] + 0.05 * (40.0 * x[0]).sin());
    let u_hom = GridField::from_fn(&grid, |x| x[0]);
    let phi_grid = PeriodicGrid::with_origin(1, 16.0, 256, -6.0).unwrap();
    let phi = GridField::from_fn(&phi_grid, |y| 0.1 * (2.0 * std::f64::consts::PI * y[0]).cos());
    let mut last = f64::INFINITY;
    for margin in [0.1, 0.2, 0.3, 0.4] {
        let e = two_scale_error(&u_eps, &u_hom, 0.25, std::slice::from_ref(&phi), margin, 2.0).unwrap();
        assert!(e <= last + 1e-12);
        last = e;
    }
    assert!(two_scale_error(&u_eps, &u_hom, 0.25, std::slice::from_ref(&phi), 0.05, 2.0).is_err());
    assert!(two_scale_error(&u_eps, &u_hom, 0.25, &[phi], 0.2, 0.5).is_err());
}

#[test]
fn rate_inputs_are_checked() {
    let field = cos_field();
    let g = BoundaryData::linear(0.0, vec![1.0]);
    let cfg = RateConfig::default();
    assert!(dirichlet_rate(&field, &g, &[], &cfg).is_err());
    assert!(dirichlet_rate(&field, &g, &[1.5], &cfg).is_err());
    assert!(dirichlet_rate(&field, &BoundaryData::linear(0.0, vec![1.0, 1.0]), &[0.25], &cfg).is_err());
    let mut bad = BoundaryData::linear(0.0, vec![1.0]);
    bad.c = f64::NAN;
    assert!(bad.validate(1).is_err());
    let flat = TrigPolynomial::constant(1, 2.0);
    let f = CoefficientField::isotropic(WindingMatrix::identity(1), flat, 2.0).unwrap();
    assert!((harmonic_mean(&f, 64).unwrap() - 2.0).abs() < 1e-12);
    assert!(harmonic_mean(&fixture("golden2d.toml"), 64).is_err());
}
