mod common;

use apcorr::corrector::{
    check_corrector_grid, corrector_limit, corrector_rho1, difference_corrector_check,
    lipschitz_report, psi, read_grid_field, solve_corrector, write_grid_field, CorrectorConfig,
    GridField, Multigrid, Operator, PeriodicGrid, PreconditionerKind, Rho1Config,
};
use apcorr::field::{CoefficientField, FieldSpec, TrigPolynomial, WindingMatrix};
use apcorr::Error;
use common::{constant_field, cos_field, golden_field, rng};
use proptest::prelude::*;
use rand::Rng;

fn fixture(name: &str) -> CoefficientField {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    FieldSpec::parse(&text).unwrap().build().unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn small_cfg() -> CorrectorConfig {
    CorrectorConfig {
        eps_l: 16.0,
        h_max: 1.0 / 16.0,
        ..CorrectorConfig::default()
    }
}

#[test]
fn plane_wave_is_an_eigenvector_for_identity() {
    let field = constant_field(2);
    let (side, n, eps) = (32.0, 512, 0.3);
    let grid = PeriodicGrid::new(2, side, n).unwrap();
    let op = Operator::new(&field, &grid, eps).unwrap();
    let h = grid.h();
    let k = [3.0, 5.0];
    let v = GridField::from_fn(&grid, |x| {
        (2.0 * std::f64::consts::PI * (k[0] * x[0] + k[1] * x[1]) / side).cos()
    });
    let mut av = vec![0.0; grid.len()];
    op.apply(&v.values, &mut av);
    let lambda = eps * eps
        + k.iter()
            .map(|kj| 4.0 / (h * h) * (std::f64::consts::PI * kj * h / side).sin().powi(2))
            .sum::<f64>();
    for (a, b) in av.iter().zip(&v.values) {
        assert!((a - lambda * b).abs() < 1e-10, "{a} vs {}", lambda * b);
    }
}

#[test]
fn operator_is_symmetric_and_coercive() {
    let mut r = rng(11);
    for (field, d) in [(golden_field(), 1), (fixture("golden2d.toml"), 2)] {
        let eps = 0.25;
        let grid = PeriodicGrid::new(d, 32.0, 512).unwrap();
        let op = Operator::new(&field, &grid, eps).unwrap();
        assert!(op.is_symmetric());
        let mut av = vec![0.0; grid.len()];
        let mut aw = vec![0.0; grid.len()];
        for _ in 0..100 {
            let v: Vec<f64> = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
            op.apply(&v, &mut av);
            op.apply(&w, &mut aw);
            let (vaw, avw) = (dot(&v, &aw), dot(&av, &w));
            let scale = dot(&v, &v).sqrt() * dot(&aw, &aw).sqrt();
            assert!((vaw - avw).abs() <= 1e-12 * scale, "{vaw} {avw}");
            assert!(dot(&av, &v) >= eps * eps * dot(&v, &v));
        }
    }
}

#[test]
fn constant_coefficient_has_zero_corrector() {
    for d in 1..=2 {
        let cfg = small_cfg();
        let r = solve_corrector(&constant_field(d), &vec![1.0 / (d as f64).sqrt(); d], 1.0 / 16.0, &cfg.grid(d, 1.0 / 16.0).unwrap(), &cfg).unwrap();
        assert!(r.sup_phi <= 1e-12);
        let (a, b) = lipschitz_report(&r);
        assert!(a <= 1e-12 && b <= 1e-12);
    }
}

#[test]
fn corrector_of_even_coefficient_is_odd() {
    let cfg = small_cfg();
    let eps = 1.0 / 8.0;
    let grid = cfg.grid(1, eps).unwrap();
    let r = solve_corrector(&cos_field(), &[1.0], eps, &grid, &cfg).unwrap();
    let phi = r.phi();
    let n = grid.nodes_per_axis();
    let scale = phi.sup_abs();
    for i in 0..n {
        let x = grid.point(i)[0];
        let j = ((-x - grid.origin()) / grid.h()).round() as i64;
        let j = j.rem_euclid(n as i64) as usize;
        assert!((phi.values[i] + phi.values[j]).abs() <= 1e-8 * scale);
    }
}

#[test]
fn periodic_corrector_has_zero_mean_and_energy_identity() {
    let cfg = CorrectorConfig {
        eps_l: 16.0,
        h_max: 1.0 / 64.0,
        ..CorrectorConfig::default()
    };
    let eps = 1.0 / 64.0;
    let r = solve_corrector(&cos_field(), &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg).unwrap();
    assert!(r.mean_phi.abs() <= 1e-4 * r.sup_phi, "mean {} sup {}", r.mean_phi, r.sup_phi);
    assert!(r.energy_defect.abs() <= 1e-8);
    // eps -> 0 profile: phi' = sqrt(3) / a - 1, largest where a = 1
    let oracle = 3f64.sqrt() - 1.0;
    assert!((r.sup_grad_phi - oracle).abs() < 5e-3, "{}", r.sup_grad_phi);
}

#[test]
fn doubling_the_box_leaves_a_periodic_corrector_unchanged() {
    let eps = 1.0 / 8.0;
    let sups: Vec<f64> = [16.0, 32.0]
        .iter()
        .map(|&eps_l| {
            let cfg = CorrectorConfig {
                eps_l,
                ..CorrectorConfig::default()
            };
            solve_corrector(&cos_field(), &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg)
                .unwrap()
                .sup_phi
        })
        .collect();
    assert!((sups[0] - sups[1]).abs() <= 1e-8 * sups[0]);
}

#[test]
fn quasiperiodic_corrector_stabilizes_with_box_size() {
    let eps = 1.0 / 8.0;
    let sups: Vec<f64> = [16.0, 32.0]
        .iter()
        .map(|&eps_l| {
            let cfg = CorrectorConfig {
                eps_l,
                ..CorrectorConfig::default()
            };
            solve_corrector(&golden_field(), &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg)
                .unwrap()
                .sup_phi
        })
        .collect();
    assert!((sups[0] - sups[1]).abs() <= 1e-3 * sups[1], "{sups:?}");
}

#[test]
fn mesh_refinement_converges_at_second_order() {
    let eps = 0.5;
    let field = cos_field();
    let solves: Vec<GridField> = [16usize, 32, 64]
        .iter()
        .map(|&per_unit| {
            let grid = PeriodicGrid::new(1, 16.0, 16 * per_unit).unwrap();
            let cfg = CorrectorConfig::default();
            solve_corrector(&field, &[1.0], eps, &grid, &cfg).unwrap().phi().clone()
        })
        .collect();
    let coarse = &solves[0];
    let diff = |a: &GridField, b: &GridField| {
        (0..coarse.grid.len())
            .map(|i| {
                let x = coarse.grid.point(i);
                (a.interpolate(0, &x) - b.interpolate(0, &x)).abs()
            })
            .fold(0.0, f64::max)
    };
    let ratio = diff(&solves[0], &solves[1]) / diff(&solves[1], &solves[2]);
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn jacobi_and_multigrid_agree() {
    let eps = 1.0 / 16.0;
    let mut cfg = small_cfg();
    let grid = cfg.grid(1, eps).unwrap();
    let mg = solve_corrector(&golden_field(), &[1.0], eps, &grid, &cfg).unwrap();
    cfg.solver.preconditioner = PreconditionerKind::Jacobi;
    let jac = solve_corrector(&golden_field(), &[1.0], eps, &grid, &cfg).unwrap();
    let diff = mg.phi().minus(jac.phi()).unwrap().sup_abs();
    assert!(diff <= 1e-7 * mg.sup_phi, "{diff}");
    assert!(mg.solver_iters <= jac.solver_iters);
}

#[test]
fn multigrid_hierarchy_reaches_a_small_grid() {
    let grid = PeriodicGrid::new(2, 32.0, 512).unwrap();
    let op = Operator::new(&fixture("golden2d.toml"), &grid, 0.25).unwrap();
    let mg = Multigrid::new(&op, 2).unwrap();
    assert!(mg.depth() >= 4);
}

#[test]
fn grid_field_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let grid = PeriodicGrid::with_origin(2, 4.0, 8, 0.5).unwrap();
    let f = GridField::from_fn(&grid, |x| x[0] - 2.0 * x[1]);
    let base = dir.path().join("phi");
    write_grid_field(&f, &base).unwrap();
    assert_eq!(read_grid_field(&base).unwrap(), f);
    std::fs::write(dir.path().join("phi.bin"), [0u8; 12]).unwrap();
    assert!(read_grid_field(&base).is_err());
}

#[test]
fn psi_of_constant_field_vanishes_and_periodic_psi_decreases() {
    let cfg = small_cfg();
    let eps = 1.0 / 16.0;
    let grid = cfg.grid(1, eps).unwrap();
    let p = psi(&constant_field(1), &[1.0], eps, &grid, &cfg).unwrap();
    assert!(p.sup_psi <= 1e-12);

    let eps_list: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let limit = corrector_limit(&cos_field(), &[1.0], &eps_list, &cfg).unwrap();
    for w in limit.rows.windows(2) {
        assert!(w[1].sup_psi < w[0].sup_psi);
    }
    for row in &limit.rows {
        assert!(row.equation_residual <= 10.0 * cfg.solver.tol);
    }
}

#[test]
fn psi_equation_holds_on_random_quasiperiodic_fixture() {
    let mut r = rng(5);
    let poly = common::random_poly(&mut r, 2, 4);
    let shift = poly.terms().iter().map(|t| t.c.abs() + t.s.abs()).sum::<f64>() + 1.0;
    let field = CoefficientField::isotropic(
        WindingMatrix::golden(),
        poly.plus_constant(shift),
        2.0 * shift + 1.0,
    )
    .unwrap();
    let cfg = small_cfg();
    let eps = 1.0 / 8.0;
    let p = psi(&field, &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg).unwrap();
    assert!(p.equation_ok, "{}", p.equation_residual);
}

#[test]
fn difference_corrector_trivial_cases() {
    let cfg = small_cfg();
    let eps = 1.0 / 8.0;
    let grid = cfg.grid(1, eps).unwrap();
    let same = difference_corrector_check(&golden_field(), &[0.7], &[0.7], &[1.0], eps, &grid, &cfg).unwrap();
    assert!(same.sup_zeta <= 1e-12 && same.sup_delta_phi <= 1e-12);
    let flat = difference_corrector_check(&constant_field(1), &[0.7], &[-2.0], &[1.0], eps, &grid, &cfg).unwrap();
    assert!(flat.absolute <= 1e-12);
}

#[test]
fn corrector_modulus_of_periodic_corrector_vanishes() {
    let cfg = small_cfg();
    let eps = 1.0 / 16.0;
    let r = solve_corrector(&cos_field(), &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg).unwrap();
    let rows = corrector_rho1(r.phi(), Some(&cos_field()), &[1.0, 2.0], &Rho1Config::default()).unwrap();
    for row in rows {
        assert!(row.rho_phi <= 1e-8 * r.sup_phi, "{row:?}");
    }
}

#[test]
fn corrector_modulus_of_golden_corrector_does_not_grow() {
    let cfg = small_cfg();
    let eps = 1.0 / 8.0;
    let r = solve_corrector(&golden_field(), &[1.0], eps, &cfg.grid(1, eps).unwrap(), &cfg).unwrap();
    let rows = corrector_rho1(r.phi(), None, &[1.0, 4.0, 16.0], &Rho1Config::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].rho_phi <= w[0].rho_phi + 1e-12, "{rows:?}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let cfg = small_cfg();
    let grid = cfg.grid(1, 0.125).unwrap();
    let field = cos_field();
    assert!(matches!(
        solve_corrector(&field, &[0.5], 0.125, &grid, &cfg),
        Err(Error::InvalidInput(_))
    ));
    assert!(solve_corrector(&field, &[1.0], 0.0, &grid, &cfg).is_err());
    assert!(PeriodicGrid::new(1, 4.0, 12).is_err());
    assert!(cfg.grid(1, 2.0).is_err());
    // box much smaller than 1 / eps
    let tiny = PeriodicGrid::new(1, 1.0, 16).unwrap();
    assert!(check_corrector_grid(&tiny, 1.0 / 64.0).is_err());
    let limit = corrector_limit(&field, &[1.0], &[0.125, 0.1], &cfg);
    assert!(limit.is_err());
    let flat = TrigPolynomial::constant(1, 1.0);
    assert!(CoefficientField::isotropic(WindingMatrix::identity(1), flat, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn apply_is_linear(seed in 0u64..1000, alpha in -3.0f64..3.0) {
        let mut r = rng(seed);
        let grid = PeriodicGrid::new(2, 16.0, 256).unwrap();
        let op = Operator::new(&fixture("golden2d.toml"), &grid, 0.5).unwrap();
        let v: Vec<f64> = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let comb: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + alpha * b).collect();
        let (mut av, mut aw, mut ac) = (vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]);
        op.apply(&v, &mut av);
        op.apply(&w, &mut aw);
        op.apply(&comb, &mut ac);
        for i in 0..grid.len() {
            prop_assert!((ac[i] - av[i] - alpha * aw[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn constants_are_scaled_by_eps_squared(c in -5.0f64..5.0, eps in 0.5f64..1.0) {
        let grid = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let op = Operator::new(&golden_field(), &grid, eps).unwrap();
        let v = vec![c; grid.len()];
        let mut av = vec![0.0; grid.len()];
        op.apply(&v, &mut av);
        for a in av {
            prop_assert!((a - eps * eps * c).abs() < 1e-9);
        }
    }
}
