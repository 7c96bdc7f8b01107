//! Effective coefficients from approximate correctors, against the harmonic
//! mean in one dimension and the Voigt-Reuss bounds.

use apcorr::corrector::CorrectorConfig;
use apcorr::field::{CoefficientField, TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::homog::{arithmetic_mean, effective_matrix, harmonic_mean};

fn main() -> apcorr::Result<()> {
    let cfg = CorrectorConfig {
        h_max: 1.0 / 256.0,
        ..CorrectorConfig::default()
    };
    let cos = CoefficientField::isotropic(
        WindingMatrix::identity(1),
        TrigPolynomial::cosine(vec![1], 1.0).plus_constant(2.0),
        3.0,
    )?;
    let eps = 1.0 / 64.0;
    let m = effective_matrix(&cos, eps, &cfg.grid(1, eps)?, &cfg)?;
    println!(
        "2 + cos(2 pi x): abar = {:.9}  harmonic mean = {:.9}  (sqrt 3 = {:.9})",
        m.abar[0],
        harmonic_mean(&cos, 256)?,
        3f64.sqrt()
    );

    let golden = TrigPolynomial::new(
        2,
        vec![
            TrigTerm {
                k: vec![0, 0],
                c: 2.5,
                s: 0.0,
            },
            TrigTerm {
                k: vec![1, 0],
                c: 0.5,
                s: 0.0,
            },
            TrigTerm {
                k: vec![0, 1],
                c: 0.5,
                s: 0.0,
            },
        ],
    )?;
    let field = CoefficientField::isotropic(WindingMatrix::golden(), golden, 3.5)?;
    let cfg = CorrectorConfig {
        h_max: 1.0 / 64.0,
        ..CorrectorConfig::default()
    };
    let m = effective_matrix(&field, eps, &cfg.grid(1, eps)?, &cfg)?;
    println!(
        "golden: harmonic {:.6} <= abar {:.6} <= arithmetic {:.6}",
        harmonic_mean(&field, 256)?,
        m.abar[0],
        arithmetic_mean(&field, 256)?
    );

    // a 2D quasiperiodic isotropic field on a three-frequency torus
    let w = WindingMatrix::new(vec![
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![(5f64.sqrt() - 1.0) / 2.0, 2f64.sqrt() - 1.0],
    ])?;
    let f = TrigPolynomial::new(
        3,
        vec![
            TrigTerm {
                k: vec![0, 0, 0],
                c: 2.5,
                s: 0.0,
            },
            TrigTerm {
                k: vec![1, 0, 0],
                c: 0.4,
                s: 0.0,
            },
            TrigTerm {
                k: vec![0, 1, 0],
                c: 0.4,
                s: 0.0,
            },
            TrigTerm {
                k: vec![0, 0, 1],
                c: 0.4,
                s: 0.0,
            },
        ],
    )?;
    let field = CoefficientField::isotropic(w, f, 4.0)?;
    let cfg = CorrectorConfig {
        eps_l: 16.0,
        ..CorrectorConfig::default()
    };
    let eps = 0.25;
    let m = effective_matrix(&field, eps, &cfg.grid(2, eps)?, &cfg)?;
    let (lo, hi) = m.symmetric_range();
    println!(
        "2D quasiperiodic abar = {:.5?}, symmetric part in [{lo:.4}, {hi:.4}]",
        m.abar
    );
    Ok(())
}
