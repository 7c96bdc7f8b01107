//! Convergence of `u^eps` to the homogenized solution on the unit interval and
//! the unit square, with fitted log-log slopes.

use std::time::Instant;

use apcorr::field::{CoefficientField, TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::homog::{dirichlet_rate, BoundaryData, RateConfig, RateReport};

fn show(name: &str, r: &RateReport) {
    println!("{name}: abar = {:.6?}", r.abar);
    println!("  {}", RateReport::CSV_HEADER);
    for line in r.csv_rows() {
        println!("  {line}");
    }
    println!(
        "  slope {:.3?}  closed-form slope {:.3?}  two-scale slope {:.3?}",
        r.slope.map(|f| f.slope),
        r.slope_closed.map(|f| f.slope),
        r.slope_w1p.map(|f| f.slope)
    );
}

fn main() -> apcorr::Result<()> {
    let cos = TrigPolynomial::cosine(vec![1], 1.0).plus_constant(2.0);
    let field = CoefficientField::isotropic(WindingMatrix::identity(1), cos, 3.0)?;
    let eps: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let start = Instant::now();
    // shift the oscillation off the boundary phase so the error is generic
    let r = dirichlet_rate(
        &field.translated(&[0.3]),
        &BoundaryData::linear(0.0, vec![1.0]),
        &eps,
        &RateConfig::default(),
    )?;
    show("1D, a = 2 + cos", &r);
    println!("  ({:.2?})", start.elapsed());

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
    let g = BoundaryData {
        c: 0.0,
        b: vec![1.0, 0.5],
        a: vec![0.5, 0.0, 0.0, -0.5],
    };
    let cfg = RateConfig {
        nodes_per_eps: 8.0,
        min_nodes: 32,
        corrector: apcorr::corrector::CorrectorConfig {
            eps_l: 8.0,
            ..Default::default()
        },
        corrector_eps: 0.25,
        ..RateConfig::default()
    };
    let start = Instant::now();
    let r = dirichlet_rate(&field, &g, &[0.25, 0.125, 0.0625], &cfg)?;
    show("2D quasiperiodic", &r);
    println!("  ({:.2?})", start.elapsed());
    Ok(())
}
