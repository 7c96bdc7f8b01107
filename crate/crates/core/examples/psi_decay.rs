//! Dyadic corrector differences for a golden-mean quasiperiodic coefficient:
//! sup |phi_eps| should plateau while sup |psi_eps| decays geometrically.

use std::time::Instant;

use apcorr::corrector::{corrector_limit, solve_corrector, CorrectorConfig};
use apcorr::field::{CoefficientField, TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::fit::loglog_slope;

fn main() -> apcorr::Result<()> {
    let f = TrigPolynomial::new(
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
    let field = CoefficientField::isotropic(WindingMatrix::golden(), f, 3.5)?;
    let cfg = CorrectorConfig::default();

    let mut inv_eps = Vec::new();
    let mut sups = Vec::new();
    for k in 3..=8 {
        let eps = 2f64.powi(-k);
        let start = Instant::now();
        let r = solve_corrector(&field, &[1.0], eps, &cfg.grid(1, eps)?, &cfg)?;
        println!(
            "eps = 2^-{k}  sup|phi| = {:.6e}  sup|grad phi| = {:.4}  ({:.2?})",
            r.sup_phi,
            r.sup_grad_phi,
            start.elapsed()
        );
        inv_eps.push(1.0 / eps);
        sups.push(r.sup_phi);
    }
    if let Some(fit) = loglog_slope(&inv_eps, &sups) {
        println!("slope of log sup|phi| against log(1/eps): {:.4}", fit.slope);
    }

    let eps_list: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let limit = corrector_limit(&field, &[1.0], &eps_list, &cfg)?;
    for row in &limit.rows {
        println!(
            "eps = {:<10} sup|psi| = {:.6e}  partial sum = {:.6e}  psi-equation residual = {:.1e}",
            row.eps, row.sup_psi, row.partial_sum, row.equation_residual
        );
    }
    println!(
        "per-step factor {:?}, flagged = {}",
        limit.rate, limit.flagged
    );
    Ok(())
}
