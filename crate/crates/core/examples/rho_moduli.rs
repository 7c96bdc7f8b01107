//! Iterated-difference moduli of a golden-mean quasiperiodic coefficient,
//! compared with the discrepancy bound.

use apcorr::diffcalc::{rho_k, rho_star, ModulusConfig};
use apcorr::field::{
    bounds, sigma, QuasiField, SigmaConfig, TrigPolynomial, TrigTerm, WindingMatrix,
};

fn main() -> apcorr::Result<()> {
    let m = WindingMatrix::golden();
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
    let field = QuasiField::scalar(m.clone(), f.clone())?;
    let cfg = ModulusConfig::default();

    for r in [5.0, 10.0, 20.0, 40.0] {
        let s = sigma(&m, r, &SigmaConfig::default())?.value;
        for k in 1..=3 {
            let est = rho_k(&field, r, k, &cfg)?;
            let bound = bounds::rho_k_bound(std::slice::from_ref(&f), s, k)?;
            println!(
                "R = {r:>4}  k = {k}  rho_k = {:.4e}  sigma^k bound = {:.4e}",
                est.value, bound
            );
        }
    }
    let star = rho_star(&field, 64.0, 2.0, 3, &cfg)?;
    println!(
        "rho_* (R = 64, C = 2) = {:.4e} attained at k = {:?}",
        star.value, star.argmin_k
    );
    Ok(())
}
