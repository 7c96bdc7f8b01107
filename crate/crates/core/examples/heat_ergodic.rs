//! Heat flow of a quasiperiodic field against the ergodic envelope built from
//! omega_k, with the fitted constants.

use apcorr::field::{TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::heat::{ergodic_bound_check, heat_evolve, ErgodicConfig, FrequencyField};

fn main() -> apcorr::Result<()> {
    // slow modes so the flow is visible over t in [1, 256]
    let w = WindingMatrix::new(vec![vec![0.05], vec![0.05 * 1.618033988749895]])?;
    let poly = TrigPolynomial::new(
        2,
        vec![
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
    let f = FrequencyField::new(w, poly)?;
    for t in [0.0, 1.0, 16.0] {
        let u = heat_evolve(&f, t)?;
        println!("t = {t:>4}: modes {:?}", u.modes().iter().map(|m| m.c).collect::<Vec<_>>());
    }
    let times = [2.0, 4.0, 16.0, 64.0, 256.0];
    let radii = [4.0, 8.0, 16.0, 32.0, 64.0];
    for k in [1, 2] {
        let r = ergodic_bound_check(&f, &times, k, &radii, &ErgodicConfig::default())?;
        println!("k = {k}: C = {:.3}, c = {}, holds = {}", r.fitted_big_c, r.fitted_small_c, r.holds());
        for row in &r.rows {
            println!(
                "  t = {:>5}  osc = {:.4e}  envelope = {:.4e}  (R = {})",
                row.t, row.lhs_osc, row.rhs_min, row.argmin_r
            );
        }
    }
    Ok(())
}
