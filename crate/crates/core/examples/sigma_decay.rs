//! Discrepancy of the golden-mean lift as the ball radius grows.

use apcorr::field::{diophantine_constant, sigma, SigmaConfig, WindingMatrix};
use apcorr::fit::loglog_slope;

fn main() -> apcorr::Result<()> {
    let m = WindingMatrix::golden();
    let dio = diophantine_constant(&m, 1.0, 200)?;
    println!(
        "Diophantine constant (theta = 1): {:.6} at z = {:?}",
        dio.a_est, dio.argmin_z
    );

    let cfg = SigmaConfig::default();
    let radii: Vec<f64> = (2..=8).map(|p| 2f64.powi(p)).collect();
    let mut values = Vec::new();
    for &r in &radii {
        let s = sigma(&m, r, &cfg)?;
        println!(
            "R = {r:>5}  sigma = {:.6e}  (res_y = {}, res_z = {})",
            s.value, s.res_y, s.res_z
        );
        values.push(s.value);
    }
    if let Some(fit) = loglog_slope(&radii, &values) {
        println!("fitted slope {:.3} (bound exponent -1/4)", fit.slope);
    }
    Ok(())
}
