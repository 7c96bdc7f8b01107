//! L1 norms of derivatives of the heat kernel and the smallest constant `C`
//! with `||D^n Phi(., t)||_1 <= (C (1 + n) / t)^{n/2}`.

use std::f64::consts::PI;

use apcorr::heat::{fit_hermite_constant, grad_heat_l1, hermite};

fn main() -> apcorr::Result<()> {
    println!("H_0..H_5 at x = 0.7: {:?}", (0..=5).map(|n| hermite(n, 0.7)).collect::<Vec<_>>());
    let t = 0.25;
    for d in 1..=2 {
        let values: Vec<(usize, f64)> = (0..=8)
            .map(|n| grad_heat_l1(n, t, d).map(|v| (n, v)))
            .collect::<apcorr::Result<_>>()?;
        for (n, v) in &values {
            println!("d = {d}  n = {n}  ||D^n Phi(., 1/4)||_1 = {v:.10}");
        }
        println!("d = {d}: fitted C = {:.5}", fit_hermite_constant(t, &values));
    }
    println!(
        "n = 1, d = 1 closed form 1 / sqrt(pi t) = {:.12}",
        1.0 / (PI * t).sqrt()
    );
    Ok(())
}
