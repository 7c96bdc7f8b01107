//! The multiscale Poincare functional against the oscillation: equality for a
//! single mode, strict inequality once modes interact.

use apcorr::field::{TrigPolynomial, TrigTerm, WindingMatrix};
use apcorr::heat::{multiscale_poincare_rhs, FrequencyField, TimeQuadrature};

fn main() -> apcorr::Result<()> {
    let q = TimeQuadrature::default();
    let cos = FrequencyField::new(WindingMatrix::identity(1), TrigPolynomial::cosine(vec![1], 1.0))?;
    let r = multiscale_poincare_rhs(&cos, &q)?;
    println!("cos(2 pi x): osc = {:.8}  rhs = {:.8}", r.osc, r.rhs);

    let two = TrigPolynomial::new(
        2,
        vec![
            TrigTerm {
                k: vec![1, 0],
                c: 1.0,
                s: 0.0,
            },
            TrigTerm {
                k: vec![0, 3],
                c: 0.0,
                s: 0.5,
            },
        ],
    )?;
    let f = FrequencyField::new(WindingMatrix::golden(), two)?;
    let r = multiscale_poincare_rhs(&f, &q)?;
    println!(
        "two golden modes: osc = {:.6}  rhs = {:.6}  (body {:.6}, head {:.2e}, tail {:.2e})",
        r.osc, r.rhs, r.body, r.head, r.tail
    );
    Ok(())
}
