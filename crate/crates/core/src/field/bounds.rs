//! Bounds on the iterated-difference moduli of quasiperiodic fields in terms
//! of the discrepancy of the winding matrix.

use crate::error::{invalid, Result};
use crate::field::trig::TrigPolynomial;

/// All `(n_1, ..., n_k)` with `sum_j j n_j = k`.
pub fn weighted_compositions(k: usize) -> Vec<Vec<usize>> {
    fn rec(j: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j > k {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for n in 0..=left / j {
            cur.push(n);
            rec(j + 1, k, left - n * j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, k, k, &mut Vec::new(), &mut out);
    out
}

/// `max_{sum j n_j = k} prod_j (max_entry |grad^j F|)^{n_j}` using
/// [`TrigPolynomial::derivative_norm_bound`] for each factor.
pub fn derivative_product(entries: &[TrigPolynomial], k: usize) -> f64 {
    let norms: Vec<f64> = (1..=k)
        .map(|j| {
            entries
                .iter()
                .map(|e| e.derivative_norm_bound(j as u32))
                .fold(0.0, f64::max)
        })
        .collect();
    weighted_compositions(k)
        .iter()
        .map(|ns| {
            ns.iter()
                .enumerate()
                .map(|(j, n)| norms[j].powi(*n as i32))
                .product::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `sigma^k * derivative_product(F, k)`: bound on `rho_k` of a quasiperiodic field.
pub fn rho_k_bound(entries: &[TrigPolynomial], sigma: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(sigma.powi(k as i32) * derivative_product(entries, k))
}

/// Right-hand side of the sufficient condition on the lift dimension:
/// `chi(m) + A^{-1/(theta+1)} R^{-k/(m(theta+1))} max(...)`, to be compared
/// against `R^{-1-delta}`.
pub fn sufficient_condition(
    entries: &[TrigPolynomial],
    m_cut: usize,
    a_const: f64,
    theta: f64,
    radius: f64,
    k: usize,
) -> Result<f64> {
    if !(a_const > 0.0 && theta > 0.0 && radius >= 1.0 && m_cut >= 1 && k >= 1) {
        return Err(invalid(
            "sufficient condition needs A, theta > 0, R >= 1, m >= 1, k >= 1",
        ));
    }
    let chi = entries.iter().map(|e| e.chi_m(m_cut)).fold(0.0, f64::max);
    let p = theta + 1.0;
    let decay = a_const.powf(-1.0 / p) * radius.powf(-(k as f64) / (m_cut as f64 * p));
    Ok(chi + decay * derivative_product(entries, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_of_three() {
        let mut c = weighted_compositions(3);
        c.sort();
        assert_eq!(c, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);
    }

    #[test]
    fn product_for_single_cosine() {
        let f = TrigPolynomial::cosine(vec![1], 1.0);
        let tau = std::f64::consts::TAU;
        assert!((derivative_product(std::slice::from_ref(&f), 2) - tau * tau).abs() < 1e-12);
        assert!((rho_k_bound(&[f], 0.1, 2).unwrap() - 0.01 * tau * tau).abs() < 1e-12);
    }
}
