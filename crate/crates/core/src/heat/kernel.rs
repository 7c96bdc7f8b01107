use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// `Phi(x, t) = (4 pi t)^{-d/2} exp(-|x|^2 / 4t)`.
pub fn heat_kernel(x: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("heat kernel needs t > 0, got {t}")));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    Ok((4.0 * PI * t).powf(-(x.len() as f64) / 2.0) * (-r2 / (4.0 * t)).exp())
}

/// Physicists' Hermite polynomial: `H_0 = 1`, `H_1 = 2t`,
/// `H_{n+1} = 2t H_n - 2n H_{n-1}`.
pub fn hermite(n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * t);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of `H_n` (eigenvalues of its Jacobi matrix), ascending.
pub fn hermite_roots(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mut j = DMatrix::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let mut r: Vec<f64> = SymmetricEigen::new(j).eigenvalues.iter().copied().collect();
    r.sort_by(f64::total_cmp);
    r
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for i in 1..n {
        let k = i as f64;
        let b = k / (4.0 * k * k - 1.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Largest `n` accepted by [`grad_heat_l1`].
pub const MAX_ORDER: usize = 24;

/// Composite Gauss-Legendre rule on `[-cut, cut]` with breakpoints at the
/// roots of `H_0..H_n` and panels no wider than `width`.
fn panel_rule(n: usize, cut: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let mut breaks = vec![-cut, cut];
    for a in 1..=n {
        breaks.extend(hermite_roots(a));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let (gx, gw) = gauss_legendre(8);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let pieces = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for p in 0..pieces {
            let lo = a + p as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                xs.push(lo + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * w);
            }
        }
    }
    (xs, ws)
}

/// All `alpha` in `N^d` with `|alpha| = n`.
fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|a| {
            multi_indices(n - a, d - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
        })
        .collect()
}

/// `int_{R^d} max_{|alpha| = n} |d^alpha Phi(x, t)| dx`.
///
/// After `s = x / (2 sqrt t)` each partial is a product of
/// `H_{alpha_j}(s_j) exp(-s_j^2)`, so the integral equals
/// `pi^{-d/2} (2 sqrt t)^{-n} int max_alpha prod_j |H_{alpha_j}(s_j)| exp(-|s|^2) ds`,
/// computed by a tensor composite Gauss-Legendre rule split at Hermite roots
/// and truncated where `exp(-s^2)` is negligible.
pub fn grad_heat_l1(n: usize, t: f64, d: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    if d == 0 || d > 3 {
        return Err(Error::Guard {
            what: "dimension d",
            value: d as f64,
            limit: 3.0,
        });
    }
    if n > MAX_ORDER {
        return Err(Error::Guard {
            what: "derivative order n",
            value: n as f64,
            limit: MAX_ORDER as f64,
        });
    }
    crate::work::tick();
    let cut = (2.0 * n as f64 + 1.0).sqrt() + 7.0;
    let width = [0.125, 0.25, 0.5][d - 1];
    let (xs, ws) = panel_rule(n, cut, width);
    // table[a][i] = |H_a(x_i)| exp(-x_i^2)
    let table: Vec<Vec<f64>> = (0..=n)
        .map(|a| {
            xs.iter()
                .map(|x| hermite(a, *x).abs() * (-x * x).exp())
                .collect()
        })
        .collect();
    let alphas = multi_indices(n, d);
    let q = xs.len();
    let integral = match d {
        1 => (0..q).map(|i| ws[i] * table[n][i]).sum::<f64>(),
        2 => {
            let mut acc = 0.0;
            for i in 0..q {
                for j in 0..q {
                    let v = alphas
                        .iter()
                        .map(|a| table[a[0]][i] * table[a[1]][j])
                        .fold(0.0, f64::max);
                    acc += ws[i] * ws[j] * v;
                }
            }
            acc
        }
        _ => {
            let mut acc = 0.0;
            for i in 0..q {
                for j in 0..q {
                    let wij = ws[i] * ws[j];
                    for l in 0..q {
                        let v = alphas
                            .iter()
                            .map(|a| table[a[0]][i] * table[a[1]][j] * table[a[2]][l])
                            .fold(0.0, f64::max);
                        acc += wij * ws[l] * v;
                    }
                }
            }
            acc
        }
    };
    Ok(PI.powf(-(d as f64) / 2.0) * (2.0 * t.sqrt()).powi(-(n as i32)) * integral)
}

/// Smallest `C` with `value_n <= (C (1 + n) / t)^{n/2}` for every supplied `(n, value_n)`.
pub fn fit_hermite_constant(t: f64, values: &[(usize, f64)]) -> f64 {
    values
        .iter()
        .filter(|(n, _)| *n > 0)
        .map(|(n, v)| t * v.powf(2.0 / *n as f64) / (1.0 + *n as f64))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.3), 1.0);
        assert!((hermite(2, 0.7) - (4.0 * 0.49 - 2.0)).abs() < 1e-14);
        for n in 0..=10 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (hermite(n, -1.3) - s * hermite(n, 1.3)).abs()
                    < 1e-9 * hermite(n, 1.3).abs().max(1.0)
            );
        }
    }

    #[test]
    fn roots_vanish() {
        for n in 1..=8 {
            let roots = hermite_roots(n);
            assert_eq!(roots.len(), n);
            for r in roots {
                assert!(
                    hermite(n, r).abs() < 1e-9 * 2f64.powi(n as i32),
                    "n={n} r={r}"
                );
            }
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_normalization() {
        assert!((heat_kernel(&[0.0], 1.0 / (4.0 * PI)).unwrap() - 1.0).abs() < 1e-15);
        assert!(heat_kernel(&[0.0], 0.0).is_err());
    }
}
