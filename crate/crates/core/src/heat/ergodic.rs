use serde::{Deserialize, Serialize};

use crate::diffcalc::{ball_l1_sup, omega_k, ModulusConfig};
use crate::error::{invalid, Error, Result};
use crate::field::SupSampler;
use crate::heat::spectral::{heat_evolve, FrequencyField};

/// Knobs for [`ergodic_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicConfig {
    pub modulus: ModulusConfig,
    pub sup: SupSampler,
    /// Candidate values of the decay constant `c`; the one needing the smallest `C` wins
    /// (ties go to the earlier entry).
    pub c_grid: Vec<f64>,
    /// Accept times `t < k`. The bound is only meaningful for `t >= k`, so
    /// these rows are a stress test of the fitted constant.
    #[serde(default)]
    pub allow_short_times: bool,
}

impl Default for ErgodicConfig {
    fn default() -> Self {
        Self {
            modulus: ModulusConfig {
                n_y_nested: 6,
                n_shift: 8,
                ..ModulusConfig::default()
            },
            sup: SupSampler::default(),
            c_grid: vec![1.0, 0.5, 0.25, 0.1, 0.05, 0.01],
            allow_short_times: false,
        }
    }
}

/// One time of the ergodic check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicRow {
    pub t: f64,
    pub lhs_osc: f64,
    /// `C^k min_R (omega_k(R) + exp(-c t / (k R^2)) L1)` at the fitted `(C, c)`.
    pub rhs_min: f64,
    pub argmin_r: f64,
    pub lhs_grad: f64,
    pub rhs_grad_min: f64,
    pub argmin_r_grad: f64,
}

/// Outcome of the ergodic check: measured sides at every `t` and the smallest
/// constants making the bounds hold at all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicReport {
    pub k: usize,
    pub rows: Vec<ErgodicRow>,
    pub omega: Vec<(f64, f64)>,
    /// `sup_{z'} ||f||_{L^1(B_1(z'))}`.
    pub l1_sup: f64,
    pub fitted_big_c: f64,
    pub fitted_small_c: f64,
    pub grad_big_c: f64,
    pub grad_small_c: f64,
}

impl ErgodicReport {
    pub const CSV_HEADER: &'static str = "t,lhs_osc,rhs_min,argmin_R,fitted_C,fitted_c";

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{:.12e},{:.12e},{},{:.6e},{}",
                    r.t, r.lhs_osc, r.rhs_min, r.argmin_r, self.fitted_big_c, self.fitted_small_c
                )
            })
            .collect()
    }

    /// True when every row satisfies both bounds with the fitted constants.
    pub fn holds(&self) -> bool {
        self.fitted_big_c.is_finite()
            && self.grad_big_c.is_finite()
            && self.rows.iter().all(|r| {
                r.lhs_osc <= r.rhs_min * (1.0 + 1e-12)
                    && r.lhs_grad <= r.rhs_grad_min * (1.0 + 1e-12)
            })
    }
}

/// `min_R (scale(t) omega_k(R) + exp(-c t / (k R^2)) l1)` with its argmin.
fn envelope(omega: &[(f64, f64)], l1: f64, k: usize, t: f64, c: f64, scale: f64) -> (f64, f64) {
    omega
        .iter()
        .map(|(r, w)| (scale * w + (-c * t / (k as f64 * r * r)).exp() * l1, *r))
        .fold(
            (f64::INFINITY, f64::NAN),
            |a, b| if b.0 < a.0 { b } else { a },
        )
}

/// Smallest `C >= 1` with `lhs <= C^k env` for all entries.
fn minimal_c(lhs: &[f64], env: &[f64], k: usize) -> f64 {
    lhs.iter()
        .zip(env)
        .map(|(l, e)| {
            if *l <= 0.0 {
                1.0
            } else if *e <= 0.0 {
                f64::INFINITY
            } else {
                (l / e).powf(1.0 / k as f64)
            }
        })
        .fold(1.0, f64::max)
}

/// `(C, c, per-t envelope and argmin)`.
type Fitted = (f64, f64, Vec<(f64, f64)>);

/// Fits `(C, c)` so that `lhs(t) <= C^k min_R (scale(t) omega_k(R) + exp(-c t/(k R^2)) L1)`
/// at every `t`. Returns `(C, c, per-t envelope and argmin)`.
fn fit(
    lhs: &[f64],
    ts: &[f64],
    omega: &[(f64, f64)],
    l1: f64,
    k: usize,
    grid: &[f64],
    scale: impl Fn(f64) -> f64,
) -> Fitted {
    let mut best: Option<Fitted> = None;
    for &c in grid {
        let envs: Vec<(f64, f64)> = ts
            .iter()
            .map(|t| envelope(omega, l1, k, *t, c, scale(*t)))
            .collect();
        let big = minimal_c(lhs, &envs.iter().map(|e| e.0).collect::<Vec<_>>(), k);
        if best.as_ref().is_none_or(|b| big < b.0) {
            best = Some((big, c, envs));
        }
    }
    best.expect("nonempty grid")
}

/// Measures `osc e^{t Delta} f` and `sup |grad e^{t Delta} f|` against the
/// ergodic-theorem envelopes built from `omega_k(f, R)` over `r_list`, and fits
/// the constants.
pub fn ergodic_bound_check(
    f: &FrequencyField,
    t_list: &[f64],
    k: usize,
    r_list: &[f64],
    cfg: &ErgodicConfig,
) -> Result<ErgodicReport> {
    if t_list.is_empty() || r_list.is_empty() || cfg.c_grid.is_empty() {
        return Err(invalid("ergodic check needs times, radii and a c grid"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if let Some(t) = t_list.iter().find(|t| !(**t > 0.0 && (cfg.allow_short_times || **t >= k as f64))) {
        return Err(Error::Guard {
            what: "time below k",
            value: *t,
            limit: k as f64,
        });
    }
    if cfg.c_grid.iter().any(|c| !(*c > 0.0)) {
        return Err(invalid("c grid must be positive"));
    }
    crate::work::tick();
    let q = f.to_quasi();
    let omega = r_list
        .iter()
        .map(|r| omega_k(&q, *r, k, &cfg.modulus).map(|e| (*r, e.value)))
        .collect::<Result<Vec<_>>>()?;
    let l1 = ball_l1_sup(&q, &cfg.modulus);
    let mut lhs = Vec::new();
    let mut lhs_grad = Vec::new();
    for &t in t_list {
        let u = heat_evolve(f, t)?;
        lhs.push(u.centered().extrema(&cfg.sup).osc());
        lhs_grad.push(u.grad_sup(&cfg.sup));
    }
    let (big, small, envs) = fit(&lhs, t_list, &omega, l1, k, &cfg.c_grid, |_| 1.0);
    let (gbig, gsmall, genvs) = fit(&lhs_grad, t_list, &omega, l1, k, &cfg.c_grid, |t| {
        t.powf(-0.5)
    });
    let ck = big.powi(k as i32);
    let gck = gbig.powi(k as i32);
    let rows = t_list
        .iter()
        .enumerate()
        .map(|(i, &t)| ErgodicRow {
            t,
            lhs_osc: lhs[i],
            rhs_min: ck * envs[i].0,
            argmin_r: envs[i].1,
            lhs_grad: lhs_grad[i],
            rhs_grad_min: gck * genvs[i].0,
            argmin_r_grad: genvs[i].1,
        })
        .collect();
    Ok(ErgodicReport {
        k,
        rows,
        omega,
        l1_sup: l1,
        fitted_big_c: big,
        fitted_small_c: small,
        grad_big_c: gbig,
        grad_small_c: gsmall,
    })
}
