use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::SupSampler;
use crate::heat::spectral::FrequencyField;

/// Time quadrature for the multiscale Poincaré functional: composite Simpson in
/// `ln t` on `[t_min, t_max]`, plus closed-form bounds for both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeQuadrature {
    pub t_min: f64,
    pub t_max: f64,
    /// Number of Simpson intervals (even).
    pub intervals: usize,
    pub sup: SupSampler,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self {
            t_min: 1e-4,
            t_max: 1e3,
            intervals: 200,
            sup: SupSampler::default(),
        }
    }
}

/// Pieces of `2 int_0^inf sup_y |int grad u . grad Phi(y - ., t)| dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    /// The whole right-hand side.
    pub rhs: f64,
    /// `int_{t_min}^{t_max}` of the sup, by quadrature.
    pub body: f64,
    /// `t_min sum_j 4 pi^2 |xi_j|^2 r_j`, bounding the integral over `[0, t_min]`.
    pub head: f64,
    /// `sum_j r_j exp(-4 pi^2 |xi_j|^2 t_max)`, bounding the integral over `[t_max, inf)`.
    pub tail: f64,
    pub osc: f64,
}

/// `sup_y |int grad u(x) . grad Phi(y - x, t) dx|`: the convolution is
/// `Delta e^{t Delta} u`, so each mode picks up `-4 pi^2 |xi|^2 exp(-4 pi^2 |xi|^2 t)`.
pub fn smoothed_gradient_sup(u: &FrequencyField, t: f64, sup: &SupSampler) -> f64 {
    let four_pi2 = 4.0 * PI * PI;
    u.map_modes(|xi2| four_pi2 * xi2 * (-four_pi2 * xi2 * t).exp())
        .extrema(sup)
        .sup_abs()
}

/// Evaluates the multiscale Poincaré right-hand side together with `osc u`.
pub fn multiscale_poincare_rhs(u: &FrequencyField, q: &TimeQuadrature) -> Result<PoincareReport> {
    if !(q.t_min > 0.0 && q.t_max > q.t_min) || q.intervals < 2 || !q.intervals.is_multiple_of(2) {
        return Err(invalid(
            "time quadrature needs 0 < t_min < t_max and an even number of intervals",
        ));
    }
    crate::work::tick();
    let four_pi2 = 4.0 * PI * PI;
    let (a, b) = (q.t_min.ln(), q.t_max.ln());
    let h = (b - a) / q.intervals as f64;
    let mut body = 0.0;
    for i in 0..=q.intervals {
        let s = a + i as f64 * h;
        let t = s.exp();
        let w = if i == 0 || i == q.intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        body += w * smoothed_gradient_sup(u, t, &q.sup) * t;
    }
    body *= h / 3.0;
    let modes = u.modes();
    let head = q.t_min
        * modes
            .iter()
            .map(|m| four_pi2 * m.xi.iter().map(|v| v * v).sum::<f64>() * m.c.hypot(m.s))
            .sum::<f64>();
    let tail = modes
        .iter()
        .map(|m| {
            m.c.hypot(m.s) * (-four_pi2 * m.xi.iter().map(|v| v * v).sum::<f64>() * q.t_max).exp()
        })
        .sum::<f64>();
    let osc = u.extrema(&q.sup).osc();
    Ok(PoincareReport {
        rhs: 2.0 * (head + body + tail),
        body,
        head,
        tail,
        osc,
    })
}
