//! Least-squares fits used by the sweep reports.

use serde::{Deserialize, Serialize};

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares on `(x, y)` pairs. Needs two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        points: n,
    })
}

/// Log-log slope of `ys` against `xs`. Non-positive values are skipped; returns
/// `None` when fewer than two usable points remain (a degenerate fit).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    fit_line(&lx, &ly)
}

/// Geometric decay factor per step of a positive sequence, `exp(slope)` of
/// `ln(values[i])` against `i`.
pub fn geometric_rate(values: &[f64]) -> Option<f64> {
    let xs: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(x, v)| (*x, v.ln()))
        .unzip();
    fit_line(&lx, &ly).map(|f| f.slope.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
        let fit = loglog_slope(&xs, &ys).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_point_is_degenerate() {
        assert!(loglog_slope(&[1.0], &[2.0]).is_none());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 0.0]).is_none());
    }

    #[test]
    fn geometric_rate_of_halving() {
        let r = geometric_rate(&[1.0, 0.5, 0.25, 0.125]).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }
}
