use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Both axes logarithmic; the fit is `ln y` against `ln x`.
    LogLog,
    /// Logarithmic `y` only; the fit is `ln y` against `x`.
    SemiLogY,
}

/// A named point series with an optional fit window on `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
    pub points: Vec<(f64, f64)>,
    /// Closed `x` interval of the points entering the fit; all points when absent.
    pub fit_window: Option<(f64, f64)>,
}

impl Series {
    /// Points that can be drawn on the plot's axes.
    fn drawable(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .filter(|(x, y)| {
                x.is_finite() && y.is_finite() && *y > 0.0 && (self.kind == PlotKind::SemiLogY || *x > 0.0)
            })
            .collect()
    }

    fn tx(&self, x: f64) -> f64 {
        match self.kind {
            PlotKind::LogLog => x.ln(),
            PlotKind::SemiLogY => x,
        }
    }

    /// The least-squares line through the drawable points inside the fit window,
    /// in the plot's transformed coordinates.
    pub fn fit(&self) -> Option<LineFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .drawable()
            .into_iter()
            .filter(|(x, _)| self.fit_window.is_none_or(|(lo, hi)| *x >= lo && *x <= hi))
            .map(|(x, y)| (self.tx(x), y.ln()))
            .unzip();
        fit_line(&xs, &ys)
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG 1.1 line plot of a series with its fitted slope. Identical input gives
/// identical bytes.
pub fn render_plot(series: &Series) -> Result<String> {
    let pts = series.drawable();
    if pts.is_empty() {
        return Err(Error::EmptyReport);
    }
    let tp: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (series.tx(*x), y.ln())).collect();
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = span(&mut tp.iter().map(|p| p.0));
    let (y0, y1) = span(&mut tp.iter().map(|p| p.1));
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(&series.title)
    );
    // axis ends, in data units
    let ux = |t: f64| match series.kind {
        PlotKind::LogLog => t.exp(),
        PlotKind::SemiLogY => t,
    };
    let base = H - BOTTOM;
    for (t, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{:.3e}</text>"#,
            px(t),
            base + 16.0,
            ux(t)
        );
    }
    for t in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3e}</text>"#,
            LEFT - 6.0,
            py(t) + 4.0,
            t.exp()
        );
    }
    let x_axis = match series.kind {
        PlotKind::LogLog => format!("{} (log)", series.x_label),
        PlotKind::SemiLogY => series.x_label.clone(),
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 14.0,
        escape(&x_axis)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{} (log)</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        escape(&series.y_label)
    );
    let path: Vec<String> = tp.iter().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9a" stroke-width="1.5"/>"##, path.join(" "));
    for (x, y) in &tp {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f4e9a"/>"##, px(*x), py(*y));
    }
    if let Some(fit) = series.fit() {
        let (a, b) = match series.fit_window {
            Some((lo, hi)) => {
                let inside: Vec<f64> = tp
                    .iter()
                    .zip(&pts)
                    .filter(|(_, (x, _))| *x >= lo && *x <= hi)
                    .map(|(t, _)| t.0)
                    .collect();
                (inside.iter().copied().fold(f64::INFINITY, f64::min), inside.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            }
            None => (tp.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), tp.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)),
        };
        let line = |x: f64| fit.intercept + fit.slope * x;
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#b03030" stroke-width="1" stroke-dasharray="6 4"/>"##,
            px(a),
            py(line(a)),
            px(b),
            py(line(b))
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" fill="#b03030">slope = {:.4} ({} points)</text>"##,
            LEFT + 10.0,
            TOP + 18.0,
            fit.slope,
            fit.points
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Renders `series` and writes it to `path` atomically.
pub fn emit_plot(series: &Series, path: &Path) -> Result<()> {
    let svg = render_plot(series)?;
    write_atomic(path, svg.as_bytes())
}
