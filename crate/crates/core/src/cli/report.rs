use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cli::plot::{emit_plot, PlotKind, Series};
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Output of one subcommand: CSV rows, an optional plotted series and a JSON summary.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub header: String,
    pub rows: Vec<String>,
    pub series: Option<Series>,
    pub summary: serde_json::Value,
    /// Property violations; a nonempty list makes the run exit with code 4.
    pub flags: Vec<String>,
}

impl Report {
    pub fn new(command: &str, header: &str) -> Self {
        Self {
            command: command.to_string(),
            header: header.to_string(),
            rows: vec![],
            series: None,
            summary: serde_json::Value::Null,
            flags: vec![],
        }
    }

    pub fn summary(mut self, v: &impl Serialize) -> Result<Self> {
        self.summary = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(self)
    }

    pub fn flag_if(&mut self, cond: bool, what: impl Into<String>) {
        if cond {
            self.flags.push(what.into());
        }
    }
}

/// What a report was computed from, echoed as the first CSV line.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub spec_sha256: Option<String>,
    pub knobs: String,
}

impl Provenance {
    pub fn new(spec_bytes: Option<&[u8]>, knobs: &impl Serialize) -> Result<Self> {
        Ok(Self {
            spec_sha256: spec_bytes.map(|b| {
                Sha256::digest(b)
                    .iter()
                    .fold(String::with_capacity(64), |mut s, byte| {
                        let _ = write!(s, "{byte:02x}");
                        s
                    })
            }),
            knobs: serde_json::to_string(knobs).map_err(|e| Error::Parse(e.to_string()))?,
        })
    }

    pub fn line(&self, command: &str) -> String {
        format!(
            "# provenance: command={command} spec_sha256={} knobs={}",
            self.spec_sha256.as_deref().unwrap_or("none"),
            self.knobs
        )
    }
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), fmt_f)
}

/// The CSV text: provenance, header, rows and a trailing fit comment when the
/// report carries a series.
pub fn render_csv(report: &Report, prov: &Provenance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", prov.line(&report.command));
    let _ = writeln!(s, "{}", report.header);
    for r in &report.rows {
        let _ = writeln!(s, "{r}");
    }
    if let Some(series) = &report.series {
        let window = series
            .fit_window
            .map_or_else(|| "all".to_string(), |(lo, hi)| format!("[{lo},{hi}]"));
        match series.fit() {
            Some(f) => {
                let x = match series.kind {
                    PlotKind::LogLog => format!("ln({})", series.x_label),
                    PlotKind::SemiLogY => series.x_label.clone(),
                };
                let _ = writeln!(
                    s,
                    "# fit: ln({}) vs {x}: slope={} intercept={} points={} window={window}",
                    series.y_label,
                    fmt_f(f.slope),
                    fmt_f(f.intercept),
                    f.points
                );
            }
            None => {
                let _ = writeln!(s, "# fit: none (fewer than two usable points) window={window}");
            }
        }
    }
    s
}

/// Writes `<command>.csv`, `<command>.json` and, when the series has a drawable
/// point, `<command>.svg` under `dir`.
pub fn write_report(report: &Report, prov: &Provenance, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = vec![];
    let csv = dir.join(format!("{}.csv", report.command));
    write_atomic(&csv, render_csv(report, prov).as_bytes())?;
    written.push(csv);
    let json = dir.join(format!("{}.json", report.command));
    let body = serde_json::json!({
        "command": report.command,
        "spec_sha256": prov.spec_sha256,
        "flags": report.flags,
        "summary": report.summary,
    });
    let mut text = serde_json::to_string_pretty(&body).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    write_atomic(&json, text.as_bytes())?;
    written.push(json);
    if let Some(series) = &report.series {
        let svg = dir.join(format!("{}.svg", report.command));
        match emit_plot(series, &svg) {
            Ok(()) => written.push(svg),
            // nothing drawable on log axes (e.g. an all-zero modulus)
            Err(Error::EmptyReport) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(written)
}
