use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Paths shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Paths {
    /// Field description (TOML).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Knob file (TOML); flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Numeric knobs of the experiments. Every knob is optional; commands fill in
/// their own defaults and ignore knobs they do not use.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Regularization scales (comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Radii (comma separated).
    #[arg(long = "R", value_delimiter = ',')]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Difference order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Constant `C` in `rho_*`.
    #[arg(long = "C")]
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Times (comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    /// Unit direction `e` (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    /// Relative residual tolerance of the linear solver.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Lower bound on `eps L` for the periodic box.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_l: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    /// Central fraction of the box used for measurements.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[arg(long, value_parser = ["jacobi", "multigrid"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preconditioner: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    /// Torus points per dimension for outer suprema.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_y: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_y_nested: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_z_points: Option<usize>,
    /// Lattice points per torus dimension of the sup sampler.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_resolution: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<i64>,
    /// Fit window on the plotted abscissa.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_max: Option<f64>,
    /// Random translation pairs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest derivative order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Physical dimension (hermite).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    /// Accept ergodic times below `k`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_short_times: Option<bool>,
    /// Dump corrector grids next to the report.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub write_field: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_nodes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrector_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Exponent of the two-scale `W^{1,p}` error.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_scale: Option<bool>,
    /// Boundary data `g(x) = g_c + g_b.x + x^t g_a x`.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_c: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_b: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_a: Option<Vec<f64>>,
}

macro_rules! prefer {
    ($a:ident, $b:ident; $($f:ident),*) => {
        Knobs { $($f: $a.$f.or($b.$f)),* }
    };
}

impl Knobs {
    /// Knobs of `self`, falling back to `file` where unset.
    pub fn or(self, file: Knobs) -> Knobs {
        prefer!(self, file; eps, r, k, c, k_max, t, e, tol, eps_l, h_max, window, preconditioner,
            sweeps, max_iters, n_y, n_y_nested, max_z_points, sup_resolution, theta, z_max,
            fit_min, fit_max, pairs, seed, n_max, d, t_min, t_max, intervals, allow_short_times,
            write_field, nodes_per_eps, min_nodes, corrector_eps, margin, p, two_scale, g_c, g_b, g_a)
    }

    pub fn load(path: &Path) -> Result<Knobs> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// The fit window, checked.
    pub fn fit_window(&self) -> Result<Option<(f64, f64)>> {
        match (self.fit_min, self.fit_max) {
            (None, None) => Ok(None),
            (lo, hi) => {
                let (lo, hi) = (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY));
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(invalid(format!("fit window [{lo}, {hi}] is empty")));
                }
                Ok(Some((lo, hi)))
            }
        }
    }
}

/// Checks that every value is finite and inside `(lo, hi]`.
pub fn check_list(name: &str, v: &[f64], lo: f64, hi: f64) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(format!("{name} list is empty")));
    }
    if let Some(x) = v.iter().find(|x| !(**x > lo && **x <= hi)) {
        return Err(invalid(format!("{name} = {x} outside ({lo}, {hi}]")));
    }
    Ok(())
}

pub fn check_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    check_list(name, &[v], lo, hi)
}
