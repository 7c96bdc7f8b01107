use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::corrector::{solve_corrector, CorrectorConfig, Operator, PeriodicGrid};
use crate::error::{invalid, Result};
use crate::field::lattice::{capped_resolution, torus_lattice};
use crate::field::CoefficientField;

/// Homogenized matrix estimated from approximate correctors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMatrix {
    /// Row-major `d x d`.
    pub abar: Vec<f64>,
    pub d: usize,
    /// Relative solver residual per direction.
    pub residuals: Vec<f64>,
    pub eps: f64,
    pub h: f64,
    pub side: f64,
    pub window: f64,
}

impl EffectiveMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.abar[i * self.d + j]
    }

    /// Eigenvalue range of the symmetric part.
    pub fn symmetric_range(&self) -> (f64, f64) {
        let m = DMatrix::from_row_slice(self.d, self.d, &self.abar);
        let eig = ((&m + m.transpose()) * 0.5).symmetric_eigenvalues();
        (
            eig.iter().copied().fold(f64::INFINITY, f64::min),
            eig.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

/// Column `j` is the window mean of the discrete flux `a (e_j + grad phi_j)`.
pub fn effective_matrix(
    field: &CoefficientField,
    eps: f64,
    grid: &PeriodicGrid,
    cfg: &CorrectorConfig,
) -> Result<EffectiveMatrix> {
    let d = field.dim();
    let op = Operator::new(field, grid, eps)?;
    let nodes = grid.central_window(cfg.window);
    let mut abar = vec![0.0; d * d];
    let mut residuals = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let r = solve_corrector(field, &e, eps, grid, cfg)?;
        let col = op.flux_means(&r.phi().values, &e, &nodes);
        for i in 0..d {
            abar[i * d + j] = col[i];
        }
        residuals.push(r.residual);
    }
    Ok(EffectiveMatrix {
        abar,
        d,
        residuals,
        eps,
        h: grid.h(),
        side: grid.side(),
        window: cfg.window * grid.side() / 2.0,
    })
}

fn torus_mean(field: &CoefficientField, res: usize, g: impl Fn(f64) -> f64) -> f64 {
    let m = field.winding().torus_dim();
    let res = capped_resolution(m, res, 1 << 22);
    let pts = torus_lattice(m, res);
    pts.iter().map(|a| g(field.eval_lifted(a)[0])).sum::<f64>() / pts.len() as f64
}

/// `<1/a>^{-1}` for a scalar field in `d = 1`, by the trapezoid rule on the torus
/// (spectrally accurate for trigonometric coefficients).
pub fn harmonic_mean(field: &CoefficientField, res: usize) -> Result<f64> {
    if field.dim() != 1 {
        return Err(invalid("harmonic mean needs d = 1"));
    }
    Ok(1.0 / torus_mean(field, res, |a| 1.0 / a))
}

/// `<a>` for a scalar field in `d = 1`.
pub fn arithmetic_mean(field: &CoefficientField, res: usize) -> Result<f64> {
    if field.dim() != 1 {
        return Err(invalid("arithmetic mean needs d = 1"));
    }
    Ok(torus_mean(field, res, |a| a))
}
