use serde::{Deserialize, Serialize};

use crate::corrector::{
    solve_corrector, solve_linear, CorrectorConfig, GridField, Operator, PeriodicGrid,
    PreconditionerKind, SolverConfig,
};
use crate::error::{invalid, Error, Result};
use crate::field::CoefficientField;
use crate::fit::{loglog_slope, LineFit};
use crate::heat::gauss_legendre;
use crate::homog::effective::effective_matrix;

/// Boundary data `g(x) = c + b.x + x^t A x` (degree at most two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryData {
    pub c: f64,
    pub b: Vec<f64>,
    /// Row-major `d x d`; empty means zero.
    #[serde(default)]
    pub a: Vec<f64>,
}

impl BoundaryData {
    pub fn linear(c: f64, b: Vec<f64>) -> Self {
        Self { c, b, a: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.b.len() != d || !(self.a.is_empty() || self.a.len() == d * d) {
            return Err(invalid(format!("boundary data does not match d = {d}")));
        }
        if !self.c.is_finite() || self.b.iter().chain(&self.a).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite boundary data"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.b.len();
        let mut v = self.c + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>();
        if !self.a.is_empty() {
            for i in 0..d {
                for j in 0..d {
                    v += x[i] * self.a[i * d + j] * x[j];
                }
            }
        }
        v
    }
}

/// Discrete solution of `-div(a grad u) = 0` in `(0, 1)^d`, `u = g` on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution {
    /// Values on the host grid of side 2; nodes outside the closed unit box hold `g`.
    pub u: GridField,
    pub residual: f64,
    pub iterations: usize,
    /// Nodes of the closed unit box.
    pub closure: Vec<usize>,
}

/// Host grid `[0, 2)^d` with `n_unit` intervals per unit length.
fn host_grid(d: usize, n_unit: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::with_origin(d, 2.0, 2 * n_unit, 0.0)
}

/// Solves the Dirichlet problem with the corrector discretization: every node
/// outside the open unit box is pinned to `g`.
pub fn solve_dirichlet(
    field: &CoefficientField,
    g: &BoundaryData,
    n_unit: usize,
    solver: &SolverConfig,
) -> Result<DirichletSolution> {
    let d = field.dim();
    g.validate(d)?;
    let grid = host_grid(d, n_unit)?;
    let h = grid.h();
    let tol = 1e-9 * h;
    let inside = |x: &[f64]| x.iter().all(|c| *c > tol && *c < 1.0 - tol);
    let in_closure = |x: &[f64]| x.iter().all(|c| *c >= -tol && *c <= 1.0 + tol);
    let mut pins = vec![false; grid.len()];
    let mut closure = Vec::new();
    let mut gb = vec![0.0; grid.len()];
    for (i, p) in pins.iter_mut().enumerate() {
        let x = grid.point(i);
        *p = !inside(&x);
        if *p {
            gb[i] = g.eval(&x);
        }
        if in_closure(&x) {
            closure.push(i);
        }
    }
    let op = Operator::assemble(field, &grid, 0.0, Some(pins.clone()))?;
    let mut b = vec![0.0; grid.len()];
    op.div_flux(Some(&gb), None, &mut b);
    for (bi, p) in b.iter_mut().zip(&pins) {
        *bi = if *p { 0.0 } else { -*bi };
    }
    let (v, report) = solve_linear(&op, &b, solver)?;
    let values = v.iter().zip(&gb).map(|(v, g)| v + g).collect();
    Ok(DirichletSolution {
        u: GridField::scalar(&grid, values)?,
        residual: report.residual,
        iterations: report.iterations,
        closure,
    })
}

/// `u^eps` at `x_p = p / n_unit`, `p = 0..=n_unit`, for `d = 1` with boundary
/// values `g(0)`, `g(1)`: `u^eps(x) = g(0) + (g(1) - g(0)) I(x) / I(1)` with
/// `I(x) = int_0^x ds / a(s / eps)` (8-point Gauss-Legendre per cell).
pub fn closed_form_1d(
    field: &CoefficientField,
    g: &BoundaryData,
    eps: f64,
    n_unit: usize,
) -> Result<Vec<f64>> {
    if field.dim() != 1 {
        return Err(invalid("closed form needs d = 1"));
    }
    let (xs, ws) = gauss_legendre(8);
    let h = 1.0 / n_unit as f64;
    let mut cum = vec![0.0; n_unit + 1];
    for p in 0..n_unit {
        let a = p as f64 * h;
        let cell: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| {
                let s = a + 0.5 * h * (x + 1.0);
                w * 0.5 * h / field.entry(0, 0, &[s / eps])
            })
            .sum();
        cum[p + 1] = cum[p] + cell;
    }
    let (g0, g1) = (g.eval(&[0.0]), g.eval(&[1.0]));
    Ok(cum
        .iter()
        .map(|c| g0 + (g1 - g0) * c / cum[n_unit])
        .collect())
}

/// `W^{1,p}(V)` norm of `u^eps - u - eps grad u . Phi(x / eps)` on
/// `V = [margin, 1 - margin]^d`, by nodal quadrature with forward differences.
/// `p = inf` gives the Lipschitz norm.
pub fn two_scale_error(
    u_eps: &GridField,
    u_hom: &GridField,
    eps: f64,
    phi: &[GridField],
    margin: f64,
    p: f64,
) -> Result<f64> {
    let g = &u_eps.grid;
    let d = g.dim();
    if !(0.1..0.5).contains(&margin) {
        return Err(Error::Guard {
            what: "interior margin",
            value: margin,
            limit: 0.1,
        });
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("exponent p must be >= 1, got {p}")));
    }
    if u_hom.grid != *g || phi.len() != d {
        return Err(invalid("two-scale inputs do not match"));
    }
    let h = g.h();
    for (j, f) in phi.iter().enumerate() {
        if f.grid.dim() != d {
            return Err(invalid(format!("corrector {j} has the wrong dimension")));
        }
        let reach = f.grid.side() / 4.0;
        if (1.0 / eps - f.grid.center())
            .abs()
            .max((0.0 - f.grid.center()).abs())
            > reach
        {
            return Err(invalid(format!(
                "corrector grid does not cover x / eps for eps = {eps}"
            )));
        }
    }
    let uh = u_hom.component(0);
    let ue = u_eps.component(0);
    let w = |i: usize| -> f64 {
        let x = g.point(i);
        let y: Vec<f64> = x.iter().map(|c| c / eps).collect();
        let mut corr = 0.0;
        for j in 0..d {
            let du = (uh[g.next(i, j)] - uh[g.prev(i, j)]) / (2.0 * h);
            corr += du * phi[j].interpolate(0, &y);
        }
        ue[i] - uh[i] - eps * corr
    };
    let tol = 1e-9 * h;
    let nodes: Vec<usize> = (0..g.len())
        .filter(|&i| {
            g.point(i)
                .iter()
                .all(|c| *c >= margin - tol && *c <= 1.0 - margin + tol)
        })
        .collect();
    let vol = h.powi(d as i32);
    let (mut l, mut dl) = (0.0f64, 0.0f64);
    for &i in &nodes {
        let wi = w(i);
        let grad = (0..d)
            .map(|a| ((w(g.next(i, a)) - wi) / h).powi(2))
            .sum::<f64>()
            .sqrt();
        if p.is_infinite() {
            l = l.max(wi.abs());
            dl = dl.max(grad);
        } else {
            l += vol * wi.abs().powf(p);
            dl += vol * grad.powf(p);
        }
    }
    Ok(if p.is_infinite() {
        l + dl
    } else {
        l.powf(1.0 / p) + dl.powf(1.0 / p)
    })
}

/// Settings for [`dirichlet_rate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConfig {
    /// Grid intervals per `eps`; below 8 the rows are flagged under-resolved.
    pub nodes_per_eps: f64,
    pub min_nodes: usize,
    pub solver: SolverConfig,
    /// Effective matrix to use; estimated from correctors when absent.
    pub abar: Option<Vec<f64>>,
    pub corrector: CorrectorConfig,
    pub corrector_eps: f64,
    /// Compute the two-scale error (needs a corrector box covering `x / eps`; `d = 1` only).
    pub two_scale: bool,
    pub margin: f64,
    pub p: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            nodes_per_eps: 16.0,
            min_nodes: 64,
            solver: SolverConfig {
                preconditioner: PreconditionerKind::Jacobi,
                ..SolverConfig::default()
            },
            abar: None,
            corrector: CorrectorConfig::default(),
            corrector_eps: 1.0 / 64.0,
            two_scale: true,
            margin: 0.1,
            p: 2.0,
        }
    }
}

/// One `eps` of the rate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub eps: f64,
    pub h: f64,
    /// `max |u^eps - u|` over the nodes of the closed box.
    pub err_linf: f64,
    pub err_w1p: Option<f64>,
    pub slope_so_far: Option<f64>,
    /// `d = 1`: the same error between the closed-form solutions.
    pub err_closed: Option<f64>,
    /// `d = 1`: `max |u^eps_h - u^eps|`, the discretization error.
    pub discretization: Option<f64>,
    pub under_resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    pub slope: Option<LineFit>,
    pub slope_closed: Option<LineFit>,
    pub slope_w1p: Option<LineFit>,
    /// All errors at rounding level: no slope is fitted.
    pub degenerate: bool,
    pub abar: Vec<f64>,
}

impl RateReport {
    pub const CSV_HEADER: &'static str = "eps,h,err_Linf,err_W1p,slope_so_far";

    pub fn csv_rows(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |v| format!("{v:.12e}"));
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{:.12e},{},{}",
                    r.eps,
                    r.h,
                    r.err_linf,
                    opt(r.err_w1p),
                    opt(r.slope_so_far)
                )
            })
            .collect()
    }
}

/// Solves the oscillating and homogenized Dirichlet problems for each `eps`
/// and fits the log-log slope of the nodal sup error.
pub fn dirichlet_rate(
    field: &CoefficientField,
    g: &BoundaryData,
    eps_list: &[f64],
    cfg: &RateConfig,
) -> Result<RateReport> {
    let d = field.dim();
    if !(1..=2).contains(&d) {
        return Err(invalid(format!(
            "rate experiment supports d = 1, 2, got {d}"
        )));
    }
    g.validate(d)?;
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
        return Err(invalid("eps values must lie in (0, 1]"));
    }
    if !(cfg.nodes_per_eps > 0.0) {
        return Err(invalid("nodes per eps must be positive"));
    }
    let abar = match &cfg.abar {
        Some(a) if a.len() == d * d => a.clone(),
        Some(_) => return Err(invalid("abar has the wrong size")),
        None if field.is_constant() => field.eval(&vec![0.0; d]),
        None => {
            let grid = cfg.corrector.grid(d, cfg.corrector_eps)?;
            effective_matrix(field, cfg.corrector_eps, &grid, &cfg.corrector)?.abar
        }
    };
    let hom = CoefficientField::constant(abar.clone(), d, field.lambda())?;
    let eps_min = eps_list.iter().copied().fold(f64::INFINITY, f64::min);
    let correctors = if cfg.two_scale && d == 1 {
        let mut c = cfg.corrector.clone();
        let need = 4.0 / eps_min;
        c.eps_l = c.eps_l.max(need * cfg.corrector_eps);
        // match the fast-variable mesh of the oscillating solves node for node
        c.h_max = c.h_max.min(1.0 / cfg.nodes_per_eps);
        let grid = c.grid(d, cfg.corrector_eps)?;
        Some(vec![solve_corrector(
            field,
            &[1.0],
            cfg.corrector_eps,
            &grid,
            &c,
        )?
        .phi()
        .clone()])
    } else {
        None
    };
    let mut rows: Vec<RateRow> = Vec::new();
    for &eps in eps_list {
        let n_unit = ((cfg.nodes_per_eps / eps).log2().ceil().exp2() as usize)
            .max(cfg.min_nodes.next_power_of_two());
        let h = 1.0 / n_unit as f64;
        let scaled = field.rescaled(eps)?;
        let ue = solve_dirichlet(&scaled, g, n_unit, &cfg.solver)?;
        let uh = solve_dirichlet(&hom, g, n_unit, &cfg.solver)?;
        let (a, b) = (ue.u.component(0), uh.u.component(0));
        let err_linf = ue
            .closure
            .iter()
            .map(|&i| (a[i] - b[i]).abs())
            .fold(0.0, f64::max);
        let err_w1p = match &correctors {
            Some(phi) => Some(two_scale_error(&ue.u, &uh.u, eps, phi, cfg.margin, cfg.p)?),
            None => None,
        };
        let (err_closed, discretization) = if d == 1 {
            let exact = closed_form_1d(field, g, eps, n_unit)?;
            let hom_exact = closed_form_1d(&hom, g, 1.0, n_unit)?;
            // closure nodes are p = 0..=n_unit in order
            let disc = ue
                .closure
                .iter()
                .enumerate()
                .map(|(p, &i)| (a[i] - exact[p]).abs())
                .fold(0.0, f64::max);
            let err = exact
                .iter()
                .zip(&hom_exact)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            (Some(err), Some(disc))
        } else {
            (None, None)
        };
        rows.push(RateRow {
            eps,
            h,
            err_linf,
            err_w1p,
            slope_so_far: None,
            err_closed,
            discretization,
            under_resolved: h > eps / 8.0 * (1.0 + 1e-12),
        });
        let eps_so_far: Vec<f64> = rows.iter().map(|r| r.eps).collect();
        let errs: Vec<f64> = rows.iter().map(|r| r.err_linf).collect();
        rows.last_mut().unwrap().slope_so_far = loglog_slope(&eps_so_far, &errs).map(|f| f.slope);
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.err_linf).collect();
    let scale = g
        .eval(&vec![1.0; d])
        .abs()
        .max(g.eval(&vec![0.0; d]).abs())
        .max(1.0);
    let degenerate = errs.iter().all(|e| *e <= 1e-10 * scale);
    let fit = |v: Vec<Option<f64>>| -> Option<LineFit> {
        let v: Option<Vec<f64>> = v.into_iter().collect();
        v.and_then(|v| loglog_slope(&eps, &v))
    };
    if degenerate {
        rows.iter_mut().for_each(|r| r.slope_so_far = None);
    }
    Ok(RateReport {
        slope: if degenerate {
            None
        } else {
            loglog_slope(&eps, &errs)
        },
        slope_closed: fit(rows.iter().map(|r| r.err_closed).collect()),
        slope_w1p: if degenerate {
            None
        } else {
            fit(rows.iter().map(|r| r.err_w1p).collect())
        },
        degenerate,
        rows,
        abar,
    })
}
