use serde::{Deserialize, Serialize};

use crate::corrector::grid::{GridField, PeriodicGrid};
use crate::corrector::krylov::{gmres, norm, pcg, Jacobi, KrylovReport, LinearMap, Preconditioner};
use crate::corrector::multigrid::Multigrid;
use crate::corrector::operator::Operator;
use crate::diffcalc::{rho_k, ModulusConfig};
use crate::error::{invalid, Error, Result};
use crate::field::CoefficientField;
use crate::fit::geometric_rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreconditionerKind {
    Jacobi,
    Multigrid,
}

/// Krylov solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative residual target, in `(0, 1e-6]`.
    pub tol: f64,
    /// Defaults to `50 n` for `n` nodes per axis.
    pub max_iters: Option<usize>,
    pub preconditioner: PreconditionerKind,
    /// GMRES restart length.
    pub restart: usize,
    /// Jacobi sweeps before and after each coarse correction.
    pub sweeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: None,
            preconditioner: PreconditionerKind::Multigrid,
            restart: 60,
            sweeps: 2,
        }
    }
}

/// Grid selection and measurement window for corrector solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectorConfig {
    /// Target `eps L`. Larger boxes push the seam of the periodic truncation
    /// further from the measurement window.
    pub eps_l: f64,
    pub h_max: f64,
    /// Fraction of the box side measured (centred).
    pub window: f64,
    pub solver: SolverConfig,
}

impl Default for CorrectorConfig {
    fn default() -> Self {
        Self {
            eps_l: 128.0,
            h_max: 1.0 / 16.0,
            window: 0.5,
            solver: SolverConfig::default(),
        }
    }
}

impl CorrectorConfig {
    pub fn grid(&self, d: usize, eps: f64) -> Result<PeriodicGrid> {
        PeriodicGrid::for_eps(d, eps, self.eps_l, self.h_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(invalid(format!(
                "window fraction must lie in (0, 1], got {}",
                self.window
            )));
        }
        validate_solver(&self.solver)
    }
}

pub(crate) fn validate_solver(cfg: &SolverConfig) -> Result<()> {
    if !(cfg.tol > 0.0 && cfg.tol <= 1e-6) {
        return Err(invalid(format!(
            "solver tolerance must lie in (0, 1e-6], got {}",
            cfg.tol
        )));
    }
    Ok(())
}

struct OpMap<'a>(&'a Operator);

impl LinearMap for OpMap<'_> {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y)
    }
}

/// Solves `op x = b` with the configured Krylov method.
pub(crate) fn solve_linear(
    op: &Operator,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, KrylovReport)> {
    validate_solver(cfg)?;
    let max_iters = cfg.max_iters.unwrap_or(50 * op.grid().nodes_per_axis());
    let precond: Box<dyn Preconditioner> = match cfg.preconditioner {
        PreconditionerKind::Multigrid if op.pinned().is_none() => {
            Box::new(Multigrid::new(op, cfg.sweeps)?)
        }
        _ => Box::new(Jacobi::new(&op.diagonal())),
    };
    let mut x = vec![0.0; op.len()];
    let report = if op.is_symmetric() {
        pcg(&OpMap(op), precond.as_ref(), b, &mut x, cfg.tol, max_iters)?
    } else {
        gmres(
            &OpMap(op),
            precond.as_ref(),
            b,
            &mut x,
            cfg.tol,
            max_iters,
            cfg.restart,
        )?
    };
    Ok((x, report))
}

/// A solved approximate corrector and its measured scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectorResult {
    #[serde(skip)]
    pub phi: Option<GridField>,
    pub eps: f64,
    pub e: Vec<f64>,
    pub residual: f64,
    pub sup_phi: f64,
    pub sup_grad_phi: f64,
    pub mean_phi: f64,
    pub solver_iters: usize,
    pub h: f64,
    pub side: f64,
    pub n: usize,
    /// Half-width of the centred measurement window.
    pub window: f64,
    /// `<A phi, phi> / <b, phi> - 1`.
    pub energy_defect: f64,
}

impl CorrectorResult {
    pub fn phi(&self) -> &GridField {
        self.phi.as_ref().expect("corrector field present")
    }
}

pub(crate) fn unit(e: &[f64], d: usize) -> Result<Vec<f64>> {
    if e.len() != d {
        return Err(invalid(format!(
            "direction has {} components, expected {d}",
            e.len()
        )));
    }
    let n = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "direction must be a unit vector, |e| = {n}"
        )));
    }
    Ok(e.to_vec())
}

fn measure(
    op: &Operator,
    phi: Vec<f64>,
    b: &[f64],
    eps: f64,
    e: Vec<f64>,
    report: &KrylovReport,
    cfg: &CorrectorConfig,
) -> Result<CorrectorResult> {
    let grid = op.grid();
    let half = cfg.window * grid.side() / 2.0;
    let nodes = grid.window(half);
    let mut aphi = vec![0.0; phi.len()];
    op.apply(&phi, &mut aphi);
    let num = crate::corrector::krylov::dot(&aphi, &phi);
    let den = crate::corrector::krylov::dot(b, &phi);
    let energy_defect = if den == 0.0 { 0.0 } else { num / den - 1.0 };
    let phi = GridField::scalar(grid, phi)?;
    Ok(CorrectorResult {
        sup_phi: phi.sup_abs_on(&nodes),
        sup_grad_phi: phi.sup_grad_on(&nodes),
        mean_phi: phi.mean_on(0, &nodes),
        phi: Some(phi),
        eps,
        e,
        residual: report.residual,
        solver_iters: report.iterations,
        h: grid.h(),
        side: grid.side(),
        n: grid.nodes_per_axis(),
        window: half,
        energy_defect,
    })
}

/// Solves `eps^2 phi - div(a (e + grad phi)) = 0` on the periodic grid.
pub fn solve_corrector(
    field: &CoefficientField,
    e: &[f64],
    eps: f64,
    grid: &PeriodicGrid,
    cfg: &CorrectorConfig,
) -> Result<CorrectorResult> {
    cfg.validate()?;
    let e = unit(e, field.dim())?;
    let op = Operator::new(field, grid, eps)?;
    let b = op.rhs(&e);
    let (phi, report) = solve_linear(&op, &b, &cfg.solver)?;
    measure(&op, phi, &b, eps, e, &report, cfg)
}

/// `(eps sup|phi|, sup|grad phi|)` over the measurement window.
pub fn lipschitz_report(r: &CorrectorResult) -> (f64, f64) {
    (r.eps * r.sup_phi, r.sup_grad_phi)
}

/// `psi_eps = phi_eps - phi_{2 eps}` on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiResult {
    #[serde(skip)]
    pub psi: Option<GridField>,
    pub eps: f64,
    /// Sup over the window of the box for `2 eps` (half the side).
    pub sup_psi: f64,
    /// `|A_eps psi - 3 eps^2 phi_{2 eps}| / |D^-.(a e)|`.
    pub equation_residual: f64,
    pub equation_ok: bool,
    pub fine: CorrectorResult,
    pub coarse: CorrectorResult,
}

pub fn psi(
    field: &CoefficientField,
    e: &[f64],
    eps: f64,
    grid: &PeriodicGrid,
    cfg: &CorrectorConfig,
) -> Result<PsiResult> {
    let fine = solve_corrector(field, e, eps, grid, cfg)?;
    let coarse = solve_corrector(field, e, 2.0 * eps, grid, cfg)?;
    let psi = fine.phi().minus(coarse.phi())?;
    let op = Operator::new(field, grid, eps)?;
    let mut r = vec![0.0; grid.len()];
    op.apply(&psi.values, &mut r);
    let three = 3.0 * eps * eps;
    for (ri, p2) in r.iter_mut().zip(&coarse.phi().values) {
        *ri -= three * p2;
    }
    let bnorm = norm(&op.rhs(&fine.e));
    let equation_residual = if bnorm == 0.0 {
        norm(&r)
    } else {
        norm(&r) / bnorm
    };
    let nodes = grid.window(cfg.window * grid.side() / 4.0);
    Ok(PsiResult {
        sup_psi: psi.sup_abs_on(&nodes),
        psi: Some(psi),
        eps,
        equation_residual,
        equation_ok: equation_residual <= 10.0 * cfg.solver.tol,
        fine,
        coarse,
    })
}

/// One line of the dyadic Cauchy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub eps: f64,
    pub sup_psi: f64,
    /// Running sum of `sup |psi|` down to this `eps`.
    pub partial_sum: f64,
    pub equation_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// The solve at the smallest `eps`, the proxy for the limit corrector.
    pub phi_limit: CorrectorResult,
    pub rows: Vec<CauchyRow>,
    /// Fitted per-step factor of `sup |psi|`.
    pub rate: Option<f64>,
    /// Set when some entry exceeds twice its predecessor.
    pub flagged: bool,
}

pub(crate) fn check_dyadic(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(invalid("empty eps list"));
    }
    for e in eps_list {
        let l = -e.log2();
        if !(*e > 0.0 && *e <= 0.5) || (l - l.round()).abs() > 1e-12 {
            return Err(invalid(format!(
                "eps values must be 2^-n with n >= 1, got {e}"
            )));
        }
    }
    if eps_list
        .windows(2)
        .any(|w| (w[0] / w[1] - 2.0).abs() > 1e-12)
    {
        return Err(invalid("eps list must halve at each step"));
    }
    Ok(())
}

/// Runs `psi` down the dyadic list, each pair on the grid of its smaller `eps`.
pub fn corrector_limit(
    field: &CoefficientField,
    e: &[f64],
    eps_list: &[f64],
    cfg: &CorrectorConfig,
) -> Result<LimitReport> {
    check_dyadic(eps_list)?;
    let mut rows = Vec::new();
    let mut sum = 0.0;
    let mut last = None;
    for &eps in eps_list {
        let grid = cfg.grid(field.dim(), eps)?;
        let p = psi(field, e, eps, &grid, cfg)?;
        sum += p.sup_psi;
        rows.push(CauchyRow {
            eps,
            sup_psi: p.sup_psi,
            partial_sum: sum,
            equation_residual: p.equation_residual,
        });
        last = Some(p.fine);
    }
    let values: Vec<f64> = rows.iter().map(|r| r.sup_psi).collect();
    let flagged = values.windows(2).any(|w| w[1] > 2.0 * w[0]);
    Ok(LimitReport {
        phi_limit: last.expect("nonempty list"),
        rate: geometric_rate(&values),
        rows,
        flagged,
    })
}

/// Outcome of the first difference-corrector cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaCheck {
    /// `sup |zeta - Delta phi| / sup |Delta phi|` (absolute when the latter vanishes).
    pub mismatch: f64,
    pub absolute: f64,
    pub sup_zeta: f64,
    pub sup_delta_phi: f64,
}

/// Solves the equation for `zeta_1` with coefficient `T_z a` and compares it with
/// `(phi(. + y) - phi(. + z)) / 2`, both translates computed by their own solves.
pub fn difference_corrector_check(
    field: &CoefficientField,
    y: &[f64],
    z: &[f64],
    e: &[f64],
    eps: f64,
    grid: &PeriodicGrid,
    cfg: &CorrectorConfig,
) -> Result<ZetaCheck> {
    let d = field.dim();
    if y.len() != d || z.len() != d {
        return Err(invalid("translations must have the field dimension"));
    }
    let ay = field.translated(y);
    let az = field.translated(z);
    let uy = solve_corrector(&ay, e, eps, grid, cfg)?;
    let uz = solve_corrector(&az, e, eps, grid, cfg)?;
    let op_y = Operator::new(&ay, grid, eps)?;
    let op_z = Operator::new(&az, grid, eps)?;
    let (mut fy, mut fz) = (vec![0.0; grid.len()], vec![0.0; grid.len()]);
    op_y.div_flux(Some(&uy.phi().values), Some(e), &mut fy);
    op_z.div_flux(Some(&uy.phi().values), Some(e), &mut fz);
    let b: Vec<f64> = fy.iter().zip(&fz).map(|(a, c)| -0.5 * (a - c)).collect();
    let (zeta, _) = solve_linear(&op_z, &b, &cfg.solver)?;
    let zeta = GridField::scalar(grid, zeta)?;
    let delta = GridField::scalar(
        grid,
        uy.phi()
            .values
            .iter()
            .zip(&uz.phi().values)
            .map(|(a, c)| 0.5 * (a - c))
            .collect(),
    )?;
    let nodes = grid.central_window(cfg.window);
    let absolute = zeta.minus(&delta)?.sup_abs_on(&nodes);
    let sup_delta_phi = delta.sup_abs_on(&nodes);
    Ok(ZetaCheck {
        mismatch: if sup_delta_phi > 0.0 {
            absolute / sup_delta_phi
        } else {
            absolute
        },
        absolute,
        sup_zeta: zeta.sup_abs_on(&nodes),
        sup_delta_phi,
    })
}

/// Settings for the grid version of `rho_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rho1Config {
    /// Trusted central fraction of the box.
    pub window: f64,
    /// Translations `y` sampled per axis.
    pub n_y: usize,
    /// Cap on the number of `x` nodes in the inner sup.
    pub max_x: usize,
    pub modulus: ModulusConfig,
}

impl Default for Rho1Config {
    fn default() -> Self {
        Self {
            window: 0.5,
            n_y: 16,
            max_x: 4096,
            modulus: ModulusConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho1Row {
    pub r: f64,
    pub rho_phi: f64,
    /// `rho_1(a, R)` from the lifted field, when a field was supplied.
    pub rho_a: Option<f64>,
}

/// `rho_1` of a grid field over grid-representable translations: `y` and `z`
/// are node offsets, `|z| <= R`, and `x` ranges over the trusted window shrunk
/// by the largest shift.
pub fn corrector_rho1(
    phi: &GridField,
    field: Option<&CoefficientField>,
    r_list: &[f64],
    cfg: &Rho1Config,
) -> Result<Vec<Rho1Row>> {
    let g = &phi.grid;
    let d = g.dim();
    let h = g.h();
    let half_nodes = ((cfg.window * g.side() / 2.0) / h).floor() as i64;
    let shift_nodes = half_nodes / 2;
    let x_nodes = half_nodes - shift_nodes;
    if shift_nodes < 1 || cfg.n_y == 0 {
        return Err(invalid("window too small for translations"));
    }
    let c0 = (g.nodes_per_axis() / 2) as i64;
    let center = g.index(&vec![c0 as usize; d]);
    // x offsets, strided to at most max_x nodes
    let per_axis = ((cfg.max_x.max(1) as f64).powf(1.0 / d as f64))
        .floor()
        .max(1.0) as i64;
    let stride = ((2 * x_nodes + 1) as f64 / per_axis as f64).ceil().max(1.0) as i64;
    let axis_x: Vec<i64> = (-x_nodes..=x_nodes).step_by(stride as usize).collect();
    let xs: Vec<usize> = cartesian(&axis_x, d)
        .iter()
        .map(|o| g.offset(center, o))
        .collect();
    let axis_y: Vec<i64> = if cfg.n_y == 1 {
        vec![shift_nodes]
    } else {
        (0..cfg.n_y)
            .map(|i| -shift_nodes + (2 * shift_nodes * i as i64) / (cfg.n_y as i64 - 1))
            .collect()
    };
    let ys = cartesian(&axis_y, d);
    let v = phi.component(0);
    let mut rows = Vec::new();
    for &r in r_list {
        if !(r > 0.0) {
            return Err(invalid(format!("R must be positive, got {r}")));
        }
        let rn = (r / h + 1e-9).floor() as i64;
        if rn > shift_nodes {
            return Err(Error::Guard {
                what: "R beyond the translation window",
                value: r,
                limit: shift_nodes as f64 * h,
            });
        }
        let axis_z: Vec<i64> = (-rn..=rn).collect();
        let zs: Vec<Vec<i64>> = cartesian(&axis_z, d)
            .into_iter()
            .filter(|z| z.iter().map(|c| c * c).sum::<i64>() <= rn * rn)
            .collect();
        let mut best = 0.0f64;
        for y in &ys {
            let shifted_y: Vec<f64> = xs.iter().map(|&x| v[g.offset(x, y)]).collect();
            // try the z closest to y first
            let mut order: Vec<&Vec<i64>> = zs.iter().collect();
            order.sort_by_key(|z| z.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<i64>());
            let mut inner = f64::INFINITY;
            for z in order {
                let mut sup = 0.0f64;
                for (k, &x) in xs.iter().enumerate() {
                    sup = sup.max(0.5 * (shifted_y[k] - v[g.offset(x, z)]).abs());
                    if sup >= inner {
                        break;
                    }
                }
                inner = inner.min(sup);
                if inner <= best {
                    break;
                }
            }
            best = best.max(inner);
        }
        let rho_a = match field {
            Some(f) => Some(rho_k(&f.as_quasi(), r, 1, &cfg.modulus)?.value),
            None => None,
        };
        rows.push(Rho1Row {
            r,
            rho_phi: best,
            rho_a,
        });
    }
    Ok(rows)
}

fn cartesian(axis: &[i64], d: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    out
}
