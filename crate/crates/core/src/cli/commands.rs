use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::knobs::{check_list, check_range, Knobs};
use crate::cli::plot::{PlotKind, Series};
use crate::cli::report::{fmt_f, fmt_opt, Report};
use crate::corrector::{
    check_corrector_grid, check_dyadic, corrector_limit, difference_corrector_check, solve_corrector, unit,
    write_grid_field, CorrectorConfig, CorrectorResult, PreconditionerKind,
};
use crate::diffcalc::{omega_k, rho_k, rho_star, ModulusConfig, RhoEstimate};
use crate::error::{invalid, Error, Result};
use crate::field::{diophantine_constant, sigma, CoefficientField, FieldSpec, QuasiField, SigmaConfig, SupSampler};
use crate::heat::{
    ergodic_bound_check, fit_hermite_constant, grad_heat_l1, multiscale_poincare_rhs, ErgodicConfig, ErgodicReport,
    FrequencyField, TimeQuadrature, MAX_ORDER,
};
use crate::homog::{
    arithmetic_mean, dirichlet_rate, effective_matrix, harmonic_mean, BoundaryData, RateConfig, RateReport,
};

/// A loaded field description with its raw bytes (for the provenance hash).
pub struct LoadedSpec {
    pub bytes: Vec<u8>,
    pub spec: FieldSpec,
    pub field: CoefficientField,
}

pub struct Ctx<'a> {
    pub knobs: &'a Knobs,
    pub spec: Option<&'a LoadedSpec>,
    pub out: &'a Path,
}

impl Ctx<'_> {
    fn field(&self) -> Result<&CoefficientField> {
        self.spec
            .map(|s| &s.field)
            .ok_or_else(|| invalid("this command needs --spec"))
    }

    /// The `(0, 0)` entry as a scalar frequency field.
    fn scalar(&self) -> Result<FrequencyField> {
        let f = self.field()?;
        let q = f.as_quasi();
        FrequencyField::from_quasi(&QuasiField::scalar(f.winding().clone(), q.components()[0].clone())?)
    }

    fn series(&self, title: &str, x: &str, y: &str, kind: PlotKind, points: Vec<(f64, f64)>) -> Result<Series> {
        Ok(Series {
            title: title.to_string(),
            x_label: x.to_string(),
            y_label: y.to_string(),
            kind,
            points,
            fit_window: self.knobs.fit_window()?,
        })
    }
}

fn dyadic(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

fn radii(k: &Knobs, default: &[f64]) -> Result<Vec<f64>> {
    let r = k.r.clone().unwrap_or_else(|| default.to_vec());
    if r.is_empty() {
        return Err(invalid("R list is empty"));
    }
    if let Some(x) = r.iter().find(|x| !(**x >= 1.0 && x.is_finite())) {
        return Err(invalid(format!("R = {x} must be finite and >= 1")));
    }
    Ok(r)
}

fn at_least(name: &str, v: Option<usize>, min: usize) -> Result<Option<usize>> {
    match v {
        Some(x) if x < min => Err(invalid(format!("{name} = {x} must be at least {min}"))),
        v => Ok(v),
    }
}

fn sampler(k: &Knobs) -> Result<SupSampler> {
    let mut s = SupSampler::default();
    if let Some(r) = at_least("sup_resolution", k.sup_resolution, 2)? {
        s.resolution = r;
    }
    Ok(s)
}

fn modulus(k: &Knobs, base: ModulusConfig) -> Result<ModulusConfig> {
    let mut m = base;
    m.sup = sampler(k)?;
    if let Some(v) = at_least("n_y", k.n_y, 2)? {
        m.n_y = v;
    }
    if let Some(v) = at_least("n_y_nested", k.n_y_nested, 2)? {
        m.n_y_nested = v;
    }
    if let Some(v) = at_least("max_z_points", k.max_z_points, 1)? {
        m.max_z_points = v;
    }
    Ok(m)
}

fn order(k: &Knobs, cfg: &ModulusConfig) -> Result<usize> {
    let v = k.k.unwrap_or(1);
    if v == 0 || v > cfg.max_k {
        return Err(invalid(format!("k = {v} outside 1..={}", cfg.max_k)));
    }
    Ok(v)
}

fn corrector_cfg(k: &Knobs) -> Result<CorrectorConfig> {
    let mut c = CorrectorConfig::default();
    if let Some(v) = k.eps_l {
        if !(v >= 8.0 && v.is_finite()) {
            return Err(invalid(format!("eps_l = {v} must be >= 8")));
        }
        c.eps_l = v;
    }
    if let Some(v) = k.h_max {
        check_range("h_max", v, 0.0, 1.0 / 16.0)?;
        c.h_max = v;
    }
    if let Some(v) = k.window {
        c.window = v;
    }
    if let Some(v) = k.tol {
        c.solver.tol = v;
    }
    if let Some(p) = &k.preconditioner {
        c.solver.preconditioner = match p.as_str() {
            "jacobi" => PreconditionerKind::Jacobi,
            "multigrid" => PreconditionerKind::Multigrid,
            other => return Err(invalid(format!("unknown preconditioner {other}"))),
        };
    }
    if let Some(v) = at_least("sweeps", k.sweeps, 1)? {
        c.solver.sweeps = v;
    }
    if let Some(v) = at_least("max_iters", k.max_iters, 1)? {
        c.solver.max_iters = Some(v);
    }
    c.validate()?;
    Ok(c)
}

fn direction(k: &Knobs, d: usize) -> Result<Vec<f64>> {
    let e = k.e.clone().unwrap_or_else(|| {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    });
    unit(&e, d)
}

/// The eps list, each value checked against the corrector box constraints.
fn eps_list(k: &Knobs, default: Vec<f64>, d: usize, cfg: &CorrectorConfig) -> Result<Vec<f64>> {
    let eps = k.eps.clone().unwrap_or(default);
    check_list("eps", &eps, 0.0, 1.0)?;
    for &e in &eps {
        check_corrector_grid(&cfg.grid(d, e)?, e)?;
    }
    Ok(eps)
}

fn estimate_report(name: &str, ests: &[RhoEstimate], ctx: &Ctx, title: &str) -> Result<Report> {
    let mut r = Report::new(name, RhoEstimate::CSV_HEADER);
    r.rows = ests.iter().map(|e| e.csv_row()).collect();
    r.series = Some(ctx.series(title, "R", name, PlotKind::LogLog, ests.iter().map(|e| (e.radius, e.value)).collect())?);
    r.summary(&ests)
}

pub fn field_check(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let spec = &ctx.spec.expect("field present").spec;
    let theta = ctx.knobs.theta.or(spec.theta).unwrap_or(1.0);
    check_range("theta", theta, 0.0, 1e6)?;
    let z_max = ctx.knobs.z_max.unwrap_or(50);
    if !(1..=1000).contains(&z_max) {
        return Err(invalid(format!("z_max = {z_max} outside 1..=1000")));
    }
    let m = f.winding().torus_dim();
    let count = ((2 * z_max + 1) as f64).powi(m as i32);
    if count > 1e8 {
        return Err(Error::Guard {
            what: "diophantine lattice points",
            value: count,
            limit: 1e8,
        });
    }

    let mut r = Report::new("field-check", "quantity,value");
    let d = f.dim();
    r.rows.push(format!("d,{d}"));
    r.rows.push(format!("m,{m}"));
    r.rows.push(format!("lambda,{}", fmt_f(f.lambda())));
    r.rows.push(format!("symmetric,{}", f.is_symmetric()));
    r.rows.push(format!("constant,{}", f.is_constant()));
    let resonance = f.winding().check_resonance(f.winding().default_resonance_radius());
    r.rows.push(format!(
        "resonance,{}",
        match &resonance {
            Ok(()) => "none".to_string(),
            Err(e) => format!("\"{e}\""),
        }
    ));
    r.flag_if(resonance.is_err(), "winding matrix is resonant");
    let dio = if resonance.is_ok() && m > d {
        match diophantine_constant(f.winding(), theta, z_max) {
            Ok(rep) => {
                r.rows.push(format!("diophantine_theta,{}", fmt_f(theta)));
                r.rows.push(format!("diophantine_A,{}", fmt_f(rep.a_est)));
                let z: Vec<String> = rep.argmin_z.iter().map(|v| v.to_string()).collect();
                r.rows.push(format!("diophantine_argmin_z,{}", z.join(";")));
                Some(rep)
            }
            Err(e @ (Error::NotDiophantine { .. } | Error::Resonant { .. })) => {
                r.rows.push(format!("diophantine,\"{e}\""));
                r.flags.push(e.to_string());
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let q = f.as_quasi();
    for j in 0..=3u32 {
        let b = q.components().iter().map(|c| c.derivative_norm_bound(j)).fold(0.0, f64::max);
        r.rows.push(format!("derivative_bound_{j},{}", fmt_f(b)));
    }
    let chi = q.components().iter().map(|c| c.chi_m(d)).fold(0.0, f64::max);
    r.rows.push(format!("chi_{d},{}", fmt_f(chi)));

    #[derive(Serialize)]
    struct Summary<'a> {
        d: usize,
        m: usize,
        lambda: f64,
        resonant: bool,
        diophantine: Option<&'a crate::field::DiophantineReport>,
    }
    r.summary(&Summary {
        d,
        m,
        lambda: f.lambda(),
        resonant: resonance.is_err(),
        diophantine: dio.as_ref(),
    })
}

pub fn sigma_cmd(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let rs = radii(ctx.knobs, &[4.0, 8.0, 16.0, 32.0, 64.0])?;
    let mut cfg = SigmaConfig::default();
    if let Some(v) = at_least("n_y", ctx.knobs.n_y, 2)? {
        cfg.n_y = v;
    }
    if let Some(v) = at_least("max_z_points", ctx.knobs.max_z_points, 1)? {
        cfg.max_z_points = v;
    }
    ctx.knobs.fit_window()?;
    let ests = rs.iter().map(|r| sigma(f.winding(), *r, &cfg)).collect::<Result<Vec<_>>>()?;
    estimate_report("sigma", &ests, ctx, "discrepancy sigma(M, R)")
}

pub fn rho_cmd(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = modulus(ctx.knobs, ModulusConfig::default())?;
    let k = order(ctx.knobs, &cfg)?;
    let rs = radii(ctx.knobs, &[1.0, 2.0, 4.0, 8.0])?;
    ctx.knobs.fit_window()?;
    let q = f.as_quasi();
    let ests = rs.iter().map(|r| rho_k(&q, *r, k, &cfg)).collect::<Result<Vec<_>>>()?;
    estimate_report("rho", &ests, ctx, &format!("rho_{k}(a, R)"))
}

pub fn rho_star_cmd(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = modulus(ctx.knobs, ModulusConfig::default())?;
    let c = ctx.knobs.c.unwrap_or(1.0);
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("C = {c} must be >= 1")));
    }
    let k_max = ctx.knobs.k_max.unwrap_or(2);
    if k_max == 0 || k_max > cfg.max_k {
        return Err(invalid(format!("k_max = {k_max} outside 1..={}", cfg.max_k)));
    }
    let rs = radii(ctx.knobs, &[1.0, 2.0, 4.0, 8.0])?;
    ctx.knobs.fit_window()?;
    let q = f.as_quasi();
    let ests = rs.iter().map(|r| rho_star(&q, *r, c, k_max, &cfg)).collect::<Result<Vec<_>>>()?;
    estimate_report("rho-star", &ests, ctx, "rho_*(a, R)")
}

pub fn omega_cmd(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = modulus(ctx.knobs, ErgodicConfig::default().modulus)?;
    let k = order(ctx.knobs, &cfg)?;
    let rs = radii(ctx.knobs, &[1.0, 2.0, 4.0, 8.0])?;
    ctx.knobs.fit_window()?;
    let q = f.as_quasi();
    let ests = rs.iter().map(|r| omega_k(&q, *r, k, &cfg)).collect::<Result<Vec<_>>>()?;
    estimate_report("omega", &ests, ctx, &format!("omega_{k}(a, R)"))
}

pub fn ergodic(ctx: &Ctx) -> Result<Report> {
    let u = ctx.scalar()?;
    let mut cfg = ErgodicConfig::default();
    cfg.modulus = modulus(ctx.knobs, cfg.modulus)?;
    cfg.sup = cfg.modulus.sup.clone();
    cfg.allow_short_times = ctx.knobs.allow_short_times.unwrap_or(false);
    let k = order(ctx.knobs, &cfg.modulus)?;
    let ts = ctx.knobs.t.clone().unwrap_or_else(|| vec![1.0, 4.0, 16.0, 64.0, 256.0]);
    check_list("t", &ts, 0.0, 1e9)?;
    if !cfg.allow_short_times {
        if let Some(t) = ts.iter().find(|t| **t < k as f64) {
            return Err(Error::Guard {
                what: "time below k",
                value: *t,
                limit: k as f64,
            });
        }
    }
    let rs = radii(ctx.knobs, &[1.0, 2.0, 4.0, 8.0, 16.0])?;
    ctx.knobs.fit_window()?;
    let rep = ergodic_bound_check(&u, &ts, k, &rs, &cfg)?;
    let mut r = Report::new("ergodic", ErgodicReport::CSV_HEADER);
    r.rows = rep.csv_rows();
    r.flag_if(!rep.holds(), "ergodic bound fails with the fitted constants");
    r.series = Some(ctx.series(
        &format!("osc of the heat flow, k = {k}"),
        "t",
        "lhs_osc",
        PlotKind::LogLog,
        rep.rows.iter().map(|row| (row.t, row.lhs_osc)).collect(),
    )?);
    r.summary(&rep)
}

pub fn poincare(ctx: &Ctx) -> Result<Report> {
    let u = ctx.scalar()?;
    let mut q = TimeQuadrature {
        sup: sampler(ctx.knobs)?,
        ..TimeQuadrature::default()
    };
    if let Some(v) = ctx.knobs.t_min {
        q.t_min = v;
    }
    if let Some(v) = ctx.knobs.t_max {
        q.t_max = v;
    }
    if let Some(v) = ctx.knobs.intervals {
        q.intervals = v;
    }
    if !(q.t_min > 0.0 && q.t_max > q.t_min && q.t_max.is_finite()) {
        return Err(invalid(format!("need 0 < t_min < t_max, got [{}, {}]", q.t_min, q.t_max)));
    }
    if q.intervals < 2 || !q.intervals.is_multiple_of(2) {
        return Err(invalid(format!("intervals = {} must be even and >= 2", q.intervals)));
    }
    let rep = multiscale_poincare_rhs(&u, &q)?;
    let mut r = Report::new("poincare", "rhs,body,head,tail,osc");
    r.rows.push(
        [rep.rhs, rep.body, rep.head, rep.tail, rep.osc]
            .iter()
            .map(|v| fmt_f(*v))
            .collect::<Vec<_>>()
            .join(","),
    );
    r.flag_if(rep.osc > rep.rhs * (1.0 + 1e-9), "oscillation exceeds the right-hand side");
    r.summary(&rep)
}

pub fn hermite(ctx: &Ctx) -> Result<Report> {
    let k = ctx.knobs;
    let n_max = k.n_max.unwrap_or(8);
    if n_max == 0 || n_max > MAX_ORDER {
        return Err(invalid(format!("n_max = {n_max} outside 1..={MAX_ORDER}")));
    }
    let d = k.d.unwrap_or(1);
    if !(1..=3).contains(&d) {
        return Err(invalid(format!("d = {d} outside 1..=3")));
    }
    let ts = k.t.clone().unwrap_or_else(|| vec![0.25]);
    check_list("t", &ts, 0.0, 1e6)?;
    k.fit_window()?;

    #[derive(Serialize)]
    struct Row {
        n: usize,
        t: f64,
        value: f64,
        envelope: f64,
    }
    #[derive(Serialize)]
    struct Fit {
        t: f64,
        big_c: f64,
    }
    let mut rows = vec![];
    let mut fits = vec![];
    for &t in &ts {
        let vals = (0..=n_max)
            .map(|n| grad_heat_l1(n, t, d).map(|v| (n, v)))
            .collect::<Result<Vec<_>>>()?;
        let c = fit_hermite_constant(t, &vals);
        fits.push(Fit { t, big_c: c });
        for (n, v) in vals {
            let envelope = (c * (1.0 + n as f64) / t).powf(n as f64 / 2.0);
            rows.push(Row { n, t, value: v, envelope });
        }
    }
    let mut r = Report::new("hermite", "n,t,d,value,envelope,fitted_C");
    for row in &rows {
        let c = fits.iter().find(|f| f.t == row.t).map_or(f64::NAN, |f| f.big_c);
        r.rows.push(format!("{},{},{d},{},{},{}", row.n, row.t, fmt_f(row.value), fmt_f(row.envelope), fmt_f(c)));
    }
    r.series = Some(ctx.series(
        &format!("L1 norm of the n-th heat kernel derivative, t = {}", ts[0]),
        "n",
        "value",
        PlotKind::SemiLogY,
        rows.iter().filter(|row| row.t == ts[0]).map(|row| (row.n as f64, row.value)).collect(),
    )?);
    r.summary(&serde_json::json!({ "d": d, "rows": rows, "fits": fits }))
}

const CORRECTOR_HEADER: &str = "eps,h,L,n,sup_phi,eps_sup_phi,sup_grad_phi,mean_phi,residual,iterations,energy_defect";

fn corrector_row(c: &CorrectorResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        c.eps,
        c.h,
        c.side,
        c.n,
        fmt_f(c.sup_phi),
        fmt_f(c.eps * c.sup_phi),
        fmt_f(c.sup_grad_phi),
        fmt_f(c.mean_phi),
        fmt_f(c.residual),
        c.solver_iters,
        fmt_f(c.energy_defect)
    )
}

fn corrector_runs(ctx: &Ctx, name: &str, default: Vec<f64>) -> Result<(Report, Vec<CorrectorResult>)> {
    let f = ctx.field()?;
    let cfg = corrector_cfg(ctx.knobs)?;
    let e = direction(ctx.knobs, f.dim())?;
    let eps = eps_list(ctx.knobs, default, f.dim(), &cfg)?;
    ctx.knobs.fit_window()?;
    let write = ctx.knobs.write_field.unwrap_or(false);
    let mut results = vec![];
    for (i, &ep) in eps.iter().enumerate() {
        let grid = cfg.grid(f.dim(), ep)?;
        let res = solve_corrector(f, &e, ep, &grid, &cfg)?;
        if write {
            write_grid_field(res.phi(), &ctx.out.join(format!("{name}_phi_{i}")))?;
        }
        results.push(res);
    }
    let mut r = Report::new(name, CORRECTOR_HEADER);
    r.rows = results.iter().map(corrector_row).collect();
    Ok((r, results))
}

pub fn corrector(ctx: &Ctx) -> Result<Report> {
    let (mut r, res) = corrector_runs(ctx, "corrector", vec![1.0 / 16.0])?;
    r.series = Some(ctx.series(
        "sup |phi_eps|",
        "eps",
        "sup_phi",
        PlotKind::LogLog,
        res.iter().map(|c| (c.eps, c.sup_phi)).collect(),
    )?);
    r.summary(&res)
}

pub fn sweep(ctx: &Ctx) -> Result<Report> {
    let (mut r, res) = corrector_runs(ctx, "sweep", dyadic(3, 6))?;
    r.series = Some(ctx.series(
        "corrector plateau",
        "1/eps",
        "sup_phi",
        PlotKind::LogLog,
        res.iter().map(|c| (1.0 / c.eps, c.sup_phi)).collect(),
    )?);
    r.summary(&res)
}

pub fn psi_decay(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = corrector_cfg(ctx.knobs)?;
    let e = direction(ctx.knobs, f.dim())?;
    let eps = eps_list(ctx.knobs, dyadic(3, 6), f.dim(), &cfg)?;
    check_dyadic(&eps)?;
    ctx.knobs.fit_window()?;
    let rep = corrector_limit(f, &e, &eps, &cfg)?;
    let mut r = Report::new("psi-decay", "eps,sup_psi,partial_sum,equation_residual");
    r.rows = rep
        .rows
        .iter()
        .map(|c| format!("{},{},{},{}", c.eps, fmt_f(c.sup_psi), fmt_f(c.partial_sum), fmt_f(c.equation_residual)))
        .collect();
    r.flag_if(rep.flagged, "sup |psi| is not decaying");
    r.flag_if(
        rep.rows.iter().any(|c| c.equation_residual > 10.0 * cfg.solver.tol),
        "psi equation residual above 10 tol",
    );
    r.series = Some(ctx.series(
        "dyadic corrector differences",
        "log2(1/eps)",
        "sup_psi",
        PlotKind::SemiLogY,
        rep.rows.iter().map(|c| (-c.eps.log2(), c.sup_psi)).collect(),
    )?);
    r.summary(&rep)
}

pub fn zeta_check(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = corrector_cfg(ctx.knobs)?;
    let e = direction(ctx.knobs, f.dim())?;
    let eps = eps_list(ctx.knobs, vec![1.0 / 16.0], f.dim(), &cfg)?;
    if eps.len() != 1 {
        return Err(invalid("zeta-check takes a single eps"));
    }
    let pairs = ctx.knobs.pairs.unwrap_or(10);
    if !(1..=1000).contains(&pairs) {
        return Err(invalid(format!("pairs = {pairs} outside 1..=1000")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.knobs.seed.unwrap_or(1));
    let d = f.dim();
    let draws: Vec<(Vec<f64>, Vec<f64>)> = (0..pairs)
        .map(|_| {
            let y = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (y, z)
        })
        .collect();
    let grid = cfg.grid(d, eps[0])?;
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(";");
    let mut r = Report::new("zeta-check", "y,z,mismatch,absolute,sup_zeta,sup_delta_phi");
    let mut checks = vec![];
    for (y, z) in &draws {
        let c = difference_corrector_check(f, y, z, &e, eps[0], &grid, &cfg)?;
        r.rows.push(format!(
            "{},{},{},{},{},{}",
            join(y),
            join(z),
            fmt_f(c.mismatch),
            fmt_f(c.absolute),
            fmt_f(c.sup_zeta),
            fmt_f(c.sup_delta_phi)
        ));
        r.flag_if(c.mismatch > 1e-5, format!("zeta mismatch {:.3e} above 1e-5", c.mismatch));
        checks.push(c);
    }
    r.summary(&serde_json::json!({ "eps": eps[0], "pairs": draws, "checks": checks }))
}

pub fn effective(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let cfg = corrector_cfg(ctx.knobs)?;
    let eps = eps_list(ctx.knobs, vec![1.0 / 64.0], f.dim(), &cfg)?;
    if eps.len() != 1 {
        return Err(invalid("effective takes a single eps"));
    }
    let grid = cfg.grid(f.dim(), eps[0])?;
    let m = effective_matrix(f, eps[0], &grid, &cfg)?;
    let mut r = Report::new("effective", "i,j,abar");
    for i in 0..m.d {
        for j in 0..m.d {
            r.rows.push(format!("{i},{j},{}", fmt_f(m.entry(i, j))));
        }
    }
    let means = if f.dim() == 1 {
        Some((harmonic_mean(f, 4096)?, arithmetic_mean(f, 4096)?))
    } else {
        None
    };
    r.summary(&serde_json::json!({
        "effective": m,
        "harmonic_mean": means.map(|v| v.0),
        "arithmetic_mean": means.map(|v| v.1),
    }))
}

pub fn rate(ctx: &Ctx) -> Result<Report> {
    let f = ctx.field()?;
    let d = f.dim();
    let k = ctx.knobs;
    let mut cfg = RateConfig {
        corrector: corrector_cfg(k)?,
        ..RateConfig::default()
    };
    if k.tol.is_some() {
        cfg.solver.tol = cfg.corrector.solver.tol;
    }
    if let Some(v) = k.nodes_per_eps {
        check_range("nodes_per_eps", v, 0.0, 1024.0)?;
        cfg.nodes_per_eps = v;
    }
    if let Some(v) = at_least("min_nodes", k.min_nodes, 4)? {
        cfg.min_nodes = v;
    }
    if let Some(v) = k.corrector_eps {
        check_range("corrector_eps", v, 0.0, 1.0)?;
        cfg.corrector_eps = v;
    }
    if let Some(v) = k.margin {
        if !(0.1..0.5).contains(&v) {
            return Err(invalid(format!("margin = {v} outside [0.1, 0.5)")));
        }
        cfg.margin = v;
    }
    if let Some(v) = k.p {
        if !(v >= 1.0) {
            return Err(invalid(format!("p = {v} must be >= 1")));
        }
        cfg.p = v;
    }
    if let Some(v) = k.two_scale {
        cfg.two_scale = v;
    }
    let g = BoundaryData {
        c: k.g_c.unwrap_or(0.0),
        b: k.g_b.clone().unwrap_or_else(|| {
            let mut b = vec![0.0; d];
            b[0] = 1.0;
            b
        }),
        a: k.g_a.clone().unwrap_or_default(),
    };
    g.validate(d)?;
    let eps = k.eps.clone().unwrap_or_else(|| dyadic(3, 7));
    check_list("eps", &eps, 0.0, 1.0)?;
    if d > 2 {
        return Err(invalid(format!("rate supports d = 1, 2, got {d}")));
    }
    let finest = eps.iter().copied().fold(1.0, f64::min);
    let n_unit = (cfg.nodes_per_eps / finest).log2().ceil().exp2().max(cfg.min_nodes as f64);
    let nodes = (2.0 * n_unit).powi(d as i32);
    if nodes > (1u64 << 24) as f64 {
        return Err(Error::Guard {
            what: "Dirichlet host grid nodes",
            value: nodes,
            limit: (1u64 << 24) as f64,
        });
    }
    if !f.is_constant() {
        check_corrector_grid(&cfg.corrector.grid(d, cfg.corrector_eps)?, cfg.corrector_eps)?;
    }
    k.fit_window()?;
    let rep = dirichlet_rate(f, &g, &eps, &cfg)?;
    let mut r = Report::new("rate", RateReport::CSV_HEADER);
    r.rows = rep.csv_rows();
    r.series = Some(ctx.series(
        "homogenization error",
        "eps",
        "err_Linf",
        PlotKind::LogLog,
        rep.rows.iter().map(|row| (row.eps, row.err_linf)).collect(),
    )?);
    r.summary(&serde_json::json!({
        "report": rep,
        "slope": rep.slope.map(|s| s.slope),
        "slope_closed": rep.slope_closed.map(|s| s.slope),
        "slope_w1p": rep.slope_w1p.map(|s| s.slope),
        "closed_form_rows": rep.rows.iter().map(|row| fmt_opt(row.err_closed)).collect::<Vec<_>>(),
    }))
}
