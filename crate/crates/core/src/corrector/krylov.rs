use rayon::prelude::*;

use crate::corrector::operator::CHUNK;
use crate::error::{Error, Result};

/// Something that maps `x` to `y = A x`.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Approximate inverse `z ~ A^{-1} r`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

/// Identity preconditioner.
pub struct NoPreconditioner;

impl Preconditioner for NoPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// `z = r / diag(A)`.
pub struct Jacobi {
    pub inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(diag: &[f64]) -> Self {
        Self {
            inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
        }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.par_iter_mut()
            .zip(r.par_iter())
            .zip(self.inv_diag.par_iter())
            .for_each(|((z, r), d)| *z = r * d);
    }
}

/// Iteration record of a Krylov solve.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    /// Final true relative residual `|b - A x| / |b|`.
    pub residual: f64,
    /// Relative residual estimate after each iteration.
    pub history: Vec<f64>,
}

/// Dot product summed chunk by chunk in a fixed order, so the result does not
/// depend on the thread count.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha x`
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut()
        .zip(x.par_iter())
        .for_each(|(y, x)| *y += alpha * x);
}

fn residual(a: &dyn LinearMap, b: &[f64], x: &[f64], r: &mut [f64]) {
    a.apply(x, r);
    r.par_iter_mut()
        .zip(b.par_iter())
        .for_each(|(r, b)| *r = b - *r);
}

/// Preconditioned conjugate gradients for symmetric positive definite `A`,
/// starting from the contents of `x`.
pub fn pcg(
    a: &dyn LinearMap,
    m: &dyn Preconditioner,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
) -> Result<KrylovReport> {
    let n = a.dim();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovReport {
            iterations: 0,
            residual: 0.0,
            history: vec![],
        });
    }
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut history = Vec::new();
    let mut it = 0;
    loop {
        // (re)start from the true residual
        residual(a, b, x, &mut r);
        let mut rel = norm(&r) / bnorm;
        if rel <= tol {
            return Ok(KrylovReport {
                iterations: it,
                residual: rel,
                history,
            });
        }
        if it >= max_iters {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: rel,
                history,
            });
        }
        m.apply(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let start = it;
        while rel > tol && it < max_iters {
            a.apply(&p, &mut q);
            let pq = dot(&p, &q);
            if !(pq > 0.0) {
                break;
            }
            let alpha = rz / pq;
            axpy(alpha, &p, x);
            axpy(-alpha, &q, &mut r);
            it += 1;
            rel = norm(&r) / bnorm;
            history.push(rel);
            if rel <= tol {
                break;
            }
            m.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut()
                .zip(z.par_iter())
                .for_each(|(p, z)| *p = z + beta * *p);
        }
        if !(rel <= tol) && (it == start || !rel.is_finite()) {
            residual(a, b, x, &mut r);
            return Err(Error::NonConvergence {
                iterations: it,
                residual: norm(&r) / bnorm,
                history,
            });
        }
    }
}

/// Restarted GMRES with right preconditioning, for nonsymmetric `A`.
pub fn gmres(
    a: &dyn LinearMap,
    m: &dyn Preconditioner,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
    restart: usize,
) -> Result<KrylovReport> {
    let n = a.dim();
    let restart = restart.max(1);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovReport {
            iterations: 0,
            residual: 0.0,
            history: vec![],
        });
    }
    let mut history = Vec::new();
    let mut it = 0;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut zbuf = vec![0.0; n];
    loop {
        residual(a, b, x, &mut r);
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel <= tol || it >= max_iters {
            if rel > tol {
                return Err(Error::NonConvergence {
                    iterations: it,
                    residual: rel,
                    history,
                });
            }
            return Ok(KrylovReport {
                iterations: it,
                residual: rel,
                history,
            });
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut hmat: Vec<Vec<f64>> = Vec::new();
        let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        let mut g = vec![beta];
        let mut zs: Vec<Vec<f64>> = Vec::new();
        for j in 0..restart {
            m.apply(&v[j], &mut zbuf);
            zs.push(zbuf.clone());
            a.apply(&zbuf, &mut w);
            let mut col = vec![0.0; j + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                col[i] = hij;
                axpy(-hij, vi, &mut w);
            }
            let wn = norm(&w);
            col[j + 1] = wn;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let den = col[j].hypot(col[j + 1]);
            let (c, s) = if den == 0.0 {
                (1.0, 0.0)
            } else {
                (col[j] / den, col[j + 1] / den)
            };
            cs.push(c);
            sn.push(s);
            col[j] = den;
            col[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            hmat.push(col);
            it += 1;
            let est = g[j + 1].abs() / bnorm;
            history.push(est);
            if est <= tol * 0.5 || it >= max_iters || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|x| x / wn).collect());
        }
        // back substitution for the Krylov coefficients
        let k = hmat.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
                s -= hmat[l][i] * yl;
            }
            y[i] = if hmat[i][i] != 0.0 {
                s / hmat[i][i]
            } else {
                0.0
            };
        }
        for (yi, zi) in y.iter().zip(&zs) {
            axpy(*yi, zi, x);
        }
    }
}
