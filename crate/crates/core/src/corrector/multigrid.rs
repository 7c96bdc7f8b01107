use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::corrector::grid::PeriodicGrid;
use crate::corrector::krylov::Preconditioner;
use crate::corrector::operator::{Operator, CHUNK};
use crate::error::{invalid, Result};

/// Largest level solved by a dense factorization.
const COARSEST: usize = 512;

struct Level {
    op: Operator,
    inv_diag: Vec<f64>,
}

/// Geometric V-cycle on the periodic grid hierarchy, used as a preconditioner.
///
/// Coarse operators are rediscretizations (see [`Operator`]), transfers are
/// full weighting and its adjoint (multilinear interpolation), smoothing is
/// damped Jacobi with equal pre and post sweeps. The cycle is therefore a
/// symmetric operator whenever the fine operator is.
pub struct Multigrid {
    levels: Vec<Level>,
    coarse: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    sweeps: usize,
    omega: f64,
}

impl Multigrid {
    pub fn new(op: &Operator, sweeps: usize) -> Result<Self> {
        if op.pinned().is_some() {
            return Err(invalid("multigrid does not support pinned nodes"));
        }
        let mut levels = vec![Level {
            inv_diag: inv(op.diagonal()),
            op: op.clone(),
        }];
        while levels.last().unwrap().op.len() > COARSEST {
            match levels.last().unwrap().op.coarsened() {
                Some(c) => levels.push(Level {
                    inv_diag: inv(c.diagonal()),
                    op: c,
                }),
                None => break,
            }
        }
        let last = &levels.last().unwrap().op;
        let n = last.len();
        if n > 4096 {
            return Err(invalid(
                "coarsest multigrid level is too large for a dense solve",
            ));
        }
        let mut dense = DMatrix::zeros(n, n);
        let mut unit = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            unit[j] = 1.0;
            last.apply(&unit, &mut col);
            unit[j] = 0.0;
            for i in 0..n {
                dense[(i, j)] = col[i];
            }
        }
        Ok(Self {
            levels,
            coarse: dense.lu(),
            sweeps: sweeps.max(1),
            omega: 2.0 / 3.0,
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn smooth(&self, l: usize, b: &[f64], x: &mut [f64], r: &mut [f64]) {
        let level = &self.levels[l];
        for _ in 0..self.sweeps {
            level.op.apply(x, r);
            let omega = self.omega;
            x.par_chunks_mut(CHUNK).enumerate().for_each(|(c, xs)| {
                let lo = c * CHUNK;
                let (b, r, d) = (
                    &b[lo..lo + xs.len()],
                    &r[lo..lo + xs.len()],
                    &level.inv_diag[lo..lo + xs.len()],
                );
                for k in 0..xs.len() {
                    xs[k] += omega * (b[k] - r[k]) * d[k];
                }
            });
        }
    }

    fn vcycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        if l + 1 == self.levels.len() {
            let sol = self
                .coarse
                .solve(&DVector::from_column_slice(b))
                .unwrap_or_else(|| DVector::zeros(b.len()));
            x.copy_from_slice(sol.as_slice());
            return;
        }
        let n = b.len();
        let mut r = vec![0.0; n];
        x.iter_mut().for_each(|v| *v = 0.0);
        self.smooth(l, b, x, &mut r);
        self.levels[l].op.apply(x, &mut r);
        r.par_iter_mut()
            .zip(b.par_iter())
            .for_each(|(r, b)| *r = b - *r);
        let fine = self.levels[l].op.grid();
        let coarse = self.levels[l + 1].op.grid();
        let rc = restrict(fine, coarse, &r);
        let mut ec = vec![0.0; rc.len()];
        self.vcycle(l + 1, &rc, &mut ec);
        prolong_add(fine, coarse, &ec, x);
        self.smooth(l, b, x, &mut r);
    }
}

impl Preconditioner for Multigrid {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.vcycle(0, r, z);
    }
}

fn inv(d: Vec<f64>) -> Vec<f64> {
    d.into_iter().map(|v| 1.0 / v).collect()
}

/// Full weighting: tensor weights (1/4, 1/2, 1/4) centred on fine node `2P`.
fn restrict(fine: &PeriodicGrid, coarse: &PeriodicGrid, r: &[f64]) -> Vec<f64> {
    const W: [f64; 3] = [0.25, 0.5, 0.25];
    let d = fine.dim();
    let mask = fine.nodes_per_axis() - 1;
    let mut out = vec![0.0; coarse.len()];
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, block)| {
            for (k, o) in block.iter_mut().enumerate() {
                let pc = c * CHUNK + k;
                // fine offsets of the three neighbours along each axis
                let mut offs = [[0usize; 3]; 3];
                for (a, off) in offs.iter_mut().enumerate().take(d) {
                    let f = 2 * coarse.coord(pc, a);
                    let st = fine.stride(a);
                    *off = [((f + mask) & mask) * st, f * st, ((f + 1) & mask) * st];
                }
                *o = match d {
                    1 => (0..3).map(|i| W[i] * r[offs[0][i]]).sum(),
                    2 => (0..3)
                        .map(|i| {
                            W[i] * (0..3)
                                .map(|j| W[j] * r[offs[0][i] + offs[1][j]])
                                .sum::<f64>()
                        })
                        .sum(),
                    _ => (0..3)
                        .map(|i| {
                            W[i] * (0..3)
                                .map(|j| {
                                    W[j] * (0..3)
                                        .map(|l| W[l] * r[offs[0][i] + offs[1][j] + offs[2][l]])
                                        .sum::<f64>()
                                })
                                .sum::<f64>()
                        })
                        .sum(),
                };
            }
        });
    out
}

/// `x += P e`, multilinear interpolation from the coarse nodes.
fn prolong_add(fine: &PeriodicGrid, coarse: &PeriodicGrid, e: &[f64], x: &mut [f64]) {
    let d = fine.dim();
    let mask = coarse.nodes_per_axis() - 1;
    x.par_chunks_mut(CHUNK).enumerate().for_each(|(c, block)| {
        for (k, o) in block.iter_mut().enumerate() {
            let p = c * CHUNK + k;
            // per axis: (number of parents, parent offsets)
            let mut offs = [[0usize; 2]; 3];
            let mut cnt = [1usize; 3];
            for a in 0..d {
                let f = fine.coord(p, a);
                let st = coarse.stride(a);
                let lo = f >> 1;
                offs[a] = [lo * st, ((lo + 1) & mask) * st];
                cnt[a] = 1 + (f & 1);
            }
            let mut acc = 0.0;
            for i in 0..cnt[0] {
                for j in 0..cnt[1] {
                    for l in 0..cnt[2] {
                        acc += e[offs[0][i] + offs[1][j] + offs[2][l]];
                    }
                }
            }
            *o += acc / (cnt[0] * cnt[1] * cnt[2]) as f64;
        }
    });
}
