use rayon::prelude::*;

use crate::corrector::grid::PeriodicGrid;
use crate::error::{invalid, Error, Result};
use crate::field::CoefficientField;

/// Work unit for parallel loops and fixed-order reductions.
pub(crate) const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
enum Samples {
    /// One value per slot, shared by every node.
    Constant(Vec<f64>),
    /// One array over the nodes per slot.
    Sampled(Vec<Vec<f64>>),
}

impl Samples {
    #[inline]
    fn get(&self, node: usize, slot: usize) -> f64 {
        match self {
            Samples::Constant(v) => v[slot],
            Samples::Sampled(v) => v[slot][node],
        }
    }
}

/// Flux-form finite-difference operator `v -> eps^2 v - D^-.(a (D^+ v))` on a periodic grid.
///
/// Diagonal entries `a_ii` are sampled at face centres `x_p + h e_i / 2`,
/// off-diagonal entries at cell centres `x_p + h (1,..,1) / 2`, where the
/// tangential derivatives are averaged over the cell edges. For symmetric `a`
/// the operator is `eps^2 + G^t K G` and hence symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Operator {
    grid: PeriodicGrid,
    eps2: f64,
    faces: Samples,
    cells: Option<Samples>,
    symmetric: bool,
    pinned: Option<Vec<bool>>,
}

impl Operator {
    /// The regularized corrector operator. Needs `eps` in `(0, 1]`, `eps L >= 8`
    /// and `h <= 1/16`.
    pub fn new(field: &CoefficientField, grid: &PeriodicGrid, eps: f64) -> Result<Self> {
        check_corrector_grid(grid, eps)?;
        Self::assemble(field, grid, eps * eps, None)
    }

    /// Operator with mass `eps2` and optional Dirichlet pins; no scale checks.
    pub(crate) fn assemble(
        field: &CoefficientField,
        grid: &PeriodicGrid,
        eps2: f64,
        pinned: Option<Vec<bool>>,
    ) -> Result<Self> {
        let d = grid.dim();
        if field.dim() != d {
            return Err(invalid(format!(
                "field dimension {} does not match grid dimension {d}",
                field.dim()
            )));
        }
        if let Some(p) = &pinned {
            if p.len() != grid.len() {
                return Err(invalid("pin mask has the wrong length"));
            }
        }
        crate::work::tick();
        let h = grid.h();
        let n = grid.len();
        let faces = if field.is_constant() {
            let a = field.eval(&vec![0.0; d]);
            Samples::Constant((0..d).map(|i| a[i * d + i]).collect())
        } else {
            let v = (0..d)
                .map(|i| {
                    (0..n)
                        .into_par_iter()
                        .map(|p| {
                            let mut y = grid.point(p);
                            y[i] += 0.5 * h;
                            field.entry(i, i, &y)
                        })
                        .collect()
                })
                .collect();
            Samples::Sampled(v)
        };
        let off: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (0..d).filter(move |j| *j != i).map(move |j| (i, j)))
            .collect();
        let has_off = off.iter().any(|&(i, j)| {
            let k = i * d + j;
            field.shift()[k] != 0.0
                || !field.entries()[k]
                    .terms()
                    .iter()
                    .all(|t| t.c == 0.0 && t.s == 0.0)
        });
        let cells = if !has_off {
            None
        } else if field.is_constant() {
            let mut a = field.eval(&vec![0.0; d]);
            for i in 0..d {
                a[i * d + i] = 0.0;
            }
            Some(Samples::Constant(a))
        } else {
            let samples: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|p| {
                    let x: Vec<f64> = grid.point(p).iter().map(|c| c + 0.5 * h).collect();
                    field.eval(&x)
                })
                .collect();
            let v = (0..d * d)
                .map(|k| {
                    if off.contains(&(k / d, k % d)) {
                        samples.iter().map(|a| a[k]).collect()
                    } else {
                        vec![]
                    }
                })
                .collect();
            Some(Samples::Sampled(v))
        };
        Ok(Self {
            grid: grid.clone(),
            eps2,
            faces,
            cells,
            symmetric: field.is_symmetric(),
            pinned,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub(crate) fn pinned(&self) -> Option<&[bool]> {
        self.pinned.as_deref()
    }

    #[inline]
    fn face(&self, axis: usize, p: usize) -> f64 {
        self.faces.get(p, axis)
    }

    /// Corner indices of the cell with lower corner `p`, bit `a` of the slot
    /// selecting the upper node along axis `a`.
    fn cell_corners(&self, p: usize, out: &mut [usize]) {
        let d = self.grid.dim();
        out[0] = p;
        for a in 0..d {
            let half = 1usize << a;
            for b in 0..half {
                out[half + b] = self.grid.next(out[b], a);
            }
        }
    }

    /// Cell fluxes `K_off (e + G v)` at every cell (node-major, `d` per cell).
    fn cell_fluxes(&self, cells: &Samples, v: Option<&[f64]>, e: Option<&[f64]>) -> Vec<f64> {
        let d = self.grid.dim();
        let h = self.grid.h();
        let scale = 1.0 / (h * (1usize << (d - 1)) as f64);
        let mut flux = vec![0.0; self.len() * d];
        flux.par_chunks_mut(d).enumerate().for_each(|(p, out)| {
            let mut g = [0.0f64; 3];
            if let Some(e) = e {
                g[..d].copy_from_slice(e);
            }
            if let Some(v) = v {
                let mut corners = [0usize; 8];
                self.cell_corners(p, &mut corners[..1 << d]);
                for (b, &c) in corners[..1 << d].iter().enumerate() {
                    for (j, gj) in g[..d].iter_mut().enumerate() {
                        let s = if (b >> j) & 1 == 1 { 1.0 } else { -1.0 };
                        *gj += s * v[c] * scale;
                    }
                }
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o = (0..d)
                    .filter(|j| *j != i)
                    .map(|j| cells.get(p, i * d + j) * g[j])
                    .sum();
            }
        });
        flux
    }

    /// `out = G^t K (e + G v)`; either part may be absent.
    pub(crate) fn div_flux(&self, v: Option<&[f64]>, e: Option<&[f64]>, out: &mut [f64]) {
        self.stencil(v, e, 0.0, out);
    }

    /// `out = mass v + G^t K (e + G v)`.
    fn stencil(&self, v: Option<&[f64]>, e: Option<&[f64]>, mass: f64, out: &mut [f64]) {
        let g = &self.grid;
        let d = g.dim();
        let h = g.h();
        match (&self.faces, v) {
            (Samples::Constant(c), _) => face_stencil(g, v, e, mass, |i, _| c[i], out),
            (Samples::Sampled(vals), _) => face_stencil(g, v, e, mass, |i, p| vals[i][p], out),
        }
        if let Some(cells) = &self.cells {
            let flux = self.cell_fluxes(cells, v, e);
            let scale = 1.0 / (h * (1usize << (d - 1)) as f64);
            out.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, block)| {
                    for (k, o) in block.iter_mut().enumerate() {
                        let q = c * CHUNK + k;
                        // cells having q as corner b have lower corner q - b
                        for b in 0..(1usize << d) {
                            let mut cell = q;
                            for a in 0..d {
                                if (b >> a) & 1 == 1 {
                                    cell = g.prev(cell, a);
                                }
                            }
                            for i in 0..d {
                                let s = if (b >> i) & 1 == 1 { 1.0 } else { -1.0 };
                                *o += s * flux[cell * d + i] * scale;
                            }
                        }
                    }
                });
        }
    }

    /// `out = A v`. Pinned nodes act as the identity and are excluded from free rows.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        match &self.pinned {
            None => self.stencil(Some(v), None, self.eps2, out),
            Some(pins) => {
                let w: Vec<f64> = v
                    .iter()
                    .zip(pins)
                    .map(|(x, p)| if *p { 0.0 } else { *x })
                    .collect();
                self.div_flux(Some(&w), None, out);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = if pins[i] { v[i] } else { *o + self.eps2 * w[i] };
                }
            }
        }
    }

    /// Right-hand side `D^-.(a e)` of the corrector equation in direction `e`.
    pub fn rhs(&self, e: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.div_flux(None, Some(e), &mut out);
        out.iter_mut().for_each(|v| *v = -*v);
        out
    }

    /// Diagonal of `A`.
    pub fn diagonal(&self) -> Vec<f64> {
        let g = &self.grid;
        let d = g.dim();
        let h2 = g.h() * g.h();
        let mut diag: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|p| {
                self.eps2
                    + (0..d)
                        .map(|i| (self.face(i, p) + self.face(i, g.prev(p, i))) / h2)
                        .sum::<f64>()
            })
            .collect();
        if let Some(cells) = &self.cells {
            let scale = 1.0 / (h2 * (1usize << (2 * (d - 1))) as f64);
            for (q, dq) in diag.iter_mut().enumerate() {
                for b in 0..(1usize << d) {
                    let mut cell = q;
                    for a in 0..d {
                        if (b >> a) & 1 == 1 {
                            cell = g.prev(cell, a);
                        }
                    }
                    for i in 0..d {
                        for j in (0..d).filter(|j| *j != i) {
                            let s = if ((b >> i) & 1) == ((b >> j) & 1) {
                                1.0
                            } else {
                                -1.0
                            };
                            *dq += s * cells.get(cell, i * d + j) * scale;
                        }
                    }
                }
            }
        }
        if let Some(pins) = &self.pinned {
            for (v, p) in diag.iter_mut().zip(pins) {
                if *p {
                    *v = 1.0;
                }
            }
        }
        diag
    }

    /// Means over `nodes` of the flux components `a (e + grad v)` (face and cell parts).
    pub fn flux_means(&self, v: &[f64], e: &[f64], nodes: &[usize]) -> Vec<f64> {
        let g = &self.grid;
        let d = g.dim();
        let inv_h = 1.0 / g.h();
        let mut out = vec![0.0; d];
        if nodes.is_empty() {
            return out;
        }
        let cell = self
            .cells
            .as_ref()
            .map(|c| self.cell_fluxes(c, Some(v), Some(e)));
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &p in nodes {
                acc += self.face(i, p) * (e[i] + (v[g.next(p, i)] - v[p]) * inv_h);
                if let Some(cf) = &cell {
                    acc += cf[p * d + i];
                }
            }
            *o = acc / nodes.len() as f64;
        }
        out
    }

    /// Rediscretization on the grid with half the nodes: harmonic means across
    /// faces, full-weighting averages along them, cell averages off the diagonal.
    pub(crate) fn coarsened(&self) -> Option<Self> {
        if self.pinned.is_some() {
            return None;
        }
        let coarse = self.grid.coarsened()?;
        let d = self.grid.dim();
        let fine = &self.grid;
        let to_fine = |pc: usize| -> usize {
            let mut idx = 0;
            for a in 0..d {
                idx += 2 * coarse.coord(pc, a) * fine.stride(a);
            }
            idx
        };
        let faces = match &self.faces {
            Samples::Constant(v) => Samples::Constant(v.clone()),
            Samples::Sampled(_) => {
                let per_node: Vec<Vec<f64>> = (0..coarse.len())
                    .into_par_iter()
                    .map(|pc| {
                        let base = to_fine(pc);
                        let mut out = vec![0.0; d];
                        for (i, o) in out.iter_mut().enumerate() {
                            let mut acc = 0.0;
                            let tangential: Vec<usize> = (0..d).filter(|a| *a != i).collect();
                            let combos = 3usize.pow(tangential.len() as u32);
                            for t in 0..combos {
                                let mut w = 1.0;
                                let mut shift = [0i64; 3];
                                let mut rem = t;
                                for &a in &tangential {
                                    let o = (rem % 3) as i64 - 1;
                                    rem /= 3;
                                    shift[a] = o;
                                    w *= if o == 0 { 0.5 } else { 0.25 };
                                }
                                let p0 = fine.offset(base, &shift[..d]);
                                let p1 = fine.next(p0, i);
                                let (a0, a1) = (self.face(i, p0), self.face(i, p1));
                                acc += w * 2.0 * a0 * a1 / (a0 + a1);
                            }
                            *o = acc;
                        }
                        out
                    })
                    .collect();
                Samples::Sampled(
                    (0..d)
                        .map(|i| per_node.iter().map(|v| v[i]).collect())
                        .collect(),
                )
            }
        };
        let cells = self.cells.as_ref().map(|c| match c {
            Samples::Constant(v) => Samples::Constant(v.clone()),
            Samples::Sampled(vals) => {
                let v = vals
                    .iter()
                    .map(|slot| {
                        if slot.is_empty() {
                            return vec![];
                        }
                        (0..coarse.len())
                            .into_par_iter()
                            .map(|pc| {
                                let mut corners = [0usize; 8];
                                self.cell_corners(to_fine(pc), &mut corners[..1 << d]);
                                corners[..1 << d].iter().map(|&f| slot[f]).sum::<f64>()
                                    / (1usize << d) as f64
                            })
                            .collect()
                    })
                    .collect();
                Samples::Sampled(v)
            }
        });
        Some(Self {
            grid: coarse,
            eps2: self.eps2,
            faces,
            cells,
            symmetric: self.symmetric,
            pinned: None,
        })
    }
}

/// Checks the corrector-grid invariants for a given `eps`.
pub fn check_corrector_grid(grid: &PeriodicGrid, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    if eps * grid.side() < 8.0 {
        return Err(Error::Guard {
            what: "eps L below minimum",
            value: eps * grid.side(),
            limit: 8.0,
        });
    }
    if grid.h() > 1.0 / 16.0 {
        return Err(Error::Guard {
            what: "mesh size h",
            value: grid.h(),
            limit: 1.0 / 16.0,
        });
    }
    Ok(())
}

/// Face part of [`Operator::stencil`], one grid row (last axis) at a time so
/// that every neighbour access is a contiguous slice.
#[inline(always)]
fn face_stencil(
    g: &PeriodicGrid,
    v: Option<&[f64]>,
    e: Option<&[f64]>,
    mass: f64,
    a: impl Fn(usize, usize) -> f64 + Sync,
    out: &mut [f64],
) {
    let d = g.dim();
    let n = g.nodes_per_axis();
    let inv_h = 1.0 / g.h();
    out.par_chunks_mut(n).enumerate().for_each(|(row, o)| {
        let base = row * n;
        match v {
            Some(v) => o
                .iter_mut()
                .zip(&v[base..base + n])
                .for_each(|(o, x)| *o = mass * x),
            None => o.iter_mut().for_each(|o| *o = 0.0),
        }
        for i in 0..d {
            let ei = e.map_or(0.0, |e| e[i]);
            let flux = |p: usize, q: usize| {
                let grad = match v {
                    Some(v) => ei + (v[q] - v[p]) * inv_h,
                    None => ei,
                };
                a(i, p) * grad
            };
            if i + 1 == d {
                for k in 0..n {
                    let kp = if k == 0 { n - 1 } else { k - 1 };
                    let kn = if k + 1 == n { 0 } else { k + 1 };
                    o[k] += (flux(base + kp, base + k) - flux(base + k, base + kn)) * inv_h;
                }
            } else {
                let (bp, bn) = (g.prev(base, i), g.next(base, i));
                for (k, ok) in o.iter_mut().enumerate() {
                    *ok += (flux(bp + k, base + k) - flux(base + k, bn + k)) * inv_h;
                }
            }
        }
    });
}
