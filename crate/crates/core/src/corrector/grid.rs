use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Uniform periodic node grid on the box `origin + [0, L)^d`, `n` nodes per axis.
///
/// Nodes are stored row-major with the last axis fastest. Node `p` sits at
/// `origin + p h` along every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    d: usize,
    side: f64,
    n: usize,
    origin: f64,
}

impl PeriodicGrid {
    /// Box centred at the origin.
    pub fn new(d: usize, side: f64, n: usize) -> Result<Self> {
        Self::with_origin(d, side, n, -side / 2.0)
    }

    pub fn with_origin(d: usize, side: f64, n: usize, origin: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(invalid(format!(
                "grid dimension must be 1, 2 or 3, got {d}"
            )));
        }
        if !(side > 0.0 && side.is_finite() && origin.is_finite()) {
            return Err(invalid(format!("grid side must be positive, got {side}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(invalid(format!(
                "nodes per axis must be a power of two >= 4, got {n}"
            )));
        }
        let total = (n as f64).powi(d as i32);
        if total > (1u64 << 28) as f64 {
            return Err(Error::Guard {
                what: "grid nodes",
                value: total,
                limit: (1u64 << 28) as f64,
            });
        }
        Ok(Self { d, side, n, origin })
    }

    /// Smallest centred power-of-two box with `eps L >= eps_l` and `h <= h_max`.
    pub fn for_eps(d: usize, eps: f64, eps_l: f64, h_max: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
        }
        if !(eps_l >= 8.0 && h_max > 0.0) {
            return Err(invalid("need eps L >= 8 and a positive mesh bound"));
        }
        let side = 2f64.powi((eps_l / eps).log2().ceil() as i32);
        let n = ((side / h_max).log2().ceil().max(2.0)).exp2() as usize;
        Self::new(d, side, n)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    fn shift(&self, axis: usize) -> u32 {
        self.n.trailing_zeros() * (self.d - 1 - axis) as u32
    }

    /// Flat-index distance between neighbours along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        1 << self.shift(axis)
    }

    /// Coordinate index of node `idx` along `axis`.
    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx >> self.shift(axis)) & (self.n - 1)
    }

    /// Periodic neighbour `idx + e_axis`.
    #[inline]
    pub fn next(&self, idx: usize, axis: usize) -> usize {
        let sh = self.shift(axis);
        if (idx >> sh) & (self.n - 1) == self.n - 1 {
            idx + (1 << sh) - (self.n << sh)
        } else {
            idx + (1 << sh)
        }
    }

    /// Periodic neighbour `idx - e_axis`.
    #[inline]
    pub fn prev(&self, idx: usize, axis: usize) -> usize {
        let sh = self.shift(axis);
        if (idx >> sh) & (self.n - 1) == 0 {
            idx + (self.n << sh) - (1 << sh)
        } else {
            idx - (1 << sh)
        }
    }

    /// Periodic shift by an integer offset per axis.
    pub fn offset(&self, idx: usize, shift: &[i64]) -> usize {
        let n = self.n as i64;
        let mut out = 0usize;
        for axis in 0..self.d {
            let p = (self.coord(idx, axis) as i64 + shift[axis]).rem_euclid(n) as usize;
            out += p * self.stride(axis);
        }
        out
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        (0..self.d).map(|a| self.coord(idx, a)).collect()
    }

    pub fn index(&self, p: &[usize]) -> usize {
        p.iter()
            .enumerate()
            .map(|(a, v)| (v % self.n) * self.stride(a))
            .sum()
    }

    /// Physical position of node `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let h = self.h();
        (0..self.d)
            .map(|a| self.origin + self.coord(idx, a) as f64 * h)
            .collect()
    }

    pub fn center(&self) -> f64 {
        self.origin + self.side / 2.0
    }

    /// Nodes whose coordinates all lie within `half_width` of the box centre.
    pub fn window(&self, half_width: f64) -> Vec<usize> {
        let h = self.h();
        let c = self.center();
        let inside: Vec<bool> = (0..self.n)
            .map(|p| (self.origin + p as f64 * h - c).abs() <= half_width + 1e-12 * h)
            .collect();
        (0..self.len())
            .filter(|&i| (0..self.d).all(|a| inside[self.coord(i, a)]))
            .collect()
    }

    /// The central window covering `fraction` of the side.
    pub fn central_window(&self, fraction: f64) -> Vec<usize> {
        self.window(fraction * self.side / 2.0)
    }

    /// Same box with half as many nodes per axis.
    pub fn coarsened(&self) -> Option<Self> {
        (self.n >= 8).then(|| Self {
            n: self.n / 2,
            ..self.clone()
        })
    }
}

/// Node values on a periodic grid: `components` blocks of `n^d` values each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: PeriodicGrid,
    pub components: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: &PeriodicGrid, components: usize) -> Self {
        Self {
            grid: grid.clone(),
            components,
            values: vec![0.0; grid.len() * components],
        }
    }

    pub fn scalar(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn new(grid: &PeriodicGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != grid.len() * components {
            return Err(invalid(format!(
                "grid field needs {} values, got {}",
                grid.len() * components,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite grid value"));
        }
        Ok(Self {
            grid: grid.clone(),
            components,
            values,
        })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self {
            grid: grid.clone(),
            components: 1,
            values,
        }
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    /// `max |v|` over the listed nodes (all components).
    pub fn sup_abs_on(&self, nodes: &[usize]) -> f64 {
        (0..self.components)
            .flat_map(|c| nodes.iter().map(move |&i| self.component(c)[i].abs()))
            .fold(0.0, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean of component `c` over the listed nodes.
    pub fn mean_on(&self, c: usize, nodes: &[usize]) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        let v = self.component(c);
        nodes.iter().map(|&i| v[i]).sum::<f64>() / nodes.len() as f64
    }

    /// Pointwise difference of two fields on the same grid.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.components != other.components {
            return Err(invalid("grid fields live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            components: self.components,
            values,
        })
    }

    /// Largest centred-difference gradient length of a scalar field over `nodes`.
    pub fn sup_grad_on(&self, nodes: &[usize]) -> f64 {
        let g = &self.grid;
        let v = self.component(0);
        let h2 = 2.0 * g.h();
        nodes
            .iter()
            .map(|&i| {
                (0..g.dim())
                    .map(|a| {
                        let di = (v[g.next(i, a)] - v[g.prev(i, a)]) / h2;
                        di * di
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Periodic multilinear interpolation of component `c` at `x`.
    pub fn interpolate(&self, c: usize, x: &[f64]) -> f64 {
        let g = &self.grid;
        let d = g.dim();
        let h = g.h();
        let v = self.component(c);
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let s = (x[a] - g.origin()) / h;
            let fl = s.floor();
            frac[a] = s - fl;
            base[a] = (fl as i64).rem_euclid(g.nodes_per_axis() as i64) as usize;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..d {
                let up = (corner >> a) & 1 == 1;
                w *= if up { frac[a] } else { 1.0 - frac[a] };
                let p = if up {
                    (base[a] + 1) % g.nodes_per_axis()
                } else {
                    base[a]
                };
                idx += p * g.stride(a);
            }
            if w != 0.0 {
                acc += w * v[idx];
            }
        }
        acc
    }
}
