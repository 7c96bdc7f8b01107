use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::lattice::{capped_resolution, golden_min, torus_lattice};

/// One mode `c cos(2 pi k.alpha) + s sin(2 pi k.alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<i64>,
    pub c: f64,
    pub s: f64,
}

/// Real trigonometric polynomial `F` on the torus `T^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    m: usize,
    terms: Vec<TrigTerm>,
}

/// Controls how suprema of trigonometric polynomials over `T^m` are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupSampler {
    /// Lattice points per torus dimension.
    pub resolution: usize,
    /// Cap on the total number of lattice points (resolution is lowered to fit).
    pub max_points: usize,
    /// Golden-section polish of the lattice extremizers.
    pub refine: bool,
    /// Use the closed form `|c_0| + sum |amplitudes|` when the active
    /// frequencies are linearly independent.
    pub exact_when_independent: bool,
}

impl Default for SupSampler {
    fn default() -> Self {
        Self {
            resolution: 64,
            max_points: 1 << 18,
            refine: true,
            exact_when_independent: true,
        }
    }
}

impl SupSampler {
    /// The same sampler with resolution scaled by `2^order`.
    pub fn doubled(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.resolution = self.resolution.saturating_mul(1 << order.min(16));
        s
    }
}

/// Extreme values of a polynomial over the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// True when obtained in closed form rather than by sampling.
    pub exact: bool,
    /// Per-dimension lattice resolution actually used (0 when exact).
    pub resolution: usize,
}

impl Extrema {
    pub fn sup_abs(&self) -> f64 {
        self.max.abs().max(self.min.abs())
    }

    pub fn osc(&self) -> f64 {
        self.max - self.min
    }
}

/// A merged mode `r cos(2 pi k.alpha - phase)` with `k` in canonical sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub k: Vec<i64>,
    pub c: f64,
    pub s: f64,
}

impl Mode {
    pub fn amplitude(&self) -> f64 {
        self.c.hypot(self.s)
    }
}

fn dot(k: &[i64], a: &[f64]) -> f64 {
    k.iter().zip(a).map(|(ki, ai)| *ki as f64 * ai).sum()
}

impl TrigPolynomial {
    pub fn new(m: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        if m == 0 {
            return Err(invalid("torus dimension must be at least 1"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &terms {
            if t.k.len() != m {
                return Err(invalid(format!(
                    "frequency {:?} has length {}, expected {m}",
                    t.k,
                    t.k.len()
                )));
            }
            if !t.c.is_finite() || !t.s.is_finite() {
                return Err(invalid("non-finite amplitude"));
            }
            if !seen.insert(t.k.clone()) {
                return Err(invalid(format!("duplicate frequency {:?}", t.k)));
            }
        }
        Ok(Self { m, terms })
    }

    pub fn zero(m: usize) -> Self {
        Self {
            m,
            terms: Vec::new(),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Self {
            m,
            terms: vec![TrigTerm {
                k: vec![0; m],
                c,
                s: 0.0,
            }],
        }
    }

    /// `amp * cos(2 pi k.alpha)`.
    pub fn cosine(k: Vec<i64>, amp: f64) -> Self {
        Self {
            m: k.len(),
            terms: vec![TrigTerm { k, c: amp, s: 0.0 }],
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn eval(&self, alpha: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let th = TAU * dot(&t.k, alpha);
                if t.s == 0.0 {
                    t.c * th.cos()
                } else {
                    let (sn, cs) = th.sin_cos();
                    t.c * cs + t.s * sn
                }
            })
            .sum()
    }

    /// Partial derivative along the unit direction `e_i` of `T^m`.
    pub fn partial(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.k[i] != 0)
            .map(|t| {
                let w = TAU * t.k[i] as f64;
                TrigTerm {
                    k: t.k.clone(),
                    c: w * t.s,
                    s: -w * t.c,
                }
            })
            .collect();
        Self { m: self.m, terms }
    }

    /// Zero-frequency amplitude, i.e. the torus mean.
    pub fn mean(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.k.iter().all(|v| *v == 0))
            .map(|t| t.c)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm {
                k: t.k.clone(),
                c: t.c * factor,
                s: t.s * factor,
            })
            .collect();
        Self { m: self.m, terms }
    }

    /// `self + c`.
    pub fn plus_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        match out.terms.iter_mut().find(|t| t.k.iter().all(|v| *v == 0)) {
            Some(t) => t.c += c,
            None => out.terms.push(TrigTerm {
                k: vec![0; self.m],
                c,
                s: 0.0,
            }),
        }
        out
    }

    /// Amplitudes of the phase-shifted mode `alpha -> term(alpha + beta)`.
    fn shifted_amplitudes(t: &TrigTerm, beta: &[f64]) -> (f64, f64) {
        let (sn, cs) = (TAU * dot(&t.k, beta)).sin_cos();
        (t.c * cs + t.s * sn, t.s * cs - t.c * sn)
    }

    /// `alpha -> F(alpha + beta)`.
    pub fn translated(&self, beta: &[f64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (c, s) = Self::shifted_amplitudes(t, beta);
                TrigTerm {
                    k: t.k.clone(),
                    c,
                    s,
                }
            })
            .collect();
        Self { m: self.m, terms }
    }

    /// `alpha -> (F(alpha + beta) - F(alpha + gamma)) / 2`.
    pub fn difference(&self, beta: &[f64], gamma: &[f64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (c1, s1) = Self::shifted_amplitudes(t, beta);
                let (c2, s2) = Self::shifted_amplitudes(t, gamma);
                TrigTerm {
                    k: t.k.clone(),
                    c: 0.5 * (c1 - c2),
                    s: 0.5 * (s1 - s2),
                }
            })
            .collect();
        Self { m: self.m, terms }
    }

    /// Upper bound `sum (|c| + |s|) (2 pi |k|_1)^j` for every `j`-th order partial derivative.
    pub fn derivative_norm_bound(&self, j: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k1: i64 = t.k.iter().map(|v| v.abs()).sum();
                let w = if j == 0 {
                    1.0
                } else {
                    (TAU * k1 as f64).powi(j as i32)
                };
                (t.c.abs() + t.s.abs()) * w
            })
            .sum()
    }

    /// Coefficient mass of the modes that depend on coordinates past `m_cut`;
    /// bounds `sup |F(alpha) - F(P alpha)|` where `P` zeroes those coordinates.
    pub fn chi_m(&self, m_cut: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.k.iter().skip(m_cut).any(|v| *v != 0))
            .map(|t| t.c.abs() + t.s.abs())
            .sum()
    }

    /// Merges `k` with `-k` and drops vanishing modes. Returns the constant
    /// part and the oscillating modes in canonical sign (first nonzero entry positive).
    pub fn modes(&self) -> (f64, Vec<Mode>) {
        let mut c0 = 0.0;
        let mut map: BTreeMap<Vec<i64>, (f64, f64)> = BTreeMap::new();
        for t in &self.terms {
            match t.k.iter().find(|v| **v != 0) {
                None => c0 += t.c,
                Some(first) => {
                    if *first > 0 {
                        let e = map.entry(t.k.clone()).or_insert((0.0, 0.0));
                        e.0 += t.c;
                        e.1 += t.s;
                    } else {
                        let neg: Vec<i64> = t.k.iter().map(|v| -v).collect();
                        let e = map.entry(neg).or_insert((0.0, 0.0));
                        e.0 += t.c;
                        e.1 -= t.s;
                    }
                }
            }
        }
        let modes = map
            .into_iter()
            .filter(|(_, (c, s))| *c != 0.0 || *s != 0.0)
            .map(|(k, (c, s))| Mode { k, c, s })
            .collect();
        (c0, modes)
    }

    /// Extreme values over `T^m`.
    pub fn extrema(&self, sampler: &SupSampler) -> Extrema {
        let (c0, modes) = self.modes();
        if modes.is_empty() {
            return Extrema {
                min: c0,
                max: c0,
                exact: true,
                resolution: 0,
            };
        }
        if sampler.exact_when_independent && independent(&modes, self.m) {
            let r: f64 = modes.iter().map(Mode::amplitude).sum();
            return Extrema {
                min: c0 - r,
                max: c0 + r,
                exact: true,
                resolution: 0,
            };
        }
        let res = capped_resolution(self.m, sampler.resolution, sampler.max_points);
        let pts = torus_lattice(self.m, res);
        let vals: Vec<f64> = pts.par_iter().map(|a| self.eval(a)).collect();
        let (mut imin, mut imax) = (0, 0);
        for (i, v) in vals.iter().enumerate() {
            if *v < vals[imin] {
                imin = i;
            }
            if *v > vals[imax] {
                imax = i;
            }
        }
        let (mut min, mut max) = (vals[imin], vals[imax]);
        if sampler.refine {
            let h = 1.0 / res as f64;
            min = min.min(self.polish(&pts[imin], h, 1.0));
            max = max.max(-self.polish(&pts[imax], h, -1.0));
        }
        Extrema {
            min,
            max,
            exact: false,
            resolution: res,
        }
    }

    /// Coordinate-wise golden-section minimization of `sign * F` near `start`.
    fn polish(&self, start: &[f64], h: f64, sign: f64) -> f64 {
        let mut a = start.to_vec();
        let mut best = sign * self.eval(&a);
        for _ in 0..2 {
            for i in 0..self.m {
                let mut trial = a.clone();
                let (t, v) = golden_min(a[i] - h, a[i] + h, 48, |t| {
                    trial[i] = t;
                    sign * self.eval(&trial)
                });
                if v < best {
                    best = v;
                    a[i] = t;
                }
            }
        }
        best
    }

    /// True when the oscillating modes have linearly independent frequencies,
    /// so that all phases can be matched at once.
    pub fn has_independent_modes(&self) -> bool {
        independent(&self.modes().1, self.m)
    }

    pub fn sup_abs(&self, sampler: &SupSampler) -> f64 {
        self.extrema(sampler).sup_abs()
    }
}

/// Linear independence of the mode frequencies over the reals.
fn independent(modes: &[Mode], m: usize) -> bool {
    if modes.len() > m {
        return false;
    }
    let mut rows: Vec<Vec<f64>> = modes
        .iter()
        .map(|md| md.k.iter().map(|v| *v as f64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m {
        let piv =
            (rank..rows.len()).max_by(|a, b| rows[*a][col].abs().total_cmp(&rows[*b][col].abs()));
        let Some(p) = piv else { break };
        if rows[p][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                for c in 0..m {
                    rows[r][c] -= f * rows[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank == modes.len()
}
