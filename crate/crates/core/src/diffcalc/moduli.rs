use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffcalc::partitions::{partition_families_with_limit, set_partitions, FAMILY_LIMIT};
use crate::diffcalc::{apply_pairs, TranslationTuple};
use crate::error::{invalid, Error, Result};
use crate::estimate::{Direction, EstimateKind, RhoEstimate};
use crate::field::lattice::{capped_resolution, torus_lattice, BallLattice, BallPoint};
use crate::field::{QuasiField, SupSampler, TrigPolynomial};

/// Knobs for the nested sup/inf searches.
///
/// Cost model: a `k`-fold search visits about `(n_beta * z_candidates)^k`
/// leaves, where `n_beta = n_y_nested^m`; `budget` caps that count (weighted
/// by the cost of one sup norm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusConfig {
    pub sup: SupSampler,
    /// Torus points per dimension for the outer sup when `k = 1`.
    pub n_y: usize,
    /// Torus points per dimension for every sup when `k >= 2`.
    pub n_y_nested: usize,
    pub max_y_points: usize,
    /// `B_R` lattice step is the largest power of two below `1 / (oversample Lip(M))`.
    pub oversample: f64,
    pub max_z_points: usize,
    /// Candidate minimizers kept per torus point when `k >= 2`.
    pub z_candidates: usize,
    /// Candidates for `k = 1` when the exhaustive scan is unavailable.
    pub k1_candidates: usize,
    pub max_k: usize,
    pub budget: f64,
    /// Midpoint rule points per dimension on the box around `B_1`.
    pub quad_points: usize,
    /// Torus points per dimension for the sup over ball centres.
    pub n_shift: usize,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        Self {
            sup: SupSampler::default(),
            n_y: 64,
            n_y_nested: 8,
            max_y_points: 1 << 16,
            oversample: 8.0,
            max_z_points: 1 << 18,
            z_candidates: 4,
            k1_candidates: 32,
            max_k: 4,
            budget: 2e9,
            quad_points: 32,
            n_shift: 16,
        }
    }
}

struct Component {
    poly: TrigPolynomial,
    /// `(k, amplitude)` of the merged modes.
    modes: Vec<(Vec<i64>, f64)>,
    exact: bool,
}

/// Sup norms of iterated differences `Delta_{(delta_1, 0)} ... f` written in
/// terms of torus offsets.
///
/// When a component has linearly independent frequencies the norm is the
/// closed form `sum_j r_j prod_i |sin(pi k_j . delta_i)|`; otherwise the
/// difference polynomial is built and its sup sampled, with resolution doubled
/// per difference order.
pub struct DeltaNorms {
    comps: Vec<Component>,
    sampler: SupSampler,
}

impl DeltaNorms {
    pub fn new(f: &QuasiField, sampler: &SupSampler) -> Self {
        let comps = f
            .components()
            .iter()
            .map(|p| {
                let modes: Vec<(Vec<i64>, f64)> = p
                    .modes()
                    .1
                    .into_iter()
                    .map(|md| {
                        let r = md.amplitude();
                        (md.k, r)
                    })
                    .collect();
                Component {
                    poly: p.clone(),
                    exact: sampler.exact_when_independent && p.has_independent_modes(),
                    modes,
                }
            })
            .collect();
        Self {
            comps,
            sampler: sampler.clone(),
        }
    }

    /// True when every component uses the closed form.
    pub fn is_exact(&self) -> bool {
        self.comps.iter().all(|c| c.exact)
    }

    /// Rough cost of one norm evaluation in trigonometric evaluations.
    pub fn cost(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| {
                if c.exact {
                    c.modes.len().max(1) as f64
                } else {
                    let m = c.poly.torus_dim();
                    let res =
                        capped_resolution(m, self.sampler.resolution, self.sampler.max_points);
                    (res as f64).powi(m as i32) * c.poly.terms().len().max(1) as f64
                }
            })
            .sum()
    }

    /// Lipschitz constant of `z -> ||Delta_{(beta - M z, 0)} f||` in the Euclidean norm of `z`.
    fn lipschitz(&self, f: &QuasiField) -> f64 {
        self.comps
            .iter()
            .map(|c| {
                c.modes
                    .iter()
                    .map(|(k, r)| {
                        let xi = f.winding().frequency(k);
                        r * PI * xi.iter().map(|v| v * v).sum::<f64>().sqrt()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// In `d = 1`, when a single component varies and its norm is in closed
    /// form, `z -> ||Delta_{(beta - M z, 0)} f||` is a sum of `r |sin(pi (k.beta - xi z))|`,
    /// concave between consecutive zeros, so its minimum over an interval sits
    /// at a zero or an endpoint. Returns the `(k, xi = M^t k)` pairs locating those zeros.
    fn kink_frequencies(&self, f: &QuasiField) -> Option<Vec<(Vec<i64>, f64)>> {
        if f.phys_dim() != 1 || !self.is_exact() {
            return None;
        }
        let varying: Vec<&Component> = self.comps.iter().filter(|c| !c.modes.is_empty()).collect();
        if varying.len() > 1 {
            return None;
        }
        Some(
            varying
                .first()
                .map(|c| {
                    c.modes
                        .iter()
                        .map(|(k, _)| (k.clone(), f.winding().frequency(k)[0]))
                        .filter(|(_, xi)| *xi != 0.0)
                        .collect()
                })
                .unwrap_or_default(),
        )
    }

    /// Norm of the difference over the offsets whose bits are set in `mask`.
    /// The empty difference has norm 1 by convention.
    pub fn norm_mask(&self, deltas: &[Vec<f64>], mask: u32) -> f64 {
        if mask == 0 {
            return 1.0;
        }
        let sel: Vec<&[f64]> = deltas
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, d)| d.as_slice())
            .collect();
        self.norm(&sel)
    }

    pub fn norm(&self, deltas: &[&[f64]]) -> f64 {
        if deltas.is_empty() {
            return 1.0;
        }
        let order = deltas.len();
        self.comps
            .iter()
            .map(|c| {
                if c.exact {
                    c.modes
                        .iter()
                        .map(|(k, r)| {
                            r * deltas
                                .iter()
                                .map(|d| {
                                    let dot: f64 =
                                        k.iter().zip(d.iter()).map(|(a, b)| *a as f64 * b).sum();
                                    (PI * dot).sin().abs()
                                })
                                .product::<f64>()
                        })
                        .sum::<f64>()
                } else {
                    let zero = vec![0.0; c.poly.torus_dim()];
                    let p = deltas
                        .iter()
                        .fold(c.poly.clone(), |acc, d| acc.difference(d, &zero));
                    p.sup_abs(&self.sampler.doubled(order - 1))
                }
            })
            .fold(0.0, f64::max)
    }
}

fn check_k(k: usize, limit: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if k > limit {
        return Err(Error::Guard {
            what: "difference order k",
            value: k as f64,
            limit: limit as f64,
        });
    }
    Ok(())
}

fn check_tuple(f: &QuasiField, t: &TranslationTuple) -> Result<()> {
    if t.pairs()[0].0.len() != f.phys_dim() {
        return Err(invalid("translation dimension does not match field"));
    }
    Ok(())
}

/// Norms of all sub-differences, indexed by subset mask.
fn subset_norms(norms: &DeltaNorms, deltas: &[Vec<f64>]) -> Vec<f64> {
    (0..1u32 << deltas.len())
        .map(|mask| norms.norm_mask(deltas, mask))
        .collect()
}

fn g_from_table(table: &[f64], blocks: &[Vec<u32>]) -> f64 {
    blocks
        .iter()
        .map(|p| p.iter().map(|b| table[*b as usize]).product::<f64>())
        .fold(0.0, f64::max)
}

/// `G_k(f, T)`: the largest product `prod_j ||Delta_{zeta^j(T)} f||` over the
/// families `(zeta^1, ..., zeta^k)` that split `{1..k}` into disjoint blocks.
///
/// Only set partitions enter, which reproduces the two- and three-fold
/// maxima written out term by term (for `k = 2`: `max(||D2 D1 f||, ||D1 f|| ||D2 f||)`).
/// See [`g_k_all_families`] for the maximum over every family of sizes summing to `k`.
pub fn g_k(f: &QuasiField, t: &TranslationTuple, sampler: &SupSampler) -> Result<f64> {
    check_tuple(f, t)?;
    check_k(t.k(), FAMILY_LIMIT)?;
    let norms = DeltaNorms::new(f, sampler);
    let table = subset_norms(&norms, &t.offsets(f));
    Ok(g_from_table(&table, &set_partitions(t.k())))
}

/// Maximum of the same products over every family in
/// [`partition_families`](crate::diffcalc::partition_families), overlapping
/// blocks included.
pub fn g_k_all_families(f: &QuasiField, t: &TranslationTuple, sampler: &SupSampler) -> Result<f64> {
    check_tuple(f, t)?;
    let families = partition_families_with_limit(t.k(), FAMILY_LIMIT)?;
    let norms = DeltaNorms::new(f, sampler);
    let table = subset_norms(&norms, &t.offsets(f));
    Ok(families
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|p| table[p.mask() as usize])
                .product::<f64>()
        })
        .fold(0.0, f64::max))
}

/// The recursion
/// `F_j(T_j) = ||Delta_{T_j} f|| + sum_{m<j} sum_{zeta in P_{m,j}} ||Delta_{zeta^c(T_j)} f|| F_m(zeta(T_j))`,
/// `F_1 = ||Delta_{y_1 z_1} f||`, evaluated on the full tuple.
pub fn f_k(f: &QuasiField, t: &TranslationTuple, sampler: &SupSampler) -> Result<f64> {
    check_tuple(f, t)?;
    check_k(t.k(), FAMILY_LIMIT)?;
    let norms = DeltaNorms::new(f, sampler);
    let table = subset_norms(&norms, &t.offsets(f));
    let k = t.k();
    let full = (1u32 << k) - 1;
    // fk[S] = F_{|S|}(S(T)), subsets ordered by increasing mask so sub-masks come first.
    let mut fk = vec![0.0; 1 << k];
    for s in 1..=full {
        let j = s.count_ones();
        let mut v = table[s as usize];
        if j > 1 {
            let mut sub = (s - 1) & s;
            while sub > 0 {
                v += table[(s & !sub) as usize] * fk[sub as usize];
                sub = (sub - 1) & s;
            }
        }
        fk[s as usize] = v;
    }
    Ok(fk[full as usize])
}

/// Midpoint rule for `int_{B_1(z')} |g|` with the sup over `z'` taken on a torus lattice.
pub struct OmegaQuadrature {
    offsets: Vec<Vec<f64>>,
    weight: f64,
    shifts: Vec<Vec<f64>>,
    pub res_shift: usize,
}

impl OmegaQuadrature {
    pub fn new(
        f: &QuasiField,
        quad_points: usize,
        n_shift: usize,
        max_shift_points: usize,
    ) -> Self {
        let d = f.phys_dim();
        let h = 2.0 / quad_points as f64;
        let mut offsets = Vec::new();
        let total = quad_points.pow(d as u32);
        for mut idx in 0..total {
            let mut x = vec![0.0; d];
            for v in x.iter_mut().rev() {
                *v = -1.0 + (idx % quad_points) as f64 * h + h / 2.0;
                idx /= quad_points;
            }
            if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                offsets.push(f.winding().apply(&x));
            }
        }
        let m = f.winding().torus_dim();
        let res_shift = capped_resolution(m, n_shift, max_shift_points);
        Self {
            offsets,
            weight: h.powi(d as i32),
            shifts: torus_lattice(m, res_shift),
            res_shift,
        }
    }

    /// Total quadrature weight, the discrete volume of `B_1`.
    pub fn volume(&self) -> f64 {
        self.weight * self.offsets.len() as f64
    }

    /// `sup_{z'} int_{B_1(z')} max_i |g_i|` for a vector of torus polynomials.
    pub fn sup_l1(&self, comps: &[TrigPolynomial]) -> f64 {
        let m = self.shifts.first().map_or(0, Vec::len);
        let mut alpha = vec![0.0; m];
        let mut best: f64 = 0.0;
        for s in &self.shifts {
            let mut acc = 0.0;
            for off in &self.offsets {
                for (a, (x, y)) in alpha.iter_mut().zip(s.iter().zip(off)) {
                    *a = x + y;
                }
                acc += comps
                    .iter()
                    .map(|c| c.eval(&alpha).abs())
                    .fold(0.0, f64::max);
            }
            best = best.max(acc * self.weight);
        }
        best
    }
}

fn difference_offsets(f: &QuasiField, deltas: &[Vec<f64>]) -> Vec<TrigPolynomial> {
    let zero = vec![0.0; f.winding().torus_dim()];
    f.components()
        .iter()
        .map(|c| {
            deltas
                .iter()
                .fold(c.clone(), |acc, d| acc.difference(d, &zero))
        })
        .collect()
}

/// `omega(f, T) = sup_{z'} int_{B_1(z')} |Delta_T f|`.
pub fn omega(f: &QuasiField, t: &TranslationTuple, cfg: &ModulusConfig) -> Result<f64> {
    check_tuple(f, t)?;
    let quad = OmegaQuadrature::new(f, cfg.quad_points, cfg.n_shift, cfg.max_y_points);
    let d = apply_pairs(f, t.pairs());
    Ok(quad.sup_l1(d.components()))
}

/// `sup_{z'} ||f||_{L^1(B_1(z'))}`.
pub fn ball_l1_sup(f: &QuasiField, cfg: &ModulusConfig) -> f64 {
    OmegaQuadrature::new(f, cfg.quad_points, cfg.n_shift, cfg.max_y_points).sup_l1(f.components())
}

enum Leaf<'a> {
    G {
        norms: &'a DeltaNorms,
        blocks: Vec<Vec<u32>>,
    },
    Omega {
        field: &'a QuasiField,
        quad: &'a OmegaQuadrature,
    },
}

/// Alternating `sup_beta inf_delta` search with alpha-beta pruning. Candidate
/// offsets for each torus point are fixed in advance, so every level shares them.
struct Nested<'a> {
    k: usize,
    leaf: Leaf<'a>,
    cands: &'a [Vec<Vec<f64>>],
    deltas: Vec<Vec<f64>>,
    table: Vec<f64>,
}

impl Nested<'_> {
    fn set(&mut self, level: usize, delta: &[f64]) {
        self.deltas[level].clear();
        self.deltas[level].extend_from_slice(delta);
        if let Leaf::G { norms, .. } = &self.leaf {
            let bit = 1u32 << level;
            for sub in 0..bit {
                let mask = bit | sub;
                self.table[mask as usize] = norms.norm_mask(&self.deltas[..=level], mask);
            }
        }
    }

    fn leaf_value(&self) -> f64 {
        match &self.leaf {
            Leaf::G { blocks, .. } => g_from_table(&self.table, blocks),
            Leaf::Omega { field, quad } => quad.sup_l1(&difference_offsets(field, &self.deltas)),
        }
    }

    fn sup_level(&mut self, level: usize, ceiling: f64) -> f64 {
        let mut best: f64 = 0.0;
        for bi in 0..self.cands.len() {
            best = best.max(self.inf_level(level, bi, best));
            if best >= ceiling {
                break;
            }
        }
        best
    }

    fn inf_level(&mut self, level: usize, bi: usize, floor: f64) -> f64 {
        let mut low = f64::INFINITY;
        for ci in 0..self.cands[bi].len() {
            let delta = self.cands[bi][ci].clone();
            self.set(level, &delta);
            let v = if level + 1 == self.k {
                self.leaf_value()
            } else {
                self.sup_level(level + 1, low)
            };
            low = low.min(v);
            if low <= floor {
                break;
            }
        }
        low
    }
}

fn offset(beta: &[f64], lift: &[f64]) -> Vec<f64> {
    beta.iter().zip(lift).map(|(b, l)| b - l).collect()
}

/// Candidate offsets `beta - M z` per torus point, from the nearest lifts of `B_R`.
fn candidate_offsets(
    lattice: &BallLattice,
    betas: &[Vec<f64>],
    count: usize,
) -> Vec<Vec<Vec<f64>>> {
    betas
        .par_iter()
        .map(|b| {
            lattice
                .candidates(b, count, true)
                .into_iter()
                .map(|(_, p)| offset(b, &p.lift))
                .collect()
        })
        .collect()
}

fn validate_search(f: &QuasiField, radius: f64, k: usize, cfg: &ModulusConfig) -> Result<()> {
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(invalid(format!("R must be >= 1, got {radius}")));
    }
    check_k(k, cfg.max_k)?;
    if cfg.n_y < 2 || cfg.n_y_nested < 2 || cfg.z_candidates == 0 {
        return Err(invalid(
            "sampling resolutions must be at least 2 and candidates at least 1",
        ));
    }
    f.winding()
        .check_resonance(f.winding().default_resonance_radius())
}

fn estimate(
    kind: EstimateKind,
    k: usize,
    radius: f64,
    value: f64,
    res_y: usize,
    res_z: usize,
) -> RhoEstimate {
    RhoEstimate {
        kind,
        k,
        radius,
        value,
        res_y,
        res_z,
        direction: Direction::TwoSidedUnresolved,
        argmin_k: None,
    }
}

/// `k = 1`: `sup_beta inf_z ||Delta_{(beta - M z, 0)} f||`.
fn rho_1(
    f: &QuasiField,
    norms: &DeltaNorms,
    lattice: &BallLattice,
    cfg: &ModulusConfig,
) -> (f64, usize, Direction) {
    let m = f.winding().torus_dim();
    let res = capped_resolution(m, cfg.n_y, cfg.max_y_points);
    let betas = torus_lattice(m, res);
    let h = |b: &[f64], lift: &[f64]| norms.norm(&[&offset(b, lift)]);
    if let Some(kinks) = norms.kink_frequencies(f) {
        let radius = lattice.radius;
        let value = betas
            .par_iter()
            .map(|b| {
                let at = |z: f64| h(b, &f.winding().apply(&[z]));
                let mut best = at(-radius).min(at(radius));
                for (k, xi) in &kinks {
                    let phase: f64 = k.iter().zip(b).map(|(a, c)| *a as f64 * c).sum();
                    let (lo, hi) = (
                        (phase - xi * radius).min(phase + xi * radius),
                        (phase - xi * radius).max(phase + xi * radius),
                    );
                    for n in (lo.ceil() as i64)..=(hi.floor() as i64) {
                        best = best.min(at((phase - n as f64) / xi));
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max);
        return (value, res, Direction::LowerBound);
    }
    let value = if norms.is_exact() {
        // Exhaustive coarse scan, then polish cells whose lower bound can still win.
        let slack = norms.lipschitz(f) * lattice.step * (f.phys_dim() as f64).sqrt();
        betas
            .par_iter()
            .map(|b| {
                let vals: Vec<f64> = lattice.lifts().chunks_exact(m).map(|l| h(b, l)).collect();
                let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let mut ranked: Vec<(f64, usize)> = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v < best + slack)
                    .map(|(i, v)| (*v, i))
                    .collect();
                ranked.sort_by(|a, c| a.0.total_cmp(&c.0).then(a.1.cmp(&c.1)));
                for &(v, i) in ranked.iter().take(256) {
                    if v - slack >= best {
                        break;
                    }
                    let (pv, _) = lattice.polish_with(&lattice.point(i), |lift| h(b, lift));
                    best = best.min(pv);
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    } else {
        betas
            .par_iter()
            .map(|b| {
                let mut scored: Vec<(f64, BallPoint)> = lattice
                    .candidates(b, cfg.k1_candidates, true)
                    .into_iter()
                    .map(|(_, p)| (h(b, &p.lift), p))
                    .collect();
                scored.sort_by(|a, c| a.0.total_cmp(&c.0));
                scored
                    .iter()
                    .take(2)
                    .map(|(_, p)| lattice.polish_with(p, |lift| h(b, lift)).0)
                    .fold(scored[0].0, f64::min)
            })
            .reduce(|| 0.0, f64::max)
    };
    (value, res, Direction::TwoSidedUnresolved)
}

/// Sampled `rho_k(f, R)`: alternating sup over torus points and inf over `z in B_R` of `G_k`.
///
/// Suprema run over torus lattices (lower bounds); infima over candidate
/// minimizers (upper bounds), so the result is two-sided unresolved.
/// For `k = 1` in one dimension with a closed-form norm the inner infimum is
/// exact (the estimate is then a lower bound); with a closed-form norm in higher
/// dimension every coarse point of `B_R` is scanned; otherwise candidates are
/// the `z` whose lifts are nearest the torus point.
pub fn rho_k(f: &QuasiField, radius: f64, k: usize, cfg: &ModulusConfig) -> Result<RhoEstimate> {
    validate_search(f, radius, k, cfg)?;
    crate::work::tick();
    let norms = DeltaNorms::new(f, &cfg.sup);
    let lattice = BallLattice::new(f.winding(), radius, cfg.oversample, cfg.max_z_points);
    let m = f.winding().torus_dim();
    if k == 1 {
        let res = capped_resolution(m, cfg.n_y, cfg.max_y_points);
        let per_beta = if norms.kink_frequencies(f).is_some() {
            4.0 * radius * f.winding().lipschitz() * norms.cost()
        } else if norms.is_exact() {
            lattice.len() as f64
        } else {
            (cfg.k1_candidates + 120) as f64
        };
        let cost = (res as f64).powi(m as i32) * per_beta * norms.cost();
        if cost > cfg.budget {
            return Err(Error::Guard {
                what: "rho_1 search cost",
                value: cost,
                limit: cfg.budget,
            });
        }
        let (value, res, direction) = rho_1(f, &norms, &lattice, cfg);
        let mut est = estimate(EstimateKind::RhoK, 1, radius, value, res, lattice.per_dim);
        est.direction = direction;
        return Ok(est);
    }
    let res = capped_resolution(m, cfg.n_y_nested, cfg.max_y_points);
    let betas = torus_lattice(m, res);
    let leaves = (betas.len() as f64 * cfg.z_candidates as f64).powi(k as i32);
    let cost = leaves * norms.cost() * (1u32 << (k - 1)) as f64;
    if cost > cfg.budget {
        return Err(Error::Guard {
            what: "rho_k search cost",
            value: cost,
            limit: cfg.budget,
        });
    }
    let cands = candidate_offsets(&lattice, &betas, cfg.z_candidates);
    let mut search = Nested {
        k,
        leaf: Leaf::G {
            norms: &norms,
            blocks: set_partitions(k),
        },
        cands: &cands,
        deltas: vec![Vec::with_capacity(m); k],
        table: vec![1.0; 1 << k],
    };
    let value = search.sup_level(0, f64::INFINITY);
    Ok(estimate(
        EstimateKind::RhoK,
        k,
        radius,
        value,
        res,
        lattice.per_dim,
    ))
}

/// `min_{1 <= k <= min(k_max, floor R)} C^k k! rho_k(f, R / k)`, recording the minimizing `k`.
pub fn rho_star(
    f: &QuasiField,
    radius: f64,
    c: f64,
    k_max: usize,
    cfg: &ModulusConfig,
) -> Result<RhoEstimate> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("C must be >= 1, got {c}")));
    }
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(invalid(format!("R must be >= 1, got {radius}")));
    }
    check_k(k_max, cfg.max_k)?;
    crate::work::tick();
    let top = k_max.min(radius.floor() as usize);
    let mut best: Option<RhoEstimate> = None;
    let mut factorial = 1.0;
    for k in 1..=top {
        factorial *= k as f64;
        let r = rho_k(f, radius / k as f64, k, cfg)?;
        let v = c.powi(k as i32) * factorial * r.value;
        if best.as_ref().is_none_or(|b| v < b.value) {
            best = Some(RhoEstimate {
                kind: EstimateKind::RhoStar,
                k: top,
                radius,
                value: v,
                res_y: r.res_y,
                res_z: r.res_z,
                direction: Direction::TwoSidedUnresolved,
                argmin_k: Some(k),
            });
        }
    }
    Ok(best.expect("k = 1 is always admissible"))
}

/// Sampled `omega_k(f, R)` with the leaf `omega(f, T)` by midpoint quadrature.
/// Candidates for every level come from the nearest lifts of `B_R`.
pub fn omega_k(f: &QuasiField, radius: f64, k: usize, cfg: &ModulusConfig) -> Result<RhoEstimate> {
    validate_search(f, radius, k, cfg)?;
    crate::work::tick();
    let m = f.winding().torus_dim();
    let quad = OmegaQuadrature::new(f, cfg.quad_points, cfg.n_shift, cfg.max_y_points);
    let lattice = BallLattice::new(f.winding(), radius, cfg.oversample, cfg.max_z_points);
    let res = capped_resolution(m, cfg.n_y_nested, cfg.max_y_points);
    let betas = torus_lattice(m, res);
    let per_leaf = quad.shifts.len() as f64
        * quad.offsets.len() as f64
        * f.components()
            .iter()
            .map(|c| c.terms().len())
            .sum::<usize>()
            .max(1) as f64;
    let leaves = (betas.len() as f64 * cfg.z_candidates as f64).powi(k as i32);
    if leaves * per_leaf > cfg.budget {
        return Err(Error::Guard {
            what: "omega_k search cost",
            value: leaves * per_leaf,
            limit: cfg.budget,
        });
    }
    let cands = candidate_offsets(&lattice, &betas, cfg.z_candidates);
    let mut search = Nested {
        k,
        leaf: Leaf::Omega {
            field: f,
            quad: &quad,
        },
        cands: &cands,
        deltas: vec![Vec::with_capacity(m); k],
        table: Vec::new(),
    };
    let value = search.sup_level(0, f64::INFINITY);
    Ok(estimate(
        EstimateKind::OmegaK,
        k,
        radius,
        value,
        res,
        lattice.per_dim,
    ))
}
