//! Lattice scans on the torus `T^m` and on balls `B_R ⊂ R^d`.
//!
//! Suprema over `y ∈ R^d` of quantities that depend on `y` only through
//! `M y mod 1` are taken over a uniform lattice on `T^m`; this is legitimate
//! when the orbit `{M y}` is dense. Infima over `z ∈ B_R` use a coarse lattice
//! of fixed step followed by golden-section polishing of the promising cells.

use crate::field::WindingMatrix;

/// Distance from `a` to the nearest integer, in `[0, 1/2]`.
#[inline]
pub fn circ(a: f64) -> f64 {
    (a - a.round()).abs()
}

/// `max_i circ(a_i - b_i)`: the max-norm distance on the torus.
#[inline]
pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| circ(x - y))
        .fold(0.0, f64::max)
}

/// Calls `f` for every `z ∈ Z^m` with `|z|_inf <= radius`, first coordinate slowest.
pub fn for_each_int_point(m: usize, radius: i64, mut f: impl FnMut(&[i64])) {
    let mut z = vec![-radius; m];
    loop {
        f(&z);
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if z[i] < radius {
                z[i] += 1;
                break;
            }
            z[i] = -radius;
        }
    }
}

/// Uniform lattice `{j / res}` on `T^m` with `res` points per dimension.
pub fn torus_lattice(m: usize, res: usize) -> Vec<Vec<f64>> {
    let total = res.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; m];
            for v in p.iter_mut().rev() {
                *v = (idx % res) as f64 / res as f64;
                idx /= res;
            }
            p
        })
        .collect()
}

/// Largest per-dimension resolution `<= res` with `res^m <= max_points`.
pub fn capped_resolution(m: usize, res: usize, max_points: usize) -> usize {
    let mut r = res.max(1);
    while r > 2 && (r as f64).powi(m as i32) > max_points as f64 {
        r -= 1;
    }
    r
}

/// Minimizes a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_min(
    mut a: f64,
    mut b: f64,
    iters: usize,
    mut f: impl FnMut(f64) -> f64,
) -> (f64, f64) {
    const INV: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV * (b - a);
    let mut d = a + INV * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// A point `z ∈ B_R` together with its lift `M z` (not reduced).
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    pub z: Vec<f64>,
    pub lift: Vec<f64>,
}

/// Coarse lattice `{j * step : |j * step| <= R}` in `B_R`.
///
/// The step is independent of `R` (a power of two), so lattices for nested
/// radii are nested and the coarse infimum is monotone in `R`.
#[derive(Debug, Clone)]
pub struct BallLattice {
    pub radius: f64,
    pub step: f64,
    pub per_dim: usize,
    zs: Vec<f64>,
    lifts: Vec<f64>,
    winding: WindingMatrix,
}

/// Upper limit on the number of cells polished for one query.
const MAX_POLISHED: usize = 4096;

impl BallLattice {
    /// Builds the lattice with step `2^-p <= 1 / (oversample * Lip(M))`, coarsened
    /// by powers of two until at most `max_points` points remain.
    pub fn new(winding: &WindingMatrix, radius: f64, oversample: f64, max_points: usize) -> Self {
        let d = winding.phys_dim();
        let lip = winding.lipschitz().max(1e-12);
        let mut step = 2f64.powi(-((oversample * lip).log2().ceil() as i32));
        loop {
            let j = (radius / step).floor() as i64;
            let count = ((2 * j + 1) as f64).powi(d as i32);
            if count <= max_points as f64 || j == 0 {
                break;
            }
            step *= 2.0;
        }
        Self::with_step(winding, radius, step)
    }

    pub fn with_step(winding: &WindingMatrix, radius: f64, step: f64) -> Self {
        let d = winding.phys_dim();
        let j = (radius / step).floor() as i64;
        let mut zs = Vec::new();
        let mut lifts = Vec::new();
        for_each_int_point(d, j, |idx| {
            let z: Vec<f64> = idx.iter().map(|v| *v as f64 * step).collect();
            if z.iter().map(|v| v * v).sum::<f64>() <= radius * radius * (1.0 + 1e-12) {
                lifts.extend(winding.apply(&z));
                zs.extend(z);
            }
        });
        Self {
            radius,
            step,
            per_dim: (2 * j + 1) as usize,
            zs,
            lifts,
            winding: winding.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.zs.len() / self.winding.phys_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }

    pub fn point(&self, i: usize) -> BallPoint {
        let (d, m) = (self.winding.phys_dim(), self.winding.torus_dim());
        BallPoint {
            z: self.zs[i * d..(i + 1) * d].to_vec(),
            lift: self.lifts[i * m..(i + 1) * m].to_vec(),
        }
    }

    /// Largest possible drop of the objective inside one polish cell.
    fn slack(&self) -> f64 {
        let d = self.winding.phys_dim() as f64;
        self.winding.lipschitz() * self.step * d.sqrt()
    }

    /// Golden-section polish of `dist(beta, M z)` inside the lattice cell of `start`.
    fn polish(&self, beta: &[f64], start: &BallPoint) -> (f64, BallPoint) {
        self.polish_with(start, |lift| torus_dist(beta, lift))
    }

    /// Coordinate-wise golden-section minimization of `objective(M z)` over
    /// the cell `|z_i - start_i| <= step` intersected with `B_R`.
    pub fn polish_with(
        &self,
        start: &BallPoint,
        mut objective: impl FnMut(&[f64]) -> f64,
    ) -> (f64, BallPoint) {
        let d = start.z.len();
        let r2 = self.radius * self.radius;
        let mut z = start.z.clone();
        let mut lift = start.lift.clone();
        let mut val = objective(&lift);
        let sweeps = if d == 1 { 1 } else { 3 };
        let mut trial = vec![0.0; lift.len()];
        let mut zt = z.clone();
        for _ in 0..sweeps {
            for i in 0..d {
                let others: f64 = z
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, v)| v * v)
                    .sum();
                let reach = (r2 - others).max(0.0).sqrt();
                let lo = (start.z[i] - self.step).max(-reach);
                let hi = (start.z[i] + self.step).min(reach);
                if hi <= lo {
                    continue;
                }
                zt.copy_from_slice(&z);
                let (t, v) = golden_min(lo, hi, 56, |t| {
                    zt[i] = t;
                    self.winding.apply_into(&zt, &mut trial);
                    objective(&trial)
                });
                if v < val {
                    val = v;
                    z[i] = t;
                    self.winding.apply_into(&z, &mut lift);
                }
            }
        }
        (val, BallPoint { z, lift })
    }

    /// Lifts of the coarse points, `m` numbers per point.
    pub fn lifts(&self) -> &[f64] {
        &self.lifts
    }

    /// Approximate `inf_{z ∈ B_R} dist(beta, M z)` with its minimizer.
    pub fn nearest(&self, beta: &[f64], refine: bool) -> (f64, BallPoint) {
        self.candidates(beta, 1, refine)
            .into_iter()
            .next()
            .expect("lattice contains the origin")
    }

    /// Up to `count` candidate minimizers of `z -> dist(beta, M z)`, best first.
    ///
    /// Cells are polished in order of their coarse value until the coarse lower
    /// bound `value - slack` exceeds the best polished value, so the first
    /// entry is the refined infimum over the whole ball.
    pub fn candidates(&self, beta: &[f64], count: usize, refine: bool) -> Vec<(f64, BallPoint)> {
        let m = self.winding.torus_dim();
        let count = count.max(1);
        let slack = if refine { self.slack() } else { 0.0 };
        let dists: Vec<f64> = self
            .lifts
            .chunks_exact(m)
            .map(|l| torus_dist(beta, l))
            .collect();
        let coarse_best = dists.iter().copied().fold(f64::INFINITY, f64::min);
        let mut ranked: Vec<(f64, usize)> = dists
            .iter()
            .enumerate()
            .filter(|(_, v)| **v <= coarse_best + slack)
            .map(|(i, v)| (*v, i))
            .collect();
        if ranked.len() < count {
            ranked = dists.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        }
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out: Vec<(f64, BallPoint)> = Vec::new();
        let mut best = f64::INFINITY;
        for &(v, i) in &ranked {
            if out.len() >= count && (v - slack >= best || out.len() >= MAX_POLISHED) {
                break;
            }
            let p = self.point(i);
            let entry = if refine {
                let (pv, pp) = self.polish(beta, &p);
                if pv <= v {
                    (pv, pp)
                } else {
                    (v, p)
                }
            } else {
                (v, p)
            };
            best = best.min(entry.0);
            out.push(entry);
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.truncate(count);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circ_folds_to_half() {
        assert_eq!(circ(0.25), 0.25);
        assert_eq!(circ(0.75), 0.25);
        assert_eq!(circ(-1.2).to_bits(), circ(0.8).to_bits());
        assert!(circ(3.5) <= 0.5);
    }

    #[test]
    fn int_points_count() {
        let mut n = 0;
        for_each_int_point(3, 2, |_| n += 1);
        assert_eq!(n, 125);
    }

    #[test]
    fn torus_lattice_layout() {
        let pts = torus_lattice(2, 4);
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[1], vec![0.0, 0.25]);
        assert_eq!(pts[4], vec![0.25, 0.0]);
    }

    #[test]
    fn golden_finds_vertex() {
        let (x, v) = golden_min(-1.0, 2.0, 80, |t| (t - 0.3).abs());
        assert!((x - 0.3).abs() < 1e-12 && v < 1e-12);
    }

    #[test]
    fn nested_lattices() {
        let m = WindingMatrix::golden();
        let a = BallLattice::new(&m, 4.0, 8.0, 1 << 20);
        let b = BallLattice::new(&m, 8.0, 8.0, 1 << 20);
        assert_eq!(a.step, b.step);
        let bz: Vec<BallPoint> = (0..b.len()).map(|i| b.point(i)).collect();
        assert!((0..a.len()).all(|i| bz.contains(&a.point(i))));
    }

    #[test]
    fn nearest_polishes_to_exact_hit() {
        let m = WindingMatrix::identity(1);
        let lat = BallLattice::new(&m, 2.0, 8.0, 1 << 20);
        let (v, p) = lat.nearest(&[0.123456789], true);
        assert!(v < 1e-9, "{v}");
        assert!(circ(p.z[0] - 0.123456789) < 1e-9);
    }
}
