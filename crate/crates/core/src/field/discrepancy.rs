use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimate::{Direction, EstimateKind, RhoEstimate};
use crate::field::lattice::{capped_resolution, for_each_int_point, torus_lattice, BallLattice};
use crate::field::WindingMatrix;

/// Result of a finite Diophantine scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub theta: f64,
    /// `min_z min_i |e_i . M^t z| |z|^theta` over the scanned box; an upper bound for `A`.
    pub a_est: f64,
    pub z_max: i64,
    pub argmin_z: Vec<i64>,
}

/// Scans `0 < |z|_inf <= z_max` for the smallest `min_i |e_i . M^t z| |z|^theta`
/// (Euclidean `|z|`).
///
/// A vanishing `M^t z` means the lift is resonant; a single vanishing
/// component means the Diophantine condition fails outright. Both are errors.
pub fn diophantine_constant(
    m: &WindingMatrix,
    theta: f64,
    z_max: i64,
) -> Result<DiophantineReport> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid(format!("theta must be positive, got {theta}")));
    }
    if z_max < 1 {
        return Err(invalid("z_max must be at least 1"));
    }
    let count = ((2 * z_max + 1) as f64).powi(m.torus_dim() as i32);
    if count > 1e8 {
        return Err(Error::Guard {
            what: "diophantine lattice points",
            value: count,
            limit: 1e8,
        });
    }
    crate::work::tick();
    let mut best = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut failure: Option<Error> = None;
    for_each_int_point(m.torus_dim(), z_max, |z| {
        if failure.is_some() || z.iter().all(|v| *v == 0) {
            return;
        }
        let xi = m.frequency(z);
        let zero: Vec<bool> = xi.iter().map(|v| m.vanishes(*v, z)).collect();
        if zero.iter().all(|b| *b) {
            failure = Some(Error::Resonant { z: z.to_vec() });
            return;
        }
        if zero.iter().any(|b| *b) {
            failure = Some(Error::NotDiophantine { z: z.to_vec() });
            return;
        }
        let norm = z.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt();
        let val = xi.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min) * norm.powf(theta);
        if val < best {
            best = val;
            argmin = z.to_vec();
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(DiophantineReport {
        theta,
        a_est: best,
        z_max,
        argmin_z: argmin,
    })
}

/// Sampling knobs for the discrepancy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaConfig {
    /// Torus lattice points per dimension for the outer supremum.
    pub n_y: usize,
    pub max_y_points: usize,
    /// The `B_R` lattice step is the largest power of two below `1 / (oversample Lip(M))`.
    pub oversample: f64,
    pub max_z_points: usize,
    pub refine: bool,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        Self {
            n_y: 64,
            max_y_points: 1 << 16,
            oversample: 8.0,
            max_z_points: 1 << 20,
            refine: true,
        }
    }
}

/// Sampled `sup_y inf_{z in B_R} |M y - M z|` with the distance taken mod 1 in the max norm.
///
/// The sup runs over a torus lattice standing in for the dense orbit `{M y}`.
pub fn sigma(m: &WindingMatrix, radius: f64, cfg: &SigmaConfig) -> Result<RhoEstimate> {
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(invalid(format!("R must be >= 1, got {radius}")));
    }
    if cfg.n_y < 2 {
        return Err(invalid("n_y must be at least 2"));
    }
    crate::work::tick();
    m.check_resonance(m.default_resonance_radius())?;
    let lattice = BallLattice::new(m, radius, cfg.oversample, cfg.max_z_points);
    let res = capped_resolution(m.torus_dim(), cfg.n_y, cfg.max_y_points);
    let betas = torus_lattice(m.torus_dim(), res);
    let value = betas
        .par_iter()
        .map(|b| lattice.nearest(b, cfg.refine).0)
        .reduce(|| 0.0, f64::max);
    Ok(RhoEstimate {
        kind: EstimateKind::Sigma,
        k: 1,
        radius,
        value,
        res_y: res,
        res_z: lattice.per_dim,
        direction: Direction::TwoSidedUnresolved,
        argmin_k: None,
    })
}
