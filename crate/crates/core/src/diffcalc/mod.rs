//! Difference calculus for quasiperiodic fields: translations, iterated
//! differences, the partition combinatorics behind `G_k` and `F_k`, and
//! sampled searches for the moduli `rho_k`, `rho_*` and `omega_k`.

mod moduli;
mod partitions;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::QuasiField;

pub use crate::estimate::{Direction, EstimateKind, RhoEstimate};
pub use moduli::{
    ball_l1_sup, f_k, g_k, g_k_all_families, omega, omega_k, rho_k, rho_star, DeltaNorms,
    ModulusConfig, OmegaQuadrature,
};
pub use partitions::{
    is_set_partition, partition_families, partition_families_with_limit, partitions,
    set_partitions, PartitionIndex, FAMILY_LIMIT,
};

/// `((y_1, z_1), ..., (y_k, z_k))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationTuple {
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TranslationTuple {
    pub fn new(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(invalid("a translation tuple needs at least one pair"));
        }
        let d = pairs[0].0.len();
        for (y, z) in &pairs {
            if y.len() != d || z.len() != d || d == 0 {
                return Err(invalid(
                    "all translation vectors must share one nonzero dimension",
                ));
            }
            if y.iter().chain(z).any(|v| !v.is_finite()) {
                return Err(invalid("non-finite translation"));
            }
        }
        Ok(Self { pairs })
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.pairs
    }

    /// The sub-tuple `zeta(T)` selected by a subset of `{1..k}`.
    pub fn select(&self, zeta: &PartitionIndex) -> Vec<(Vec<f64>, Vec<f64>)> {
        zeta.zeta()
            .into_iter()
            .map(|i| self.pairs[i - 1].clone())
            .collect()
    }

    /// Torus offsets `M (y_j - z_j)`; every sup norm of an iterated difference
    /// depends on the tuple only through these.
    pub fn offsets(&self, f: &QuasiField) -> Vec<Vec<f64>> {
        self.pairs
            .iter()
            .map(|(y, z)| {
                let dz: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
                f.winding().apply(&dz)
            })
            .collect()
    }
}

/// `x -> (f(x + y) - f(x + z)) / 2`, in closed form.
pub fn difference(f: &QuasiField, y: &[f64], z: &[f64]) -> QuasiField {
    f.difference(y, z)
}

/// `Delta_{y_k z_k} ... Delta_{y_1 z_1} f`, pair 1 applied first.
pub fn iterated_difference(f: &QuasiField, t: &TranslationTuple) -> QuasiField {
    apply_pairs(f, t.pairs())
}

pub(crate) fn apply_pairs(f: &QuasiField, pairs: &[(Vec<f64>, Vec<f64>)]) -> QuasiField {
    pairs
        .iter()
        .fold(f.clone(), |acc, (y, z)| acc.difference(y, z))
}
