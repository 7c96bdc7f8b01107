use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::lattice::for_each_int_point;

/// The golden ratio `(1 + sqrt 5) / 2`.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Linear map `M: R^d -> R^m` lifting physical space into the torus `T^m`.
///
/// Stored as `m` rows of `d` entries, so the lift of `x` is `alpha_i = sum_j rows[i][j] x_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingMatrix {
    rows: Vec<Vec<f64>>,
    d: usize,
}

impl WindingMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(invalid("winding matrix needs at least one row"));
        }
        let d = rows[0].len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(invalid(
                "winding matrix rows must have equal, nonzero length",
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("winding matrix has non-finite entries"));
        }
        if m < d {
            return Err(invalid(format!(
                "torus dimension m={m} below physical dimension d={d}"
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let sv = DMatrix::from_row_slice(m, d, &flat).singular_values();
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= 1e-12 {
            return Err(invalid(format!(
                "winding matrix lacks full column rank (smallest singular value {smin:.3e})"
            )));
        }
        Ok(Self { rows, d })
    }

    /// `M = I_d`, the purely periodic case.
    pub fn identity(d: usize) -> Self {
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows, d }
    }

    /// `M = (1, golden)^t`, a one-dimensional quasiperiodic lift into `T^2`.
    pub fn golden() -> Self {
        Self {
            rows: vec![vec![1.0], vec![GOLDEN]],
            d: 1,
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn phys_dim(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Writes `M x` into `out` (no reduction mod 1).
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.torus_dim()];
        self.apply_into(x, &mut out);
        out
    }

    /// `M^t k`: the physical frequency carried by the torus mode `k`.
    pub fn frequency(&self, k: &[i64]) -> Vec<f64> {
        let mut xi = vec![0.0; self.d];
        for (row, &kj) in self.rows.iter().zip(k) {
            for (x, a) in xi.iter_mut().zip(row) {
                *x += a * kj as f64;
            }
        }
        xi
    }

    /// Lipschitz constant of `z -> M z` from the Euclidean norm into the max norm.
    pub fn lipschitz(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    fn norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Zero test for `M^t z` used by the resonance and Diophantine checks.
    pub(crate) fn vanishes(&self, value: f64, z: &[i64]) -> bool {
        let znorm = z.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt();
        value.abs() <= 1e-12 * (1.0 + znorm * self.norm())
    }

    /// Searches `0 < |z|_inf <= radius` for an integer relation `M^t z = 0`.
    /// Such a relation means the orbit `{M x mod 1}` is not dense in `T^m`.
    pub fn check_resonance(&self, radius: i64) -> Result<()> {
        let mut hit: Option<Vec<i64>> = None;
        for_each_int_point(self.torus_dim(), radius, |z| {
            if hit.is_some() || z.iter().all(|v| *v == 0) {
                return;
            }
            let xi = self.frequency(z);
            if xi.iter().all(|v| self.vanishes(*v, z)) {
                hit = Some(z.to_vec());
            }
        });
        match hit {
            Some(z) => Err(Error::Resonant { z }),
            None => Ok(()),
        }
    }

    /// Default search radius for [`check_resonance`](Self::check_resonance),
    /// keeping the scan near a million lattice points.
    pub fn default_resonance_radius(&self) -> i64 {
        let m = self.torus_dim() as f64;
        let r = ((1e6f64.powf(1.0 / m) - 1.0) / 2.0).floor() as i64;
        r.clamp(1, 32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_rank_deficient() {
        assert!(WindingMatrix::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        assert!(WindingMatrix::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(WindingMatrix::new(vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn resonance_detection() {
        let m = WindingMatrix::new(vec![vec![1.0], vec![0.5]]).unwrap();
        match m.check_resonance(4) {
            Err(Error::Resonant { z }) => {
                assert_eq!(z[0] as f64 + 0.5 * z[1] as f64, 0.0);
            }
            other => panic!("expected resonance, got {other:?}"),
        }
        assert!(WindingMatrix::golden().check_resonance(30).is_ok());
        assert!(WindingMatrix::identity(2).check_resonance(10).is_ok());
    }

    #[test]
    fn frequency_is_transpose() {
        let m = WindingMatrix::new(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![0.5, 0.0]]).unwrap();
        assert_eq!(m.frequency(&[1, -1, 2]), vec![1.0 - 3.0 + 1.0, 2.0 - 4.0]);
    }
}
