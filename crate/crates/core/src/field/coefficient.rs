use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::lattice::{capped_resolution, torus_lattice};
use crate::field::quasi::QuasiField;
use crate::field::trig::TrigPolynomial;
use crate::field::WindingMatrix;

/// Hölder record `(gamma, K)`: `|a(x) - a(y)| <= K |x - y|^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Holder {
    pub gamma: f64,
    pub k: f64,
}

/// Matrix field `a(x) = shift + F(M x)`, uniformly elliptic with window `[1, Lambda]`.
///
/// Entries are stored row-major. The Hölder and log-decay records are carried
/// for reporting only; trigonometric polynomials satisfy both automatically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    winding: WindingMatrix,
    d: usize,
    entries: Vec<TrigPolynomial>,
    shift: Vec<f64>,
    lambda: f64,
    pub holder: Holder,
    pub kappa: f64,
}

/// Default log-decay exponent recorded for trigonometric polynomials.
pub const DEFAULT_KAPPA: f64 = 3.0;

impl CoefficientField {
    /// Builds and validates the field on a torus lattice (`2^16` points at most).
    pub fn new(
        winding: WindingMatrix,
        entries: Vec<TrigPolynomial>,
        shift: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        let d = winding.phys_dim();
        if entries.len() != d * d || shift.len() != d * d {
            return Err(invalid(format!("expected {} entries for d={d}", d * d)));
        }
        if entries.iter().any(|e| e.torus_dim() != winding.torus_dim()) {
            return Err(invalid(
                "entry torus dimension does not match winding matrix",
            ));
        }
        if !(lambda.is_finite() && lambda >= 1.0) {
            return Err(invalid(format!(
                "Lambda must be finite and >= 1, got {lambda}"
            )));
        }
        if shift.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite shift"));
        }
        let k = entries
            .iter()
            .map(|e| e.derivative_norm_bound(1))
            .fold(0.0, f64::max);
        let field = Self {
            winding,
            d,
            entries,
            shift,
            lambda,
            holder: Holder { gamma: 1.0, k },
            kappa: DEFAULT_KAPPA,
        };
        field.validate(1 << 16)?;
        Ok(field)
    }

    /// Scalar field in `d = 1` (or `f I` in higher dimension).
    pub fn isotropic(winding: WindingMatrix, f: TrigPolynomial, lambda: f64) -> Result<Self> {
        let d = winding.phys_dim();
        let m = winding.torus_dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(if i == j {
                    f.clone()
                } else {
                    TrigPolynomial::zero(m)
                });
            }
        }
        Self::new(winding, entries, vec![0.0; d * d], lambda)
    }

    /// Constant matrix field (row-major), lifted through `M = I_d`.
    pub fn constant(matrix: Vec<f64>, d: usize, lambda: f64) -> Result<Self> {
        let entries = vec![TrigPolynomial::zero(d); d * d];
        Self::new(WindingMatrix::identity(d), entries, matrix, lambda)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn winding(&self) -> &WindingMatrix {
        &self.winding
    }

    pub fn entries(&self) -> &[TrigPolynomial] {
        &self.entries
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// `a(x)` row-major.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let alpha = self.winding.apply(x);
        self.eval_lifted(&alpha)
    }

    /// `shift + F(alpha)` at a torus point.
    pub fn eval_lifted(&self, alpha: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .zip(&self.shift)
            .map(|(e, s)| s + e.eval(alpha))
            .collect()
    }

    /// Entry `(i, j)` as a scalar function of `x`.
    pub fn entry(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let alpha = self.winding.apply(x);
        self.shift[i * self.d + j] + self.entries[i * self.d + j].eval(&alpha)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.d).all(|i| {
            (0..i).all(|j| {
                let (a, b) = (i * self.d + j, j * self.d + i);
                self.entries[a] == self.entries[b] && self.shift[a] == self.shift[b]
            })
        })
    }

    /// True when no entry depends on `x`.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|e| e.modes().1.is_empty())
    }

    /// The entries (shift folded in) as a vector-valued quasiperiodic field.
    pub fn as_quasi(&self) -> QuasiField {
        let comps = self
            .entries
            .iter()
            .zip(&self.shift)
            .map(|(e, s)| e.plus_constant(*s))
            .collect();
        QuasiField::new(self.winding.clone(), comps).expect("dimensions already validated")
    }

    /// `x -> a(x + y)`.
    pub fn translated(&self, y: &[f64]) -> Self {
        let beta = self.winding.apply(y);
        Self {
            entries: self.entries.iter().map(|e| e.translated(&beta)).collect(),
            ..self.clone()
        }
    }

    /// `x -> a(x / s)` for `s > 0`, the field seen at oscillation scale `s`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {s}")));
        }
        let rows = self
            .winding
            .rows()
            .iter()
            .map(|r| r.iter().map(|v| v / s).collect())
            .collect();
        Ok(Self {
            winding: WindingMatrix::new(rows)?,
            ..self.clone()
        })
    }

    /// Symmetric-part eigenvalue range and operator norm of `a` at one point.
    pub fn spectrum(&self, a: &[f64]) -> (f64, f64, f64) {
        let d = self.d;
        if d == 1 {
            return (a[0], a[0], a[0].abs());
        }
        let m = DMatrix::from_row_slice(d, d, a);
        let sym = (&m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let norm = m.singular_values().iter().copied().fold(0.0, f64::max);
        (lo, hi, norm)
    }

    /// Checks `xi.a xi >= |xi|^2` and `|a| <= Lambda` on a torus lattice.
    pub fn validate(&self, max_points: usize) -> Result<()> {
        let m = self.winding.torus_dim();
        let res = if self.is_constant() {
            1
        } else {
            capped_resolution(m, 256, max_points)
        };
        let tol = 1e-12;
        for alpha in torus_lattice(m, res) {
            let a = self.eval_lifted(&alpha);
            let (lo, _, norm) = self.spectrum(&a);
            if lo < 1.0 - tol {
                return Err(Error::NotElliptic(format!(
                    "smallest eigenvalue {lo:.6} < 1 at torus point {alpha:?}"
                )));
            }
            if norm > self.lambda + tol {
                return Err(Error::NotElliptic(format!(
                    "norm {norm:.6} exceeds Lambda = {} at torus point {alpha:?}",
                    self.lambda
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::trig::TrigTerm;
    use crate::field::GOLDEN;

    #[test]
    fn identity_constant_field() {
        let a = CoefficientField::constant(vec![1.0, 0.0, 0.0, 1.0], 2, 1.0).unwrap();
        assert_eq!(a.eval(&[3.7, -1.1]), vec![1.0, 0.0, 0.0, 1.0]);
        assert!(a.is_constant() && a.is_symmetric());
    }

    #[test]
    fn cosine_field_at_origin() {
        let f = TrigPolynomial::cosine(vec![1], 1.0).plus_constant(2.0);
        let a = CoefficientField::isotropic(WindingMatrix::identity(1), f, 3.0).unwrap();
        assert_eq!(a.eval(&[0.0]), vec![3.0]);
    }

    #[test]
    fn golden_field_value() {
        let f = TrigPolynomial::new(
            2,
            vec![
                TrigTerm {
                    k: vec![0, 0],
                    c: 2.5,
                    s: 0.0,
                },
                TrigTerm {
                    k: vec![1, 0],
                    c: 0.5,
                    s: 0.0,
                },
                TrigTerm {
                    k: vec![0, 1],
                    c: 0.5,
                    s: 0.0,
                },
            ],
        )
        .unwrap();
        let a = CoefficientField::isotropic(WindingMatrix::golden(), f, 3.5).unwrap();
        assert!((a.eval(&[1.0])[0] - 2.631_315_560_960_84).abs() < 1e-13);
        assert!((GOLDEN - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_elliptic() {
        let f = TrigPolynomial::cosine(vec![1], 1.0).plus_constant(1.5);
        assert!(matches!(
            CoefficientField::isotropic(WindingMatrix::identity(1), f.clone(), 3.0),
            Err(Error::NotElliptic(_))
        ));
        let g = f.plus_constant(1.0);
        assert!(matches!(
            CoefficientField::isotropic(WindingMatrix::identity(1), g, 3.0),
            Err(Error::NotElliptic(_))
        ));
    }
}
