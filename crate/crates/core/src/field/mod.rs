//! Quasiperiodic coefficient fields `a(x) = F(M x)` and their arithmetic
//! properties: Diophantine constants, discrepancy, derivative bounds.

pub mod bounds;
mod coefficient;
mod discrepancy;
pub mod lattice;
mod quasi;
mod spec;
mod trig;
mod winding;

pub use coefficient::{CoefficientField, Holder, DEFAULT_KAPPA};
pub use discrepancy::{diophantine_constant, sigma, DiophantineReport, SigmaConfig};
pub use quasi::QuasiField;
pub use spec::{load_field, EntrySpec, FieldSpec, WindingSpec};
pub use trig::{Extrema, Mode, SupSampler, TrigPolynomial, TrigTerm};
pub use winding::{WindingMatrix, GOLDEN};

/// `a(x)` for a coefficient field, row-major `d x d`.
pub fn eval_field(field: &CoefficientField, x: &[f64]) -> Vec<f64> {
    field.eval(x)
}

/// `F(alpha)` at a torus point.
pub fn lifted_eval(f: &TrigPolynomial, alpha: &[f64]) -> f64 {
    f.eval(alpha)
}
