//! Consequences of the corrector: effective coefficients, the Dirichlet
//! convergence-rate experiment and the two-scale expansion error.

mod dirichlet;
mod effective;

pub use dirichlet::{
    closed_form_1d, dirichlet_rate, solve_dirichlet, two_scale_error, BoundaryData,
    DirichletSolution, RateConfig, RateReport, RateRow,
};
pub use effective::{arithmetic_mean, effective_matrix, harmonic_mean, EffectiveMatrix};
