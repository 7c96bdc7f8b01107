//! Heat kernel tools: Hermite polynomials, `L^1` norms of kernel derivatives,
//! exact heat flow of band-limited fields, the ergodic-theorem check and the
//! multiscale Poincaré functional.

mod ergodic;
mod kernel;
mod poincare;
mod spectral;

pub use ergodic::{ergodic_bound_check, ErgodicConfig, ErgodicReport, ErgodicRow};
pub use kernel::{
    fit_hermite_constant, gauss_legendre, grad_heat_l1, heat_kernel, hermite, hermite_roots,
    MAX_ORDER,
};
pub use poincare::{
    multiscale_poincare_rhs, smoothed_gradient_sup, PoincareReport, TimeQuadrature,
};
pub use spectral::{heat_evolve, osc, FrequencyField, FrequencyMode, HeatState};
