//! Regularized corrector equation on a periodic truncation: grid, flux-form
//! operator, Krylov solvers with a multigrid preconditioner, the dyadic scheme
//! and the corrector-side measurements.

mod grid;
mod io;
pub mod krylov;
mod multigrid;
mod operator;
mod solve;

pub use grid::{GridField, PeriodicGrid};
pub use io::{read_grid_field, write_grid_field, GridSidecar};
pub use multigrid::Multigrid;
pub use operator::{check_corrector_grid, Operator};
pub(crate) use solve::{check_dyadic, solve_linear, unit};
pub use solve::{
    corrector_limit, corrector_rho1, difference_corrector_check, lipschitz_report, psi,
    solve_corrector, CauchyRow, CorrectorConfig, CorrectorResult, LimitReport, PreconditionerKind,
    PsiResult, Rho1Config, Rho1Row, SolverConfig, ZetaCheck,
};
