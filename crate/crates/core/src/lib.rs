// Guards are written `!(x > lo)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod corrector;
pub mod diffcalc;
pub mod error;
pub mod estimate;
pub mod field;
pub mod fit;
pub mod heat;
pub mod homog;
pub mod io;
pub mod work;

pub use error::{Error, Result};
