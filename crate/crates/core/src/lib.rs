//! Ramanujan sums, multiplicative coefficients and Ramanujan expansions of
//! the null function.
//!
//! Identities are checked in exact rational arithmetic wherever the inputs
//! allow it; convergence claims about infinite series are graded with
//! explicitly heuristic verdicts.

pub mod arith;
pub mod config;
pub mod error;
pub mod expansion;
pub mod functions;
pub mod ramanujan;
pub mod squarefree;
pub mod value;

pub use config::Config;
pub use error::{Error, Result};
