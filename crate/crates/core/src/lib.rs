//! High-precision q-series: q-Pochhammer symbols, the q-Gamma function,
//! Jacobi theta and Dedekind eta functions with modular acceleration,
//! certified truncation bounds and q -> 1 asymptotics.

// `!(x > y)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod par;
pub mod precision;
pub mod qgamma;
pub mod qseries;
pub mod quad;
pub mod theta;
pub mod xcomplex;

pub use error::{Error, Result};
pub use par::Execution;
pub use precision::{with_precision, BoundKind, ErrorBound, PrecisionSpec, TruncatedValue};
pub use qseries::QNome;
pub use xcomplex::{XComplex, XReal};
