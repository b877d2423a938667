// Index-based loops mirror the tensor calculus throughout; negated
// comparisons like !(x > 0) deliberately reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

//! Numerical toolkit for concentration analysis of almost-critical elliptic
//! problems: bubble profiles and their linearization, projection constants,
//! singular reduced equations on model submanifolds, Fermi-coordinate operator
//! terms, and residual decay measurement of the iterated approximate solution.

pub mod bubble;
pub mod constants;
pub mod construction;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod manifold;
pub mod operator;
pub mod quad;
pub mod singular;

pub use error::{Error, Result};
