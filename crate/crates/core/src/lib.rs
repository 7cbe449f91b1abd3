//! Greedy maximization of monotone set functions under a cardinality
//! constraint, with tools to measure how far an objective is from
//! submodular and the approximation guarantees that follow.

// `!(x > 0.0)` is used on purpose so that NaN fails validation; index loops
// mirror the matrix formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod experiments;
pub mod matrixcore;
pub mod rng;
pub mod setfn;
pub mod solvers;

pub use error::{Error, Result};
pub use setfn::{SetFunction, Subset};
