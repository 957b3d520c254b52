//! High-precision evaluation of the Riesz function R(x), the Báez-Duarte
//! sequence c_k, their two-parameter generalizations, and the identities and
//! explicit inequalities that connect them.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baezduarte;
pub mod bounds;
pub mod error;
pub mod expansion;
pub mod grid;
pub mod mobius;
pub mod numerics;
pub mod riesz;
pub mod sums;

pub use error::{Error, Result};
pub use grid::Spacing;
pub use mobius::{sieve, MobiusTable};
pub use numerics::{Method, PrecisionContext, SeriesResult};
pub use riesz::RieszParams;
