// `!(x < y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod certificates;
pub mod cli;
pub mod dbar;
pub mod error;
pub mod estimate;
pub mod operators;
pub mod quadrature;
pub mod symbols;
pub mod weights;

pub use error::{Error, Result};
