// Negated comparisons are deliberate (they also reject NaN); reference
// constants keep every digit the oracle printed.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod quad;
pub mod sampler;
pub mod specfun;
pub mod validate;

pub use error::{Result, TplabError};
