// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod capacity;
pub mod channels;
pub mod error;
pub mod espar;
pub mod experiments;
pub mod numerics;
pub mod power;
pub mod rap;

pub use error::{Error, Result};
