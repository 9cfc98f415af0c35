#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod explain;
pub mod features;
pub mod jst;
pub mod learn;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
