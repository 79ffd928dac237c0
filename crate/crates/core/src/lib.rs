#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elastic;
pub mod error;
pub mod forward;
pub mod harness;
pub mod linalg;
pub mod modal;
pub mod newton;
pub mod specfun;
pub mod types;

pub use error::{Error, Result};
