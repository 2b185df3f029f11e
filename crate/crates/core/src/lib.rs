//! Exact wave functions assembled from multi-valued classical action and
//! transported density, with the scenario catalog and verification oracles.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod hj;
pub mod oracle;
pub mod scenarios;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
pub use field::C64;
