//! Exact computations with derivations and additive maps on computable subfields of the reals.

pub mod calculus;
pub mod error;
pub mod fields;
mod linalg;
pub mod maps;
pub mod report;
pub mod samples;
pub mod theorems;

pub use error::{Error, Result};
