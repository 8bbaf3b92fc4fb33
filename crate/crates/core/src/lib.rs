pub mod benchmark;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod horizon;
pub mod polytope;

pub use error::{Error, Result};
