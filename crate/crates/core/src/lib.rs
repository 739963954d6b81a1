pub mod dbar_solver;
pub mod descend;
pub mod error;
pub mod fd;
pub mod fields;
pub mod forms;
pub mod geometry;
pub mod harness;
pub mod inequalities;
pub mod sampling;

pub use error::{Error, Result};
