pub mod equipartition;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod harness;
pub mod integrals;
pub mod lifted;
pub mod transforms;

pub use error::{Error, Result};
