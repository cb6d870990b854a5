pub mod bernstein;
pub mod error;
pub mod mlcore;
pub mod montecarlo;
pub mod quad;
pub mod verify;
pub mod specfun;
pub mod suite;

pub use error::{Error, Result};
