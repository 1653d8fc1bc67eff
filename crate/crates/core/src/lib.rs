pub mod acquisition;
pub mod analysis;
pub mod error;
pub mod extraction;
pub mod laser;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
