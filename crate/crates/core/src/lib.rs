pub mod constants;
pub mod continuant;
pub mod error;
pub mod farey;
pub mod geometry;
pub mod identities;

pub use error::{Error, Result};
