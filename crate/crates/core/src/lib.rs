pub mod ambiguity;
pub mod error;
pub mod geometry;
pub mod positioning;
pub mod radar;
pub mod scenario;
pub mod tracking;

pub use error::{Error, Result};
