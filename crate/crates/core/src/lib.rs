pub mod classification;
pub mod error;
pub mod function_field;
pub mod group_ring;
pub mod heuristics;
pub mod io;
pub mod padic;
pub mod quad;
pub mod reiner;
pub mod shape;
pub mod verify;

pub use error::{Error, Result};
pub use shape::Shape;
