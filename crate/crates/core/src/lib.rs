pub mod channel;
pub mod error;
pub mod grid;
pub mod harness;
pub mod levy;
pub mod measures;
pub mod numeric;
pub mod operator;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
