pub mod error;
pub mod field;
pub mod frames;
pub mod grassmann;
pub mod maps;
pub mod model;
pub mod oracle;
pub mod polar;
pub mod reconstruct;
pub mod runner;

pub use error::{Error, Result};
