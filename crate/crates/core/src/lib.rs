pub mod cli;
pub mod coeff;
pub mod error;
pub mod fixture;
pub mod matrix;
pub mod morita;
pub mod module;
pub mod par;
pub mod parse;
pub mod report;
pub mod sample;
pub mod semiclassical;
pub mod series;
pub mod star;

pub use error::{Error, Result};
