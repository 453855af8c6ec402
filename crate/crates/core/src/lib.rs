pub mod epd;
pub mod checks;
pub mod error;
pub mod field;
pub mod fracops;
pub mod grid;
pub mod io;
pub mod quadrature;
pub mod recon;
pub mod specialfn;
pub mod sphmean;

pub use error::{Error, Result};
