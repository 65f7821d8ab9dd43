pub mod characters;
pub mod cli;
pub mod error;
pub mod galois;
pub mod modularforms;
pub mod numkernel;
pub mod recognize;
pub mod rootnumber;
pub mod scanner;

pub use error::{Error, Result};
pub use numkernel::{BigComplex, PrecisionContext};
