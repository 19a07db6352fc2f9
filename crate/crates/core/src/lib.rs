pub mod circuit;
pub mod coupling;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod wgmodes;

pub use error::{Error, Result};
