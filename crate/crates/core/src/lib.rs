pub mod barriers;
pub mod cli;
pub mod error;
pub mod exec;
pub mod picard;
pub mod quasi;
pub mod radial;
pub mod verify;

pub use error::{Error, Result};
