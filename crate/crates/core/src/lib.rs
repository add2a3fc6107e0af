pub mod error;
pub mod qmath;
pub mod states;
pub mod channels;
pub mod optimize;
pub mod quantities;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
