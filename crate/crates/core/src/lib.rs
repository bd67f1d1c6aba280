pub mod complex;
pub mod error;
pub mod io;
pub mod join_morse;
pub mod linalg;
pub mod models;
pub mod s1;
pub mod spectral;

pub use error::{Error, Result};
