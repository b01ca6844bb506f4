pub mod autgroup;
pub mod base_ring;
pub mod char_ring;
pub mod derham;
pub mod error;
pub mod fp;
pub mod glnrep;
pub mod induced;
pub mod irreducibles;
pub mod linalg;
pub mod matrix;

pub use error::{Error, Result};
