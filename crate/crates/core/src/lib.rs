pub mod error;
pub mod hilbert_field;
pub mod op_field;
pub mod numeric;
pub mod phase_space;
pub mod weyl;

pub use error::{Error, Result};
