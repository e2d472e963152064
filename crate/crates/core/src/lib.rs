pub mod catalog;
pub mod conv;
pub mod error;
pub mod idclass;
pub mod ncpart;
pub mod scalar;
pub mod seq;

pub use error::{Error, Result};
pub use scalar::{rat, Rational, Scalar};
pub use seq::{SeqKind, SeqN};
pub mod quad;
pub mod series;
pub mod transforms;
pub mod verify;
