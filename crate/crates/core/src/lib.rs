//! Exact symbolic calculus on infinite jet spaces.

pub mod algebra;
pub mod error;

pub use algebra::{Poly, Rational, Signature};
pub use error::{Error, Result};
pub mod diffop;
pub mod jet;
pub mod text;
pub mod linalg;
pub mod algebroid;
pub mod poisson;
pub mod gauge;
pub mod search;
