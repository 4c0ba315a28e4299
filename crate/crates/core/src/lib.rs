//! Local-global analysis and census of the Chatelet surfaces
//! `Y^2 + Z^2 = (aT^2 + b)(cT^2 + d)` with `|ad - bc| = 1`.

pub mod arith;
pub mod brauer;
pub mod census;
pub mod cli;
pub mod density;
pub mod error;
pub mod local;
pub mod surface;

pub use error::{Error, Result};
