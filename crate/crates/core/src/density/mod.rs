//! Exact local densities and the stratum sums behind the leading constants.

mod mu;
mod table;
mod verify;

pub use mu::*;
pub use table::*;
pub use verify::*;
