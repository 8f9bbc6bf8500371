//! Relaxations, cut-and-branch, reference optimizers and polyhedral checks.

mod bnb;
mod oracle;
mod polyhedral;
mod relax;

pub use bnb::*;
pub use oracle::*;
pub use polyhedral::*;
pub use relax::*;
