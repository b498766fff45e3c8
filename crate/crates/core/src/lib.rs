//! Solving deterministic finite-horizon dynamic programs through their dual
//! linear program, using the multiplicative weights update method with a
//! maximum-finding oracle over simplex vertices.

pub mod bench;
pub mod encoders;
pub mod error;
pub mod model;
pub mod mwum;
pub mod oracle;
pub mod parallel;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
