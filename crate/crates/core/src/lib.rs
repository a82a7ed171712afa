//! Spectacle cycles on the modular curve with exact arithmetic.
//!
//! The crate computes cap vectors that close modular symbols with
//! coefficients into cycles, the generating series of their intersection
//! numbers with the imaginary axis, the signature (1,1) theta lift, and
//! numerical periods of level one Eisenstein series over capped cycles.

pub mod arith;
pub mod caps;
pub mod error;
pub mod exec;
pub mod lift;
pub mod mat;
pub mod periods;
pub mod qseries;
pub mod quad;
pub mod sym;
pub mod theta11;
pub mod verify;

pub use arith::Rational;
pub use error::{Error, Result};
