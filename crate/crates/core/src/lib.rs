//! Generalised state-update rules for finite-dimensional quantum systems.
//!
//! The crate models sub-normalized states and proper mixtures on composite
//! spaces, implements a catalog of measurement update rules, and certifies
//! numerically which requirements each rule meets, with replayable witnesses
//! for every violation.

pub mod checks;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod rules;
pub mod state;

pub use error::{GurError, Result};
