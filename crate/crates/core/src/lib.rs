//! Ontological models of a single quantum system.
//!
//! [`framework`] defines models and the checks run on them, [`zoo`] holds
//! concrete models, [`valuation`] searches for Kochen-Specker valuations and
//! [`bound`] computes LP overlap bounds over finite fragments.

pub mod bound;
pub mod error;
pub mod framework;
pub mod hilbert;
pub mod quadrature;
pub mod rng;
pub mod valuation;
pub mod zoo;

pub use error::{Error, Result};
