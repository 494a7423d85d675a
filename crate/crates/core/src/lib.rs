//! Framed quiver mutation with F-polynomial labels, the inverse C-matrix
//! change of basis, stable-term detection, and pyramid partition oracles.
//!
//! Everything here is `no_std` with `alloc`. File formats and the command
//! line live in the companion `stable-cluster` crate.
#![no_std]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod matrix;
pub mod poly;
pub mod pyramids;
pub mod quiver;
pub mod stabilize;

pub use error::{Error, Result};
pub use matrix::{CMatrix, IntMatrix};
pub use poly::{Exponents, Polynomial, Substitution};
pub use quiver::{Quiver, TwoCyclePolicy};
