//! Quantum pseudo-telepathy games versus Bell inequalities on two-qubit state
//! families.
//!
//! The crate evaluates the magic square game and the doily game on two copies
//! of Werner and Bell-diagonal states, decides CHSH and Collins–Gisin
//! violability, and estimates the volume of each quantum-advantage region.

pub mod criteria;
pub mod error;
pub mod games;
pub mod linalg;
pub mod pauli;
pub mod regions;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
