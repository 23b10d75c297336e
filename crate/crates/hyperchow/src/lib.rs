//! Command-line frontend for hypertoric orbifold Chow ring computations.

pub mod commands;
pub mod input;
pub mod suite;
