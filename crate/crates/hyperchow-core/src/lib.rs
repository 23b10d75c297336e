//! Exact combinatorics and orbifold Chow rings of hypertoric Deligne-Mumford stacks.

pub mod arrangement;
pub mod boxes;
pub mod inertia;
pub mod lawrence;
pub mod multifan;
pub mod orbring;
pub mod poly;
pub mod qlinalg;
pub mod zlattice;
