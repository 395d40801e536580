//! Breadth-depth search, circuit value and preposition counting, each with a
//! reference oracle, generators, factorizations and witnesses.

pub mod bds;
pub mod cvp;
pub mod wordstats;
