//! Solvers for the minimum edge activation flow problem: route every user's
//! transactions to apps under per-app caps while activating as few new
//! user-app edges as possible.

pub mod bench;
pub mod flow;
pub mod heuristics;
pub mod model;
pub mod solvers;
pub mod synth;
