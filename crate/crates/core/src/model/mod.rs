//! Problem instances, allocations and solver results.
//!
//! Users are addressed internally by their position in the instance
//! (`UserIdx`); the opaque string id only appears at the file boundary.

mod allocation;
mod instance;
mod result;

pub use allocation::{verify_allocation, Allocation, AllocationDoc, VerificationReport, Violation};
pub use instance::{
    ceil_fraction, validate_instance, AppIdx, CapacitySpec, DashedEdges, Instance, RawCapacities, RawInstance,
    RawUser, UserIdx, UserRecord,
};
pub use result::{
    mixed_fraction, rational_to_f64, Algorithm, Objective, SolveResult, SolveResultDoc, SolveStatus,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("instance has no apps")]
    NoApps,
    #[error("duplicate user id {0:?}")]
    DuplicateUserId(String),
    #[error("app id out of range: user {user:?} lists app {app}, instance has {num_apps} apps")]
    AppOutOfRange { user: String, app: i64, num_apps: usize },
    #[error("user {user:?} lists app {app} twice")]
    DuplicatePreinstall { user: String, app: usize },
    #[error("user {user:?} has non-positive demand {demand}")]
    NonPositiveDemand { user: String, demand: i64 },
    #[error("alpha below 1/n: alpha = {alpha} but 1/{num_apps} = {}", 1.0 / *num_apps as f64)]
    AlphaBelowFloor { alpha: f64, num_apps: usize },
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),
    #[error("capacity list has {got} entries, expected {expected}")]
    CapacityLengthMismatch { expected: usize, got: usize },
    #[error("app {app} has negative capacity {capacity}")]
    NegativeCapacity { app: usize, capacity: i64 },
    #[error("total demand overflows 64 bits")]
    DemandOverflow,
    #[error("unknown user id {0:?}")]
    UnknownUser(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
