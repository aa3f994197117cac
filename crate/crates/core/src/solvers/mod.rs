//! Exact minimum activation search, the relaxation lower bound, MILP export
//! and the 3-Partition decision check built on the exact solver.

mod exact;
mod milp;
mod partition;
mod relax;

pub use exact::{exact_solve, ExactConfig};
pub use milp::{export_milp, lp_user_labels, milp_text};
pub use partition::check_3partition;
pub use relax::lp_lower_bound;

use thiserror::Error;

use crate::flow::FlowError;
use crate::synth::PartitionError;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("globally infeasible: total demand {demand} exceeds total capacity {capacity}")]
    GloballyInfeasible { demand: u64, capacity: u128 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("3-partition precondition violated: {0}")]
    Partition(#[from] PartitionError),
}
