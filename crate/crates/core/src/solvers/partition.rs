use super::{exact_solve, ExactConfig, SolveError};
use crate::model::SolveStatus;
use crate::synth::reduce_3partition;

/// Decides 3-Partition through the activation problem: the items split into
/// `m` triples of sum `B` exactly when the reduction instance routes fully
/// with `3m` activations.
pub fn check_3partition(items: &[u64], bound: u64) -> Result<bool, SolveError> {
    let (inst, budget) = reduce_3partition(items, bound)?;
    let cfg = ExactConfig {
        max_budget: Some(budget),
        time_limit: None,
        prune: true,
    };
    let res = exact_solve(&inst, &cfg)?;
    Ok(res.status == SolveStatus::Solved && res.activation_count() == budget)
}
