use std::time::{Duration, Instant};

use super::SolveError;
use crate::flow::{min_cost_max_flow, min_cost_max_flow_big, FlowError, FlowNetwork};
use crate::model::{Algorithm, Instance, Objective, SolveResult, SolveStatus};

/// Lower bound from relaxing the activation variables to `[0, 1]` while the
/// flows stay integral.
///
/// At an optimum each relaxed activation equals `f(u,a) / t_u`, so the bound
/// is the cheapest full routing when a unit on a dashed edge of `u` costs
/// `1 / t_u` and solid edges are free: a min-cost max-flow on the network
/// with every dashed edge present. The objective is exact; the allocation is
/// the witnessing flow with every flow-carrying dashed edge activated.
pub fn lp_lower_bound(inst: &Instance) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    if inst.globally_infeasible() {
        return Err(SolveError::GloballyInfeasible {
            demand: inst.total_demand(),
            capacity: inst.total_capacity(),
        });
    }
    let mut net = FlowNetwork::build_relaxation(inst);
    let mcf = match min_cost_max_flow(&mut net) {
        Ok(r) => r,
        Err(FlowError::CostOverflow) => min_cost_max_flow_big(&mut net)?,
    };
    if mcf.value < inst.total_demand() {
        return Err(SolveError::GloballyInfeasible {
            demand: inst.total_demand(),
            capacity: inst.total_capacity(),
        });
    }
    let allocation = net.to_allocation(inst);
    Ok(SolveResult {
        objective: Objective::Fraction(mcf.cost),
        total_unallocated: allocation.total_unallocated(),
        allocation,
        wall_time: start.elapsed().max(Duration::from_nanos(1)),
        algorithm: Algorithm::Lp,
        optimal: false,
        status: SolveStatus::Solved,
    })
}
