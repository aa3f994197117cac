//! Flow machinery shared by the solvers: the `s -> U -> A -> t` network, a
//! max-flow feasibility oracle and an exact-cost min-cost max-flow.

mod dinic;
mod mcmf;
mod network;

pub use dinic::{max_flow, MaxFlow};
pub use mcmf::{min_cost_max_flow, min_cost_max_flow_big, MinCostFlow};
pub use network::{ArcId, ArcKind, ArcView, FlowNetwork};

use thiserror::Error;

use crate::model::{AppIdx, Instance, UserIdx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("cost arithmetic overflowed 128 bits; use the big-integer fallback (min_cost_max_flow_big)")]
    CostOverflow,
}

/// Whether every demand routes over `E_solid ∪ active` within the app caps.
pub fn feasible(inst: &Instance, active: &[(UserIdx, AppIdx)]) -> bool {
    if inst.globally_infeasible() {
        return false;
    }
    let mut net = FlowNetwork::build(inst, active);
    max_flow(&mut net).value == inst.total_demand()
}
