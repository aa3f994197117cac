use std::time::{Duration, Instant};

use log::debug;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{lp_lower_bound, SolveError};
use crate::flow::{feasible, max_flow, FlowNetwork};
use crate::heuristics::dtas;
use crate::model::{Algorithm, AppIdx, Instance, Objective, SolveResult, SolveStatus, UserIdx};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest activation count to try; defaults to `|E_dashed|`.
    pub max_budget: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Start from the relaxation bound and cut subtrees whose optimistic
    /// completion is already infeasible.
    pub prune: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_budget: None,
            time_limit: None,
            prune: true,
        }
    }
}

/// Minimum activation set by iterative deepening on `k`.
///
/// For each `k` the `k`-subsets of the dashed edges are visited in
/// lexicographic order over `(user, app)`; the first subset that admits a full
/// routing is returned, so ties resolve to the lexicographically smallest set.
pub fn exact_solve(inst: &Instance, cfg: &ExactConfig) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    if inst.globally_infeasible() {
        return Err(SolveError::GloballyInfeasible {
            demand: inst.total_demand(),
            capacity: inst.total_capacity(),
        });
    }
    let edges: Vec<(UserIdx, AppIdx)> = inst.dashed_edges().collect();
    let budget = match cfg.max_budget {
        Some(b) if b > edges.len() => {
            return Err(SolveError::InvalidConfig(format!(
                "max_budget {b} exceeds the {} dashed edges",
                edges.len()
            )))
        }
        Some(b) => b,
        None => edges.len(),
    };

    let needs_edge: Vec<bool> = inst
        .users()
        .iter()
        .map(|u| u.demand as u128 > u.preinstalled.iter().map(|&a| inst.capacity(a) as u128).sum::<u128>())
        .collect();
    let k_lb = if cfg.prune {
        let lp = lp_lower_bound(inst)?.objective.as_rational();
        let lp_ceil = lp.numer().div_ceil(lp.denom()).to_usize().unwrap_or(usize::MAX);
        lp_ceil.max(needs_edge.iter().filter(|&&n| n).count())
    } else {
        0
    };
    debug!("exact: {} dashed edges, k_lb = {k_lb}, budget = {budget}", edges.len());

    let mut search = Search {
        inst,
        edges: &edges,
        needs_edge,
        prune: cfg.prune,
        deadline: cfg.time_limit.map(|d| start + d),
        chosen: Vec::new(),
        chosen_per_user: vec![0; inst.num_users()],
        last_edge_of_user: last_edge_index(inst, &edges),
        nodes: 0,
        timed_out: false,
    };

    for k in k_lb..=budget {
        if search.run(k) {
            let subset: Vec<_> = search.chosen.iter().map(|&i| edges[i]).collect();
            debug!("exact: k = {k} feasible after {} nodes", search.nodes);
            let mut net = FlowNetwork::build(inst, &subset);
            let flow = max_flow(&mut net);
            debug_assert_eq!(flow.value, inst.total_demand());
            let mut allocation = net.to_allocation(inst);
            for &(u, a) in &subset {
                allocation.activate(u, a);
            }
            return Ok(SolveResult {
                objective: Objective::Count(k as u64),
                total_unallocated: allocation.total_unallocated(),
                allocation,
                wall_time: elapsed(start),
                algorithm: Algorithm::Exact,
                optimal: true,
                status: SolveStatus::Solved,
            });
        }
        if search.timed_out {
            let fallback = dtas(inst);
            return Ok(SolveResult {
                wall_time: elapsed(start),
                algorithm: Algorithm::Exact,
                optimal: false,
                status: SolveStatus::TimeLimit,
                ..fallback
            });
        }
    }

    // Nothing within budget: report what the solid edges alone can carry.
    let mut net = FlowNetwork::build(inst, &[]);
    max_flow(&mut net);
    let allocation = net.to_allocation(inst);
    Ok(SolveResult {
        objective: Objective::Count(0),
        total_unallocated: allocation.total_unallocated(),
        allocation,
        wall_time: elapsed(start),
        algorithm: Algorithm::Exact,
        optimal: false,
        status: SolveStatus::BudgetExceeded,
    })
}

fn elapsed(start: Instant) -> Duration {
    start.elapsed().max(Duration::from_nanos(1))
}

fn last_edge_index(inst: &Instance, edges: &[(UserIdx, AppIdx)]) -> Vec<Option<usize>> {
    let mut last = vec![None; inst.num_users()];
    for (i, &(u, _)) in edges.iter().enumerate() {
        last[u] = Some(i);
    }
    last
}

struct Search<'a> {
    inst: &'a Instance,
    edges: &'a [(UserIdx, AppIdx)],
    needs_edge: Vec<bool>,
    prune: bool,
    deadline: Option<Instant>,
    chosen: Vec<usize>,
    chosen_per_user: Vec<usize>,
    last_edge_of_user: Vec<Option<usize>>,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn run(&mut self, k: usize) -> bool {
        self.chosen.clear();
        self.chosen_per_user.fill(0);
        if self.prune && !self.promising(0, k) {
            return false;
        }
        self.dfs(0, k)
    }

    /// Extends `chosen` with `left` more edges drawn from `edges[from..]`.
    fn dfs(&mut self, from: usize, left: usize) -> bool {
        if left == 0 {
            return self.prune || self.subset_feasible();
        }
        let last_start = self.edges.len() - left;
        for i in from..=last_start {
            self.nodes += 1;
            if self.nodes.is_multiple_of(256) {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.timed_out = true;
                    }
                }
            }
            if self.timed_out {
                return false;
            }
            self.chosen.push(i);
            self.chosen_per_user[self.edges[i].0] += 1;
            let ok = (!self.prune || self.promising(i + 1, left - 1)) && self.dfs(i + 1, left - 1);
            if ok {
                return true;
            }
            self.chosen_per_user[self.edges[i].0] -= 1;
            self.chosen.pop();
        }
        false
    }

    fn subset_feasible(&self) -> bool {
        let active: Vec<_> = self.chosen.iter().map(|&i| self.edges[i]).collect();
        feasible(self.inst, &active)
    }

    /// Necessary conditions for some completion of `chosen` with `left` edges
    /// from `edges[from..]` to be feasible. With `left == 0` this is exact.
    fn promising(&self, from: usize, left: usize) -> bool {
        let mut still_needed = 0;
        for (u, &needs) in self.needs_edge.iter().enumerate() {
            if needs && self.chosen_per_user[u] == 0 {
                match self.last_edge_of_user[u] {
                    Some(last) if last >= from => still_needed += 1,
                    _ => return false,
                }
            }
        }
        if still_needed > left {
            return false;
        }
        let mut active: Vec<_> = self.chosen.iter().map(|&i| self.edges[i]).collect();
        if left > 0 {
            active.extend_from_slice(&self.edges[from..]);
        }
        feasible(self.inst, &active)
    }
}
