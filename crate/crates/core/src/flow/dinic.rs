use std::collections::VecDeque;

use super::FlowNetwork;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: u64,
    /// Per forward arc, in insertion order.
    pub arc_flows: Vec<u64>,
}

/// Dinic's blocking-flow max-flow. Resets any existing flow first.
pub fn max_flow(net: &mut FlowNetwork) -> MaxFlow {
    net.reset_flow();
    let value = augment_to_max(net, |_, _| true);
    MaxFlow {
        value,
        arc_flows: net.arc_flows(),
    }
}

/// Runs blocking-flow phases over the arcs accepted by `admissible` until no
/// augmenting path remains, starting from the network's current flow.
pub(crate) fn augment_to_max(net: &mut FlowNetwork, admissible: impl Fn(&FlowNetwork, usize) -> bool) -> u64 {
    let n = net.num_nodes();
    let (s, t) = (net.source(), net.sink());
    let mut level = vec![u32::MAX; n];
    let mut next_arc = vec![0usize; n];
    let mut total = 0u64;
    loop {
        level.fill(u32::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in net.adj(v) {
                let w = net.head(e);
                if level[w] == u32::MAX && net.residual(e) > 0 && admissible(net, e) {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if level[t] == u32::MAX {
            return total;
        }
        next_arc.fill(0);
        loop {
            let pushed = blocking_dfs(net, &admissible, &level, &mut next_arc, s, t, u64::MAX);
            if pushed == 0 {
                break;
            }
            total += pushed;
        }
    }
}

fn blocking_dfs(
    net: &mut FlowNetwork,
    admissible: &impl Fn(&FlowNetwork, usize) -> bool,
    level: &[u32],
    next_arc: &mut [usize],
    v: usize,
    t: usize,
    limit: u64,
) -> u64 {
    if v == t {
        return limit;
    }
    while next_arc[v] < net.adj(v).len() {
        let e = net.adj(v)[next_arc[v]];
        let w = net.head(e);
        let r = net.residual(e);
        if r > 0 && level[w] == level[v] + 1 && admissible(net, e) {
            let pushed = blocking_dfs(net, admissible, level, next_arc, w, t, limit.min(r));
            if pushed > 0 {
                net.push(e, pushed);
                return pushed;
            }
        }
        next_arc[v] += 1;
    }
    0
}
