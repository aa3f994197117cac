use std::fmt::Write as _;

use num_rational::Ratio;

use crate::model::{Allocation, AppIdx, Instance, UserIdx};

pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Source,
    Solid,
    Dashed,
    Sink,
    Other,
}

/// Residual network. Arc `2k` is a forward arc, `2k + 1` its residual twin.
///
/// For the bipartite construction the node layout is `s = 0`, `t = 1`, users
/// at `2..2 + |U|`, apps after them.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    source: usize,
    sink: usize,
    adj: Vec<Vec<ArcId>>,
    head: Vec<usize>,
    residual: Vec<u64>,
    // Per forward arc.
    capacity: Vec<u64>,
    cost: Vec<Ratio<u64>>,
    kind: Vec<ArcKind>,
    num_users: usize,
    num_apps: usize,
    user_app: Vec<(UserIdx, AppIdx, ArcId)>,
}

impl FlowNetwork {
    pub fn new(num_nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < num_nodes && sink < num_nodes && source != sink);
        Self {
            source,
            sink,
            adj: vec![Vec::new(); num_nodes],
            head: Vec::new(),
            residual: Vec::new(),
            capacity: Vec::new(),
            cost: Vec::new(),
            kind: Vec::new(),
            num_users: 0,
            num_apps: 0,
            user_app: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64) -> ArcId {
        self.add_arc_full(from, to, capacity, Ratio::from_integer(0), ArcKind::Other)
    }

    pub fn add_arc_with_cost(&mut self, from: usize, to: usize, capacity: u64, cost: Ratio<u64>) -> ArcId {
        self.add_arc_full(from, to, capacity, cost, ArcKind::Other)
    }

    fn add_arc_full(&mut self, from: usize, to: usize, capacity: u64, cost: Ratio<u64>, kind: ArcKind) -> ArcId {
        let id = self.head.len();
        self.head.push(to);
        self.residual.push(capacity);
        self.adj[from].push(id);
        self.head.push(from);
        self.residual.push(0);
        self.adj[to].push(id + 1);
        self.capacity.push(capacity);
        self.cost.push(cost);
        self.kind.push(kind);
        id
    }

    /// `s -> u (t_u)`, `u -> a (t_u)` for solid edges and `active`, `a -> t (c_a)`.
    /// Arcs are inserted users ascending, apps ascending.
    pub fn build(inst: &Instance, active: &[(UserIdx, AppIdx)]) -> Self {
        Self::build_inner(inst, active, |_, _| Ratio::from_integer(0))
    }

    /// The relaxation network: every dashed edge present with per-unit cost
    /// `1 / t_u`, solid edges free.
    pub fn build_relaxation(inst: &Instance) -> Self {
        let all: Vec<_> = inst.dashed_edges().collect();
        Self::build_inner(inst, &all, |u, solid| {
            if solid {
                Ratio::from_integer(0)
            } else {
                Ratio::new(1, inst.user(u).demand)
            }
        })
    }

    fn build_inner(
        inst: &Instance,
        active: &[(UserIdx, AppIdx)],
        cost_of: impl Fn(UserIdx, bool) -> Ratio<u64>,
    ) -> Self {
        let nu = inst.num_users();
        let na = inst.num_apps();
        let mut net = Self::new(2 + nu + na, 0, 1);
        net.num_users = nu;
        net.num_apps = na;
        let mut active = active.to_vec();
        active.sort_unstable();
        active.dedup();
        let mut next = 0;
        for (u, user) in inst.users().iter().enumerate() {
            let un = 2 + u;
            net.add_arc_full(0, un, user.demand, Ratio::from_integer(0), ArcKind::Source);
            let mut pre = user.preinstalled.iter().peekable();
            for a in 0..na {
                let solid = pre.next_if_eq(&&a).is_some();
                let is_active = next < active.len() && active[next] == (u, a);
                if is_active {
                    next += 1;
                    debug_assert!(!solid, "active edge ({u},{a}) is solid");
                }
                if solid || is_active {
                    let kind = if solid { ArcKind::Solid } else { ArcKind::Dashed };
                    let id = net.add_arc_full(un, 2 + nu + a, user.demand, cost_of(u, solid), kind);
                    net.user_app.push((u, a, id));
                }
            }
        }
        for (a, &c) in inst.capacities().iter().enumerate() {
            net.add_arc_full(2 + nu + a, 1, c, Ratio::from_integer(0), ArcKind::Sink);
        }
        net
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.capacity.len()
    }

    pub fn user_node(&self, u: UserIdx) -> usize {
        2 + u
    }

    pub fn app_node(&self, a: AppIdx) -> usize {
        2 + self.num_users + a
    }

    pub(crate) fn adj(&self, v: usize) -> &[ArcId] {
        &self.adj[v]
    }

    pub(crate) fn head(&self, arc: ArcId) -> usize {
        self.head[arc]
    }

    pub(crate) fn residual(&self, arc: ArcId) -> u64 {
        self.residual[arc]
    }

    pub(crate) fn push(&mut self, arc: ArcId, amount: u64) {
        self.residual[arc] -= amount;
        self.residual[arc ^ 1] += amount;
    }

    pub fn reset_flow(&mut self) {
        for (k, &c) in self.capacity.iter().enumerate() {
            self.residual[2 * k] = c;
            self.residual[2 * k + 1] = 0;
        }
    }

    /// Flow on forward arc index `k` (the `k`-th added arc).
    pub fn arc_flow(&self, k: usize) -> u64 {
        self.residual[2 * k + 1]
    }

    pub fn arc_flows(&self) -> Vec<u64> {
        (0..self.num_arcs()).map(|k| self.arc_flow(k)).collect()
    }

    pub fn arc(&self, k: usize) -> ArcView {
        ArcView {
            from: self.head[2 * k + 1],
            to: self.head[2 * k],
            capacity: self.capacity[k],
            flow: self.arc_flow(k),
            cost: self.cost[k],
            kind: self.kind[k],
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcView> + '_ {
        (0..self.num_arcs()).map(|k| self.arc(k))
    }

    pub(crate) fn forward_cost(&self, k: usize) -> Ratio<u64> {
        self.cost[k]
    }

    pub fn has_costs(&self) -> bool {
        self.cost.iter().any(|c| *c.numer() != 0)
    }

    /// Current flow out of the source.
    pub fn flow_value(&self) -> u64 {
        self.adj[self.source]
            .iter()
            .filter(|&&e| e % 2 == 0)
            .map(|&e| self.residual[e ^ 1])
            .sum()
    }

    /// Inflow equals outflow at every node other than `s` and `t`, and no arc
    /// exceeds its capacity.
    pub fn conservation_holds(&self) -> bool {
        let mut balance = vec![0i128; self.num_nodes()];
        for arc in self.arcs() {
            if arc.flow > arc.capacity {
                return false;
            }
            balance[arc.from] -= arc.flow as i128;
            balance[arc.to] += arc.flow as i128;
        }
        balance
            .iter()
            .enumerate()
            .all(|(v, &b)| v == self.source || v == self.sink || b == 0)
    }

    /// Positive `u -> a` flows of a bipartite network.
    pub fn user_app_flows(&self) -> impl Iterator<Item = (UserIdx, AppIdx, u64)> + '_ {
        self.user_app
            .iter()
            .map(|&(u, a, id)| (u, a, self.residual[id ^ 1]))
            .filter(|&(_, _, f)| f > 0)
    }

    /// Converts the current flow into an allocation; flow-carrying dashed edges
    /// become activations and residual demand is settled per user.
    pub fn to_allocation(&self, inst: &Instance) -> Allocation {
        let mut alloc = Allocation::new(inst.num_users());
        for (u, a, f) in self.user_app_flows() {
            alloc.add_flow(u, a, f);
        }
        alloc.activate_used_dashed(inst);
        alloc.settle_unallocated(inst);
        alloc
    }

    /// Graphviz rendering; dashed activations are drawn dashed.
    pub fn to_dot(&self) -> String {
        let name = |v: usize| -> String {
            if v == self.source {
                "s".into()
            } else if v == self.sink {
                "t".into()
            } else if self.num_users + self.num_apps > 0 && v >= 2 && v < 2 + self.num_users {
                format!("u{}", v - 2)
            } else if self.num_apps > 0 && v >= 2 + self.num_users && v < 2 + self.num_users + self.num_apps {
                format!("a{}", v - 2 - self.num_users)
            } else {
                format!("n{v}")
            }
        };
        let mut out = String::from("digraph meaf {\n  rankdir=LR;\n");
        for arc in self.arcs() {
            let style = match arc.kind {
                ArcKind::Dashed => ", style=dashed",
                ArcKind::Source | ArcKind::Sink => ", style=dotted",
                _ => "",
            };
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}/{}\"{}];",
                name(arc.from),
                name(arc.to),
                arc.flow,
                arc.capacity,
                style
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcView {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
    pub flow: u64,
    pub cost: Ratio<u64>,
    pub kind: ArcKind,
}
