use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AppIdx, Instance, ModelError, UserIdx};

/// Sparse integral flow `f(u, a)`, the activated dashed edges and per-user
/// residual demand.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    // Per user, sorted by app, zero entries dropped.
    flows: Vec<Vec<(AppIdx, u64)>>,
    activated: BTreeSet<(UserIdx, AppIdx)>,
    unallocated: Vec<u64>,
}

impl Allocation {
    pub fn new(num_users: usize) -> Self {
        Self {
            flows: vec![Vec::new(); num_users],
            activated: BTreeSet::new(),
            unallocated: vec![0; num_users],
        }
    }

    pub fn num_users(&self) -> usize {
        self.flows.len()
    }

    pub fn add_flow(&mut self, u: UserIdx, a: AppIdx, amount: u64) {
        if amount == 0 {
            return;
        }
        let row = &mut self.flows[u];
        match row.binary_search_by_key(&a, |&(app, _)| app) {
            Ok(i) => row[i].1 += amount,
            Err(i) => row.insert(i, (a, amount)),
        }
    }

    pub fn flow(&self, u: UserIdx, a: AppIdx) -> u64 {
        let row = &self.flows[u];
        row.binary_search_by_key(&a, |&(app, _)| app)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }

    pub fn user_flows(&self, u: UserIdx) -> &[(AppIdx, u64)] {
        &self.flows[u]
    }

    /// All positive flows as `(user, app, amount)`, users then apps ascending.
    pub fn flows(&self) -> impl Iterator<Item = (UserIdx, AppIdx, u64)> + '_ {
        self.flows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(a, f)| (u, a, f)))
    }

    pub fn routed(&self, u: UserIdx) -> u64 {
        self.flows[u].iter().map(|&(_, f)| f).sum()
    }

    pub fn total_routed(&self) -> u64 {
        self.flows().map(|(_, _, f)| f).sum()
    }

    pub fn activate(&mut self, u: UserIdx, a: AppIdx) {
        self.activated.insert((u, a));
    }

    pub fn activated(&self) -> &BTreeSet<(UserIdx, AppIdx)> {
        &self.activated
    }

    pub fn activation_count(&self) -> usize {
        self.activated.len()
    }

    pub fn set_unallocated(&mut self, u: UserIdx, amount: u64) {
        self.unallocated[u] = amount;
    }

    pub fn unallocated(&self, u: UserIdx) -> u64 {
        self.unallocated[u]
    }

    pub fn total_unallocated(&self) -> u64 {
        self.unallocated.iter().sum()
    }

    /// Handled transactions per app.
    pub fn app_loads(&self, num_apps: usize) -> Vec<u64> {
        let mut loads = vec![0u64; num_apps];
        for (_, a, f) in self.flows() {
            loads[a] += f;
        }
        loads
    }

    /// Marks every flow-carrying dashed edge as activated.
    pub fn activate_used_dashed(&mut self, inst: &Instance) {
        for u in 0..self.flows.len() {
            for &(a, _) in &self.flows[u] {
                if !inst.is_solid(u, a) {
                    self.activated.insert((u, a));
                }
            }
        }
    }

    /// Fills `unallocated` as `t_u - routed(u)`; routing more than `t_u` is
    /// left for `verify_allocation` to report.
    pub fn settle_unallocated(&mut self, inst: &Instance) {
        for u in 0..self.flows.len() {
            self.unallocated[u] = inst.user(u).demand.saturating_sub(self.routed(u));
        }
    }

    pub fn to_doc(&self, inst: &Instance) -> AllocationDoc {
        let id = |u: UserIdx| inst.user(u).id.clone();
        AllocationDoc {
            activated: self.activated.iter().map(|&(u, a)| (id(u), a)).collect(),
            flows: self.flows().map(|(u, a, f)| (id(u), a, f)).collect(),
            unallocated: self
                .unallocated
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > 0)
                .map(|(u, &r)| (id(u), r))
                .collect(),
        }
    }

    pub fn from_doc(inst: &Instance, doc: &AllocationDoc) -> Result<Self, ModelError> {
        let index: BTreeMap<&str, UserIdx> = inst
            .users()
            .iter()
            .enumerate()
            .map(|(i, u)| (u.id.as_str(), i))
            .collect();
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| ModelError::UnknownUser(id.to_string()));
        let check_app = |user: &str, a: AppIdx| {
            if a >= inst.num_apps() {
                Err(ModelError::AppOutOfRange {
                    user: user.to_string(),
                    app: a as i64,
                    num_apps: inst.num_apps(),
                })
            } else {
                Ok(())
            }
        };
        let mut alloc = Allocation::new(inst.num_users());
        for (id, a, f) in &doc.flows {
            check_app(id, *a)?;
            alloc.add_flow(lookup(id)?, *a, *f);
        }
        for (id, a) in &doc.activated {
            check_app(id, *a)?;
            alloc.activate(lookup(id)?, *a);
        }
        for (id, r) in &doc.unallocated {
            alloc.set_unallocated(lookup(id)?, *r);
        }
        Ok(alloc)
    }
}

/// Serialized form of an [`Allocation`]: flows as `[user, app, amount]`
/// triples, activations as `[user, app]` pairs, residual demand keyed by user
/// id (users with no residual are omitted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub activated: Vec<(String, AppIdx)>,
    pub flows: Vec<(String, AppIdx, u64)>,
    pub unallocated: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongUserCount { expected: usize, got: usize },
    AppOutOfRange { user: String, app: AppIdx },
    DemandMismatch { user: String, routed: u64, unallocated: u64, demand: u64 },
    CapacityExceeded { app: AppIdx, excess: u64 },
    UnactivatedDashedEdge { user: String, app: AppIdx },
    ActivatedSolidEdge { user: String, app: AppIdx },
    UnallocatedDemand { user: String, amount: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongUserCount { expected, got } => {
                write!(f, "allocation covers {got} users, instance has {expected}")
            }
            Violation::AppOutOfRange { user, app } => write!(f, "app id out of range ({user},{app})"),
            Violation::DemandMismatch {
                user,
                routed,
                unallocated,
                demand,
            } => write!(
                f,
                "demand mismatch for user {user}: routed {routed} + unallocated {unallocated} != {demand}"
            ),
            Violation::CapacityExceeded { app, excess } => {
                write!(f, "capacity exceeded at app {app} by {excess}")
            }
            Violation::UnactivatedDashedEdge { user, app } => {
                write!(f, "unactivated dashed edge ({user},{app})")
            }
            Violation::ActivatedSolidEdge { user, app } => write!(f, "activated solid edge ({user},{app})"),
            Violation::UnallocatedDemand { user, amount } => {
                write!(f, "unallocated demand for user {user}: {amount}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    /// Violations other than residual demand: the allocation is internally
    /// consistent even if it does not route everything.
    pub fn consistent(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::UnallocatedDemand { .. }))
    }
}

/// Checks conservation, capacities and activation consistency. `ok` also
/// requires every user's residual demand to be zero.
pub fn verify_allocation(inst: &Instance, alloc: &Allocation) -> VerificationReport {
    let mut violations = Vec::new();
    if alloc.num_users() != inst.num_users() {
        violations.push(Violation::WrongUserCount {
            expected: inst.num_users(),
            got: alloc.num_users(),
        });
        return VerificationReport { ok: false, violations };
    }
    let n = inst.num_apps();
    let mut loads = vec![0u64; n];
    for (u, user) in inst.users().iter().enumerate() {
        for &(a, f) in alloc.user_flows(u) {
            if a >= n {
                violations.push(Violation::AppOutOfRange {
                    user: user.id.clone(),
                    app: a,
                });
                continue;
            }
            loads[a] += f;
            if !user.has_preinstalled(a) && !alloc.activated().contains(&(u, a)) {
                violations.push(Violation::UnactivatedDashedEdge {
                    user: user.id.clone(),
                    app: a,
                });
            }
        }
        let routed = alloc.routed(u);
        let rest = alloc.unallocated(u);
        if routed + rest != user.demand {
            violations.push(Violation::DemandMismatch {
                user: user.id.clone(),
                routed,
                unallocated: rest,
                demand: user.demand,
            });
        }
        if rest > 0 {
            violations.push(Violation::UnallocatedDemand {
                user: user.id.clone(),
                amount: rest,
            });
        }
    }
    for (a, (&load, &cap)) in loads.iter().zip(inst.capacities()).enumerate() {
        if load > cap {
            violations.push(Violation::CapacityExceeded { app: a, excess: load - cap });
        }
    }
    for &(u, a) in alloc.activated() {
        if u >= inst.num_users() || a >= n {
            violations.push(Violation::AppOutOfRange {
                user: u.to_string(),
                app: a,
            });
        } else if inst.is_solid(u, a) {
            violations.push(Violation::ActivatedSolidEdge {
                user: inst.user(u).id.clone(),
                app: a,
            });
        }
    }
    VerificationReport {
        ok: violations.is_empty(),
        violations,
    }
}
