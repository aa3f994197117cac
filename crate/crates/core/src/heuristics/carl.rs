use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::HeuristicState;
use crate::model::{Algorithm, AppIdx, Instance, Objective, SolveResult, SolveStatus, UserIdx};

/// Direction of the transaction-to-capacity sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserOrder {
    /// Light users first (the refined variant).
    #[default]
    Ascending,
    /// Heavy users first (the preliminary variant).
    Descending,
}

/// Capacity-aware reuse-first layered allocation.
///
/// Users are ordered by `t_u / Σ_{a ∈ pre(u)} c_a` (with uniform caps this is
/// `t_u / (|pre(u)| · c)`); users without preinstalled apps get an infinite
/// key. Ties keep input order.
pub fn carl(inst: &Instance, order: UserOrder) -> SolveResult {
    let start = Instant::now();
    let users = carl_order(inst, order);
    let mut st = HeuristicState::new(inst);
    let mut unallocated = vec![0u64; inst.num_users()];
    let mut buf: Vec<AppIdx> = Vec::with_capacity(inst.num_apps());

    for &u in &users {
        let user = inst.user(u);
        let mut remaining = user.demand;

        buf.clear();
        buf.extend_from_slice(&user.preinstalled);
        st.sort_by_remaining(&mut buf);
        st.fill(u, &buf, &mut remaining, |_, _| {});

        if remaining > 0 {
            buf.clear();
            buf.extend((0..inst.num_apps()).filter(|&a| st.extra_apps[a] && !user.has_preinstalled(a)));
            st.sort_by_remaining(&mut buf);
            st.fill(u, &buf, &mut remaining, |st, a| st.add_extra(u, a));
        }

        if remaining > 0 {
            buf.clear();
            buf.extend((0..inst.num_apps()).filter(|&a| !st.extra_apps[a] && !user.has_preinstalled(a)));
            st.sort_by_remaining(&mut buf);
            st.fill(u, &buf, &mut remaining, |st, a| {
                st.extra_apps[a] = true;
                st.add_extra(u, a);
            });
        }

        st.total_remaining += remaining;
        unallocated[u] = remaining;
        st.check(inst);
    }

    let total_unallocated = st.total_remaining;
    let allocation = st.finish(&unallocated);
    SolveResult {
        objective: Objective::Count(allocation.activation_count() as u64),
        allocation,
        total_unallocated,
        wall_time: start.elapsed().max(std::time::Duration::from_nanos(1)),
        algorithm: match order {
            UserOrder::Ascending => Algorithm::CarlAsc,
            UserOrder::Descending => Algorithm::CarlDesc,
        },
        optimal: false,
        status: SolveStatus::Solved,
    }
}

/// Processing order of users for [`carl`].
pub fn carl_order(inst: &Instance, order: UserOrder) -> Vec<UserIdx> {
    // (t_u, preinstalled capacity); zero capacity means an infinite ratio.
    let keys: Vec<(u128, u128)> = inst
        .users()
        .iter()
        .map(|user| {
            let cap: u128 = user.preinstalled.iter().map(|&a| inst.capacity(a) as u128).sum();
            (user.demand as u128, cap)
        })
        .collect();
    let cmp = |x: &(u128, u128), y: &(u128, u128)| match (x.1, y.1) {
        (0, 0) => Ordering::Equal,
        (0, _) => Ordering::Greater,
        (_, 0) => Ordering::Less,
        (dx, dy) => (x.0 * dy).cmp(&(y.0 * dx)),
    };
    let mut users: Vec<UserIdx> = (0..inst.num_users()).collect();
    match order {
        UserOrder::Ascending => users.sort_by(|&a, &b| cmp(&keys[a], &keys[b])),
        UserOrder::Descending => users.sort_by(|&a, &b| cmp(&keys[b], &keys[a])),
    }
    users
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_allocation, CapacitySpec, UserRecord};

    fn inst(caps: &[u64], users: &[(u64, &[usize])]) -> Instance {
        Instance::new(
            caps.len(),
            CapacitySpec::PerApp(caps.to_vec()),
            users
                .iter()
                .enumerate()
                .map(|(i, (t, pre))| UserRecord::new(format!("u{}", i + 1), *t, pre.iter().copied()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn preinstalled_capacity_suffices() {
        let inst = inst(&[10, 10], &[(2, &[0]), (3, &[1]), (4, &[0, 1])]);
        for order in [UserOrder::Ascending, UserOrder::Descending] {
            let res = carl(&inst, order);
            assert_eq!(res.activation_count(), 0);
            assert_eq!(res.total_unallocated, 0);
            assert!(verify_allocation(&inst, &res.allocation).ok);
        }
    }

    #[test]
    fn tie_goes_to_input_order() {
        let inst = inst(&[2, 2], &[(2, &[0]), (2, &[0])]);
        let res = carl(&inst, UserOrder::Ascending);
        assert_eq!(res.allocation.flow(0, 0), 2);
        assert_eq!(res.allocation.flow(1, 1), 2);
        assert_eq!(res.activation_count(), 1);
        assert_eq!(res.algorithm, Algorithm::CarlAsc);
    }

    #[test]
    fn heavy_first_saturates_shared_app() {
        let inst = inst(&[3, 3], &[(4, &[0]), (1, &[0]), (1, &[0])]);
        let desc = carl(&inst, UserOrder::Descending);
        assert_eq!(carl_order(&inst, UserOrder::Descending), vec![0, 1, 2]);
        assert_eq!(desc.activation_count(), 3);
        assert_eq!(desc.allocation.flow(0, 0), 3);
        assert_eq!(desc.allocation.flow(0, 1), 1);

        let asc = carl(&inst, UserOrder::Ascending);
        assert_eq!(carl_order(&inst, UserOrder::Ascending), vec![1, 2, 0]);
        assert_eq!(asc.activation_count(), 1);
        assert_eq!(asc.allocation.flow(0, 1), 3);
        assert!(verify_allocation(&inst, &asc.allocation).ok);
        assert!(verify_allocation(&inst, &desc.allocation).ok);
    }

    #[test]
    fn users_without_preinstalls_sort_as_infinite() {
        let inst = inst(&[10, 10], &[(1, &[]), (9, &[0]), (1, &[1])]);
        assert_eq!(carl_order(&inst, UserOrder::Ascending), vec![2, 1, 0]);
        assert_eq!(carl_order(&inst, UserOrder::Descending), vec![0, 1, 2]);
    }

    #[test]
    fn overload_leaves_unallocated_demand() {
        let inst = inst(&[1, 1], &[(3, &[0]), (1, &[1])]);
        let res = carl(&inst, UserOrder::Ascending);
        assert_eq!(res.total_unallocated, 2);
        let report = verify_allocation(&inst, &res.allocation);
        assert!(!report.ok && report.consistent());
    }
}
