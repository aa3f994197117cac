use std::time::{Duration, Instant};

use super::HeuristicState;
use crate::model::{Algorithm, AppIdx, Instance, Objective, SolveResult, SolveStatus, UserIdx};

/// Decoupled two-stage allocation.
///
/// Users are visited in ascending `(t_u, |pre(u)|)` order (ties keep input
/// order) in both phases. Phase 1 routes over preinstalled apps only. Phase 2
/// reuses apps already in use elsewhere, then keeps installing the new app
/// with the most remaining capacity until the user is served or every app is
/// full.
pub fn dtas(inst: &Instance) -> SolveResult {
    let start = Instant::now();
    let users = dtas_order(inst);
    let mut st = HeuristicState::new(inst);
    let mut remain = vec![0u64; inst.num_users()];
    let mut buf: Vec<AppIdx> = Vec::with_capacity(inst.num_apps());

    for &u in &users {
        let user = inst.user(u);
        let mut r = user.demand;
        buf.clear();
        buf.extend_from_slice(&user.preinstalled);
        st.sort_by_remaining(&mut buf);
        st.fill(u, &buf, &mut r, |_, _| {});
        remain[u] = r;
    }
    st.check(inst);

    for &u in &users {
        let mut r = remain[u];
        if r == 0 {
            continue;
        }
        let user = inst.user(u);

        buf.clear();
        buf.extend((0..inst.num_apps()).filter(|&a| st.extra_apps[a] && !user.has_preinstalled(a)));
        st.sort_by_remaining(&mut buf);
        st.fill(u, &buf, &mut r, |st, a| st.add_extra(u, a));

        while r > 0 {
            let best = (0..inst.num_apps())
                .filter(|&a| !st.extra_apps[a] && !user.has_preinstalled(a) && st.remaining_capacity[a] > 0)
                .max_by_key(|&a| (st.remaining_capacity[a], std::cmp::Reverse(a)));
            let Some(a) = best else { break };
            st.fill(u, &[a], &mut r, |st, a| {
                st.extra_apps[a] = true;
                st.add_extra(u, a);
            });
        }

        remain[u] = r;
        st.total_remaining += r;
        st.check(inst);
    }

    let total_unallocated = st.total_remaining;
    let allocation = st.finish(&remain);
    SolveResult {
        objective: Objective::Count(allocation.activation_count() as u64),
        allocation,
        total_unallocated,
        wall_time: start.elapsed().max(Duration::from_nanos(1)),
        algorithm: Algorithm::Dtas,
        optimal: false,
        status: SolveStatus::Solved,
    }
}

pub fn dtas_order(inst: &Instance) -> Vec<UserIdx> {
    let mut users: Vec<UserIdx> = (0..inst.num_users()).collect();
    users.sort_by_key(|&u| {
        let user = inst.user(u);
        (user.demand, user.preinstalled.len())
    });
    users
}
