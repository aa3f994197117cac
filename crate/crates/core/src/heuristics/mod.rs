//! Greedy allocators that scale to millions of users.
//!
//! Both walk users in a fixed order and fill apps largest-remaining-capacity
//! first. CARL finishes each user before moving on (preinstalled apps, then
//! apps already in use as extras, then fresh installs); DTAS first serves
//! every user from preinstalled apps only and then places the leftovers.

mod carl;
mod dtas;

pub use carl::{carl, UserOrder};
pub use dtas::dtas;

use std::cmp::Reverse;

use crate::model::{Allocation, AppIdx, Instance, UserIdx};

/// Mutable bookkeeping shared by the heuristics.
#[derive(Debug, Clone)]
pub struct HeuristicState {
    pub remaining_capacity: Vec<u64>,
    pub transactions_handled: Vec<u64>,
    /// Apps in use by somebody: seeded with every preinstalled app, grows as
    /// apps are installed.
    pub extra_apps: Vec<bool>,
    /// Apps each user gained beyond its preinstalled set.
    pub user_extras: Vec<Vec<AppIdx>>,
    pub total_remaining: u64,
    allocation: Allocation,
}

impl HeuristicState {
    pub fn new(inst: &Instance) -> Self {
        let mut extra_apps = vec![false; inst.num_apps()];
        for user in inst.users() {
            for &a in &user.preinstalled {
                extra_apps[a] = true;
            }
        }
        Self {
            remaining_capacity: inst.capacities().to_vec(),
            transactions_handled: vec![0; inst.num_apps()],
            extra_apps,
            user_extras: vec![Vec::new(); inst.num_users()],
            total_remaining: 0,
            allocation: Allocation::new(inst.num_users()),
        }
    }

    /// The user's current app set: preinstalled apps plus any extras.
    pub fn user_apps(&self, inst: &Instance, u: UserIdx) -> Vec<AppIdx> {
        let mut apps = inst.user(u).preinstalled.clone();
        apps.extend_from_slice(&self.user_extras[u]);
        apps.sort_unstable();
        apps
    }

    /// Moves up to `want` units of `u`'s demand onto `a`; returns the amount.
    fn allocate(&mut self, u: UserIdx, a: AppIdx, want: u64) -> u64 {
        let amount = want.min(self.remaining_capacity[a]);
        if amount > 0 {
            self.remaining_capacity[a] -= amount;
            self.transactions_handled[a] += amount;
            self.allocation.add_flow(u, a, amount);
        }
        amount
    }

    /// Allocates over `apps` in the given order, stopping once `remaining`
    /// reaches zero. Apps that received flow are passed to `on_use`.
    fn fill(&mut self, u: UserIdx, apps: &[AppIdx], remaining: &mut u64, mut on_use: impl FnMut(&mut Self, AppIdx)) {
        for &a in apps {
            if *remaining == 0 {
                break;
            }
            let got = self.allocate(u, a, *remaining);
            if got > 0 {
                *remaining -= got;
                on_use(self, a);
            }
        }
    }

    fn add_extra(&mut self, u: UserIdx, a: AppIdx) {
        if !self.user_extras[u].contains(&a) {
            self.user_extras[u].push(a);
            self.allocation.activate(u, a);
        }
    }

    fn sort_by_remaining(&self, apps: &mut [AppIdx]) {
        apps.sort_by_key(|&a| (Reverse(self.remaining_capacity[a]), a));
    }

    #[cfg(debug_assertions)]
    fn check(&self, inst: &Instance) {
        for (a, &c) in inst.capacities().iter().enumerate() {
            debug_assert_eq!(
                self.remaining_capacity[a] + self.transactions_handled[a],
                c,
                "capacity bookkeeping broke at app {a}"
            );
        }
    }

    #[cfg(not(debug_assertions))]
    fn check(&self, _inst: &Instance) {}

    fn finish(mut self, unallocated: &[u64]) -> Allocation {
        for (u, &r) in unallocated.iter().enumerate() {
            self.allocation.set_unallocated(u, r);
        }
        debug_assert_eq!(
            self.allocation.activation_count(),
            self.user_extras.iter().map(Vec::len).sum::<usize>()
        );
        debug_assert_eq!(self.total_remaining, self.allocation.total_unallocated());
        self.allocation
    }
}
