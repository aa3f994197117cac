//! Reference implementations used as test oracles. They work on plain
//! vectors and share no code with the library beyond building `Instance`s.

#![allow(dead_code)]

use std::collections::VecDeque;

use meaf_core::model::{CapacitySpec, Instance, UserRecord};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

/// Edmonds-Karp on a dense capacity matrix.
pub fn edmonds_karp(mut cap: Vec<Vec<u64>>, s: usize, t: usize) -> u64 {
    let n = cap.len();
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                if prev[w] == usize::MAX && cap[v][w] > 0 {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = u64::MAX;
        let mut w = t;
        while w != s {
            push = push.min(cap[prev[w]][w]);
            w = prev[w];
        }
        let mut w = t;
        while w != s {
            cap[prev[w]][w] -= push;
            cap[w][prev[w]] += push;
            w = prev[w];
        }
        total += push;
    }
}

/// Max flow through preinstalled edges plus `extra`, on a matrix network.
pub fn oracle_max_flow(inst: &Instance, extra: &[(usize, usize)]) -> u64 {
    let (nu, na) = (inst.num_users(), inst.num_apps());
    let n = 2 + nu + na;
    let mut cap = vec![vec![0u64; n]; n];
    for (u, user) in inst.users().iter().enumerate() {
        cap[0][2 + u] = user.demand;
        for &a in &user.preinstalled {
            cap[2 + u][2 + nu + a] = user.demand;
        }
    }
    for &(u, a) in extra {
        cap[2 + u][2 + nu + a] = inst.user(u).demand;
    }
    for a in 0..na {
        cap[2 + nu + a][1] = inst.capacity(a);
    }
    edmonds_karp(cap, 0, 1)
}

pub fn oracle_feasible(inst: &Instance, extra: &[(usize, usize)]) -> bool {
    oracle_max_flow(inst, extra) == inst.total_demand()
}

/// User-major list of pairs without a preinstall.
pub fn oracle_dashed(inst: &Instance) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (u, user) in inst.users().iter().enumerate() {
        for a in 0..inst.num_apps() {
            if !user.preinstalled.contains(&a) {
                out.push((u, a));
            }
        }
    }
    out
}

/// Smallest activation set size over the whole power set of dashed pairs,
/// or `None` when no subset routes everything.
pub fn power_set_minimum(inst: &Instance) -> Option<usize> {
    let dashed = oracle_dashed(inst);
    assert!(dashed.len() < 32);
    let mut best: Option<usize> = None;
    for mask in 0u32..(1u32 << dashed.len()) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let subset: Vec<_> = (0..dashed.len()).filter(|i| mask >> i & 1 == 1).map(|i| dashed[i]).collect();
        if oracle_feasible(inst, &subset) {
            best = Some(size);
        }
    }
    best
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Minimum of `Σ_{dashed} f(u,a) / t_u` over every integral flow that routes
/// all demand within the caps, found by enumerating each user's split.
pub fn relaxation_by_enumeration(inst: &Instance) -> Option<BigRational> {
    let splits: Vec<Vec<Vec<u64>>> = inst
        .users()
        .iter()
        .map(|u| compositions(u.demand, inst.num_apps()))
        .collect();
    let mut best: Option<BigRational> = None;
    let mut load = vec![0u64; inst.num_apps()];
    let mut choice = vec![0usize; inst.num_users()];
    enumerate_splits(inst, &splits, 0, &mut load, &mut choice, &mut best);
    best
}

fn enumerate_splits(
    inst: &Instance,
    splits: &[Vec<Vec<u64>>],
    u: usize,
    load: &mut Vec<u64>,
    choice: &mut Vec<usize>,
    best: &mut Option<BigRational>,
) {
    if u == splits.len() {
        let mut cost = BigRational::from_integer(BigInt::from(0));
        for (v, &c) in choice.iter().enumerate() {
            let user = inst.user(v);
            for (a, &f) in splits[v][c].iter().enumerate() {
                if f > 0 && !user.preinstalled.contains(&a) {
                    cost += BigRational::new(BigInt::from(f), BigInt::from(user.demand));
                }
            }
        }
        if best.as_ref().is_none_or(|b| cost < *b) {
            *best = Some(cost);
        }
        return;
    }
    for (c, split) in splits[u].iter().enumerate() {
        if split.iter().zip(load.iter()).enumerate().any(|(a, (&f, &l))| l + f > inst.capacity(a)) {
            continue;
        }
        for (a, &f) in split.iter().enumerate() {
            load[a] += f;
        }
        choice[u] = c;
        enumerate_splits(inst, splits, u + 1, load, choice, best);
        for (a, &f) in split.iter().enumerate() {
            load[a] -= f;
        }
    }
}

/// Whether `items` splits into triples that each sum to `bound`.
pub fn triple_partition(items: &[u64], bound: u64) -> bool {
    fn go(rest: &mut Vec<u64>, bound: u64) -> bool {
        let Some(first) = rest.pop() else { return true };
        let n = rest.len();
        for i in 0..n {
            for j in i + 1..n {
                if first + rest[i] + rest[j] == bound {
                    let mut next: Vec<u64> = rest
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, &x)| x)
                        .collect();
                    if go(&mut next, bound) {
                        return true;
                    }
                }
            }
        }
        rest.push(first);
        false
    }
    if !items.len().is_multiple_of(3) {
        return false;
    }
    go(&mut items.to_vec(), bound)
}

/// Random small instance with explicit per-app caps.
pub fn random_instance(rng: &mut impl Rng, max_users: usize, max_apps: usize, max_demand: u64, max_cap: u64) -> Instance {
    let nu = rng.gen_range(1..=max_users);
    let na = rng.gen_range(1..=max_apps);
    let users = (0..nu)
        .map(|u| {
            let pre: Vec<usize> = (0..na).filter(|_| rng.gen_bool(0.35)).collect();
            UserRecord::new(format!("u{u}"), rng.gen_range(1..=max_demand), pre)
        })
        .collect();
    let caps = (0..na).map(|_| rng.gen_range(0..=max_cap)).collect();
    Instance::new(na, CapacitySpec::PerApp(caps), users).unwrap()
}

/// Like [`random_instance`] but with total capacity at least total demand.
pub fn random_feasible_instance(rng: &mut impl Rng, max_users: usize, max_apps: usize, max_demand: u64, max_cap: u64) -> Instance {
    loop {
        let inst = random_instance(rng, max_users, max_apps, max_demand, max_cap);
        if !inst.globally_infeasible() {
            return inst;
        }
    }
}
