use std::cmp::Reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ceil_fraction, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GiniError {
    #[error("inverse Gini score is undefined for an empty load vector")]
    Empty,
    #[error("inverse Gini score is undefined when every load is zero")]
    AllZero,
}

/// Inverse Gini score `1 - G` of per-app loads, where
/// `G = Σ_i Σ_j |x_i - x_j| / (2 n² x̄)` runs over every app including idle ones.
///
/// The pairwise sum is evaluated exactly in integers from the sorted loads,
/// so the only rounding is the final division: uniform loads give exactly
/// 1.0 and a single busy app gives the correctly rounded `1/n`.
pub fn inverse_gini(loads: &[u64]) -> Result<f64, GiniError> {
    if loads.is_empty() {
        return Err(GiniError::Empty);
    }
    let n = loads.len() as u128;
    let total: u128 = loads.iter().map(|&x| x as u128).sum();
    if total == 0 {
        return Err(GiniError::AllZero);
    }
    let mut sorted = loads.to_vec();
    sorted.sort_unstable();
    // Σ_{i<j} (x_(j) - x_(i)) = Σ_k (2k - n + 1) x_(k); the full double sum is twice that.
    let mut plus: u128 = 0;
    let mut minus: u128 = 0;
    for (k, &x) in sorted.iter().enumerate() {
        let k = k as u128;
        let x = x as u128;
        if 2 * k + 1 >= n {
            plus += (2 * k + 1 - n) * x;
        } else {
            minus += (n - 2 * k - 1) * x;
        }
    }
    let pair_sum = 2 * (plus - minus);
    let denom = 2 * n * total;
    Ok((denom - pair_sum) as f64 / denom as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDropRow {
    pub alpha: f64,
    pub capacity: u64,
    pub users_with_remaining: usize,
    pub users_with_remaining_pct: f64,
    pub unallocated: u64,
}

/// Cap enforcement without any new installs: users in input order place
/// their demand on their own preinstalled apps, largest remaining capacity
/// first, and whatever does not fit is dropped.
pub fn tail_drop_eval(inst: &Instance, alphas: &[f64]) -> Vec<TailDropRow> {
    alphas
        .iter()
        .map(|&alpha| {
            let capacity = ceil_fraction(alpha, inst.total_demand());
            let mut remaining = vec![capacity; inst.num_apps()];
            let mut users_with_remaining = 0;
            let mut unallocated = 0;
            let mut apps = Vec::new();
            for user in inst.users() {
                apps.clear();
                apps.extend_from_slice(&user.preinstalled);
                apps.sort_by_key(|&a| (Reverse(remaining[a]), a));
                let mut left = user.demand;
                for &a in &apps {
                    let take = left.min(remaining[a]);
                    remaining[a] -= take;
                    left -= take;
                }
                if left > 0 {
                    users_with_remaining += 1;
                    unallocated += left;
                }
            }
            TailDropRow {
                alpha,
                capacity,
                users_with_remaining,
                users_with_remaining_pct: 100.0 * users_with_remaining as f64 / inst.num_users().max(1) as f64,
                unallocated,
            }
        })
        .collect()
}
