use thiserror::Error;

use crate::model::{CapacitySpec, Instance, UserRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("3-partition needs a positive multiple of three items, got {0}")]
    BadLength(usize),
    #[error("item sum {sum} is not m * B = {m} * {bound}")]
    SumMismatch { sum: u64, m: u64, bound: u64 },
    #[error("item sum {sum} is not divisible by m = {m}, so B is not an integer")]
    NonIntegralBound { sum: u64, m: u64 },
    #[error("item #{index} = {item} violates B/4 < s < B/2 for B = {bound}")]
    ItemOutOfRange { index: usize, item: u64, bound: u64 },
}

/// Checks `|items| = 3m`, `Σ items = m·B` and `B/4 < s < B/2` for every item.
pub fn check_partition_preconditions(items: &[u64], bound: u64) -> Result<usize, PartitionError> {
    if items.is_empty() || !items.len().is_multiple_of(3) {
        return Err(PartitionError::BadLength(items.len()));
    }
    let m = (items.len() / 3) as u64;
    let sum: u64 = items.iter().sum();
    if sum != m * bound {
        return Err(PartitionError::SumMismatch { sum, m, bound });
    }
    for (index, &item) in items.iter().enumerate() {
        if 4 * item <= bound || 2 * item >= bound {
            return Err(PartitionError::ItemOutOfRange { index, item, bound });
        }
    }
    Ok(m as usize)
}

/// `B = Σ items / m`, failing when it is not an integer.
pub fn implied_bound(items: &[u64]) -> Result<u64, PartitionError> {
    if items.is_empty() || !items.len().is_multiple_of(3) {
        return Err(PartitionError::BadLength(items.len()));
    }
    let m = (items.len() / 3) as u64;
    let sum: u64 = items.iter().sum();
    if !sum.is_multiple_of(m) {
        return Err(PartitionError::NonIntegralBound { sum, m });
    }
    Ok(sum / m)
}

/// Hardness construction: one user per item with `t = s_i`, `m` apps of
/// capacity `B`, no preinstalled apps. Returns the instance and the budget
/// `k = 3m`.
pub fn reduce_3partition(items: &[u64], bound: u64) -> Result<(Instance, usize), PartitionError> {
    let m = check_partition_preconditions(items, bound)?;
    let users = items
        .iter()
        .enumerate()
        .map(|(i, &s)| UserRecord::new(format!("u{}", i + 1), s, []))
        .collect();
    let inst = Instance::new(m, CapacitySpec::PerApp(vec![bound; m]), users)
        .expect("reduction instance is well formed");
    Ok((inst, 3 * m))
}
