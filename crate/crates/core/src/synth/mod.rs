//! Instance generators: market-style synthetic workloads and the 3-Partition
//! hardness construction.

mod generate;
mod reduction;

pub use generate::{default_market_shares, generate, power_law_demands, GenConfig, GenError};
pub use reduction::{check_partition_preconditions, implied_bound, reduce_3partition, PartitionError};
