use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Allocation, AllocationDoc, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Exact,
    Lp,
    CarlAsc,
    CarlDesc,
    Dtas,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Exact,
        Algorithm::Lp,
        Algorithm::CarlAsc,
        Algorithm::CarlDesc,
        Algorithm::Dtas,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Lp => "lp",
            Algorithm::CarlAsc => "carl-asc",
            Algorithm::CarlDesc => "carl-desc",
            Algorithm::Dtas => "dtas",
        }
    }

    /// Bumped whenever an algorithm's output for a fixed input changes.
    pub fn version(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact/1",
            Algorithm::Lp => "lp/1",
            Algorithm::CarlAsc | Algorithm::CarlDesc => "carl/1",
            Algorithm::Dtas => "dtas/1",
        }
    }

    pub fn is_heuristic(self) -> bool {
        matches!(self, Algorithm::CarlAsc | Algorithm::CarlDesc | Algorithm::Dtas)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected exact, lp, carl-asc, carl-desc or dtas)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Solved,
    /// The exact search exhausted its activation budget.
    BudgetExceeded,
    /// The exact search hit its wall-clock limit; the allocation is a fallback.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Count(u64),
    Fraction(BigRational),
}

impl Objective {
    pub fn as_rational(&self) -> BigRational {
        match self {
            Objective::Count(k) => BigRational::from_integer(BigInt::from(*k)),
            Objective::Fraction(r) => r.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Objective::Count(k) => *k as f64,
            Objective::Fraction(r) => rational_to_f64(r),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Count(k) => write!(f, "{k}"),
            Objective::Fraction(r) => write!(f, "{} ≈ {:.3}", mixed_fraction(r), rational_to_f64(r)),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `859/33` -> `26 1/33`; integers print bare.
pub fn mixed_fraction(r: &BigRational) -> String {
    let (whole, rem) = r.numer().div_rem(r.denom());
    if rem.is_zero() {
        whole.to_string()
    } else if whole.is_zero() {
        format!("{}/{}", r.numer(), r.denom())
    } else {
        format!("{} {}/{}", whole, rem.abs(), r.denom())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub allocation: Allocation,
    pub objective: Objective,
    pub total_unallocated: u64,
    pub wall_time: Duration,
    pub algorithm: Algorithm,
    pub optimal: bool,
    pub status: SolveStatus,
}

impl SolveResult {
    pub fn activation_count(&self) -> usize {
        self.allocation.activation_count()
    }

    pub fn to_doc(&self, inst: &Instance) -> SolveResultDoc {
        let rat = self.objective.as_rational();
        SolveResultDoc {
            activation_count: self.activation_count() as u64,
            algorithm: self.algorithm,
            allocation: self.allocation.to_doc(inst),
            objective: rat.to_string(),
            objective_decimal: rational_to_f64(&rat),
            optimal: self.optimal,
            status: self.status,
            total_unallocated: self.total_unallocated,
            version: self.algorithm.version().to_string(),
            wall_time_s: self.wall_time.as_secs_f64(),
        }
    }

    /// Equality on everything except timing.
    pub fn same_outcome(&self, other: &SolveResult) -> bool {
        self.allocation == other.allocation
            && self.objective == other.objective
            && self.total_unallocated == other.total_unallocated
            && self.algorithm == other.algorithm
            && self.optimal == other.optimal
            && self.status == other.status
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResultDoc {
    pub activation_count: u64,
    pub algorithm: Algorithm,
    pub allocation: AllocationDoc,
    /// Exact objective, `p/q` or an integer.
    pub objective: String,
    pub objective_decimal: f64,
    pub optimal: bool,
    pub status: SolveStatus,
    pub total_unallocated: u64,
    pub version: String,
    pub wall_time_s: f64,
}
