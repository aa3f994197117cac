use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModelError;

pub type UserIdx = usize;
pub type AppIdx = usize;

/// Relative slack used when resolving `alpha * T_total` so that products like
/// `0.3 * 10` are not rounded up past the intended integer.
const ALPHA_ROUNDING_SLACK: f64 = 1e-9;

/// How app capacities were specified. `Alpha` is resolved to
/// `ceil(alpha * T_total)` for every app at load time.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacitySpec {
    PerApp(Vec<u64>),
    Alpha(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub id: String,
    pub demand: u64,
    /// Sorted ascending, no duplicates.
    pub preinstalled: Vec<AppIdx>,
}

impl UserRecord {
    pub fn new(id: impl Into<String>, demand: u64, preinstalled: impl IntoIterator<Item = AppIdx>) -> Self {
        Self {
            id: id.into(),
            demand,
            preinstalled: preinstalled.into_iter().collect(),
        }
    }

    pub fn has_preinstalled(&self, app: AppIdx) -> bool {
        self.preinstalled.binary_search(&app).is_ok()
    }
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    num_apps: usize,
    spec: CapacitySpec,
    capacities: Vec<u64>,
    users: Vec<UserRecord>,
    total_demand: u64,
}

impl Instance {
    /// Builds and validates an instance. Preinstall lists are sorted; duplicate
    /// entries are rejected rather than merged.
    pub fn new(num_apps: usize, spec: CapacitySpec, mut users: Vec<UserRecord>) -> Result<Self, ModelError> {
        if num_apps == 0 {
            return Err(ModelError::NoApps);
        }
        let mut seen = HashSet::with_capacity(users.len());
        let mut total: u64 = 0;
        for user in &mut users {
            if !seen.insert(user.id.clone()) {
                return Err(ModelError::DuplicateUserId(user.id.clone()));
            }
            if user.demand == 0 {
                return Err(ModelError::NonPositiveDemand {
                    user: user.id.clone(),
                    demand: 0,
                });
            }
            user.preinstalled.sort_unstable();
            for pair in user.preinstalled.windows(2) {
                if pair[0] == pair[1] {
                    return Err(ModelError::DuplicatePreinstall {
                        user: user.id.clone(),
                        app: pair[0],
                    });
                }
            }
            if let Some(&app) = user.preinstalled.last() {
                if app >= num_apps {
                    return Err(ModelError::AppOutOfRange {
                        user: user.id.clone(),
                        app: app as i64,
                        num_apps,
                    });
                }
            }
            total = total.checked_add(user.demand).ok_or(ModelError::DemandOverflow)?;
        }

        let capacities = match &spec {
            CapacitySpec::PerApp(caps) => {
                if caps.len() != num_apps {
                    return Err(ModelError::CapacityLengthMismatch {
                        expected: num_apps,
                        got: caps.len(),
                    });
                }
                caps.clone()
            }
            CapacitySpec::Alpha(alpha) => vec![resolve_alpha(*alpha, num_apps, total)?; num_apps],
        };

        Ok(Self {
            num_apps,
            spec,
            capacities,
            users,
            total_demand: total,
        })
    }

    pub fn num_apps(&self) -> usize {
        self.num_apps
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn user(&self, u: UserIdx) -> &UserRecord {
        &self.users[u]
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn capacity(&self, a: AppIdx) -> u64 {
        self.capacities[a]
    }

    pub fn capacity_spec(&self) -> &CapacitySpec {
        &self.spec
    }

    pub fn total_demand(&self) -> u64 {
        self.total_demand
    }

    pub fn total_capacity(&self) -> u128 {
        self.capacities.iter().map(|&c| c as u128).sum()
    }

    /// `true` when the aggregate caps cannot absorb the aggregate demand, in
    /// which case no activation set helps.
    pub fn globally_infeasible(&self) -> bool {
        self.total_demand as u128 > self.total_capacity()
    }

    pub fn is_solid(&self, u: UserIdx, a: AppIdx) -> bool {
        self.users[u].has_preinstalled(a)
    }

    pub fn num_solid_edges(&self) -> usize {
        self.users.iter().map(|u| u.preinstalled.len()).sum()
    }

    pub fn num_dashed_edges(&self) -> usize {
        self.users.len() * self.num_apps - self.num_solid_edges()
    }

    /// Dashed edges `(U x A) \ E_solid`, users ascending then apps ascending.
    pub fn dashed_edges(&self) -> DashedEdges<'_> {
        DashedEdges {
            inst: self,
            user: 0,
            app: 0,
            pre_pos: 0,
        }
    }

    pub fn user_index(&self, id: &str) -> Option<UserIdx> {
        self.users.iter().position(|u| u.id == id)
    }

    /// Same users, uniform capacities `ceil(alpha * T_total)`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.num_apps, CapacitySpec::Alpha(alpha), self.users.clone())
    }

    pub fn with_capacities(&self, capacities: Vec<u64>) -> Result<Self, ModelError> {
        Self::new(self.num_apps, CapacitySpec::PerApp(capacities), self.users.clone())
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            capacities: match &self.spec {
                CapacitySpec::PerApp(c) => RawCapacities::PerApp(c.iter().map(|&x| x as i64).collect()),
                CapacitySpec::Alpha(alpha) => RawCapacities::Alpha { alpha: *alpha },
            },
            num_apps: self.num_apps,
            users: self
                .users
                .iter()
                .map(|u| RawUser {
                    demand: u.demand as i64,
                    id: u.id.clone(),
                    preinstalled: u.preinstalled.iter().map(|&a| a as i64).collect(),
                })
                .collect(),
        }
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let raw: RawInstance = serde_json::from_str(text)?;
        validate_instance(raw)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_canonical_json())?;
        Ok(())
    }
}

fn resolve_alpha(alpha: f64, num_apps: usize, total: u64) -> Result<u64, ModelError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(ModelError::InvalidAlpha(alpha));
    }
    // alpha >= 1/n, compared as alpha * n >= 1 with a one-ulp-scale allowance so
    // that alpha = 1.0 / n itself is accepted.
    if alpha * (num_apps as f64) < 1.0 - 1e-12 {
        return Err(ModelError::AlphaBelowFloor { alpha, num_apps });
    }
    Ok(ceil_fraction(alpha, total))
}

/// `ceil(alpha * total)`, snapping to the nearest integer when the product is
/// within floating-point noise of it.
pub fn ceil_fraction(alpha: f64, total: u64) -> u64 {
    let x = alpha * total as f64;
    let r = x.round();
    if (x - r).abs() <= ALPHA_ROUNDING_SLACK * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

pub struct DashedEdges<'a> {
    inst: &'a Instance,
    user: UserIdx,
    app: AppIdx,
    pre_pos: usize,
}

impl Iterator for DashedEdges<'_> {
    type Item = (UserIdx, AppIdx);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.inst.num_apps;
        while self.user < self.inst.users.len() {
            let pre = &self.inst.users[self.user].preinstalled;
            while self.app < n {
                let a = self.app;
                self.app += 1;
                if self.pre_pos < pre.len() && pre[self.pre_pos] == a {
                    self.pre_pos += 1;
                    continue;
                }
                return Some((self.user, a));
            }
            self.user += 1;
            self.app = 0;
            self.pre_pos = 0;
        }
        None
    }
}

/// Parsed-but-unvalidated instance file. Field order is the canonical key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub capacities: RawCapacities,
    pub num_apps: usize,
    pub users: Vec<RawUser>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawCapacities {
    PerApp(Vec<i64>),
    Alpha { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUser {
    pub demand: i64,
    pub id: String,
    #[serde(default)]
    pub preinstalled: Vec<i64>,
}

/// Checks a parsed instance against the model constraints and normalizes it.
pub fn validate_instance(raw: RawInstance) -> Result<Instance, ModelError> {
    let spec = match raw.capacities {
        RawCapacities::PerApp(caps) => {
            let mut out = Vec::with_capacity(caps.len());
            for (a, c) in caps.into_iter().enumerate() {
                if c < 0 {
                    return Err(ModelError::NegativeCapacity { app: a, capacity: c });
                }
                out.push(c as u64);
            }
            CapacitySpec::PerApp(out)
        }
        RawCapacities::Alpha { alpha } => CapacitySpec::Alpha(alpha),
    };
    let mut users = Vec::with_capacity(raw.users.len());
    for ru in raw.users {
        if ru.demand <= 0 {
            return Err(ModelError::NonPositiveDemand {
                user: ru.id,
                demand: ru.demand,
            });
        }
        let mut pre = Vec::with_capacity(ru.preinstalled.len());
        for a in ru.preinstalled {
            if a < 0 || a as u64 >= raw.num_apps as u64 {
                return Err(ModelError::AppOutOfRange {
                    user: ru.id,
                    app: a,
                    num_apps: raw.num_apps,
                });
            }
            pre.push(a as usize);
        }
        users.push(UserRecord {
            id: ru.id,
            demand: ru.demand as u64,
            preinstalled: pre,
        });
    }
    Instance::new(raw.num_apps, spec, users)
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} users, {} transactions, {} apps",
            self.users.len(),
            self.total_demand,
            self.num_apps
        )
    }
}
