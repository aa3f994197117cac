use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AppIdx, CapacitySpec, Instance, ModelError, UserRecord};

const DEFAULT_SHARES_TOML: &str = include_str!("../../data/market_shares.toml");
const SHARE_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid market shares: {0}")]
    InvalidShares(String),
    #[error("invalid apps-per-user distribution: {0}")]
    InvalidAppsPerUser(String),
    #[error("{transactions} transactions cannot give {users} users at least one each")]
    TooFewTransactions { users: usize, transactions: u64 },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of a synthetic market-style instance.
///
/// Randomness comes from ChaCha8 seeded with `seed`, and the power law uses
/// the pure-Rust `libm` routines, so a config generates the same instance on
/// every platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub num_users: usize,
    pub num_transactions: u64,
    #[serde(default = "default_num_apps")]
    pub num_apps: usize,
    /// Preinstall weights per app; defaults to the bundled 15-app shape, or
    /// uniform for other app counts.
    #[serde(default)]
    pub market_shares: Option<Vec<f64>>,
    /// Relative weights for a user having 1, 2, 3, ... preinstalled apps.
    #[serde(default = "default_apps_per_user")]
    pub apps_per_user: Vec<f64>,
    /// Demand of the user at rank `r` (1-based) is proportional to `r^-s`.
    #[serde(default = "default_skew")]
    pub skew_exponent: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_num_apps() -> usize {
    15
}

fn default_apps_per_user() -> Vec<f64> {
    vec![0.55, 0.30, 0.15]
}

fn default_skew() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.30
}

impl GenConfig {
    pub fn new(num_users: usize, num_transactions: u64, seed: u64) -> Self {
        Self {
            num_users,
            num_transactions,
            num_apps: default_num_apps(),
            market_shares: None,
            apps_per_user: default_apps_per_user(),
            skew_exponent: default_skew(),
            alpha: default_alpha(),
            seed,
        }
    }

    /// Reads TOML (by `.toml` extension) or JSON.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, GenError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| GenError::Parse(e.to_string()))
        } else {
            serde_json::from_str(&text).map_err(|e| GenError::Parse(e.to_string()))
        }
    }

    pub fn shares(&self) -> Result<Vec<f64>, GenError> {
        let shares = match &self.market_shares {
            Some(s) => s.clone(),
            None if self.num_apps == 15 => default_market_shares(),
            None => vec![1.0 / self.num_apps as f64; self.num_apps],
        };
        if shares.len() != self.num_apps {
            return Err(GenError::InvalidShares(format!(
                "{} shares for {} apps",
                shares.len(),
                self.num_apps
            )));
        }
        if let Some((a, s)) = shares.iter().enumerate().find(|(_, s)| !(s.is_finite() && **s > 0.0)) {
            return Err(GenError::InvalidShares(format!("app {a} has share {s}; shares must be positive")));
        }
        let sum: f64 = shares.iter().sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return Err(GenError::InvalidShares(format!("shares sum to {sum}, expected 1")));
        }
        Ok(shares)
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.num_apps == 0 {
            return Err(GenError::InvalidConfig("num_apps must be positive".into()));
        }
        if self.num_users == 0 {
            return Err(GenError::InvalidConfig("num_users must be positive".into()));
        }
        if self.num_transactions < self.num_users as u64 {
            return Err(GenError::TooFewTransactions {
                users: self.num_users,
                transactions: self.num_transactions,
            });
        }
        if !(self.skew_exponent.is_finite() && self.skew_exponent >= 0.0) {
            return Err(GenError::InvalidConfig(format!(
                "skew_exponent must be finite and non-negative, got {}",
                self.skew_exponent
            )));
        }
        let apu = &self.apps_per_user;
        if apu.is_empty() || apu.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || apu.iter().sum::<f64>() <= 0.0 {
            return Err(GenError::InvalidAppsPerUser(format!("{apu:?}")));
        }
        Ok(())
    }
}

/// The bundled default preinstall weights.
pub fn default_market_shares() -> Vec<f64> {
    #[derive(Deserialize)]
    struct File {
        shares: Vec<f64>,
    }
    let file: File = toml::from_str(DEFAULT_SHARES_TOML).expect("bundled market shares parse");
    file.shares
}

/// Generates an instance. Demands follow the power law and sum to exactly
/// `num_transactions` (every user gets at least one); each user draws a
/// preinstall count and then that many distinct apps weighted by market share.
pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    cfg.validate()?;
    let shares = cfg.shares()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut demands = power_law_demands(cfg.num_users, cfg.num_transactions, cfg.skew_exponent);
    demands.shuffle(&mut rng);

    let mut users = Vec::with_capacity(cfg.num_users);
    let mut remaining: Vec<AppIdx> = Vec::with_capacity(cfg.num_apps);
    for (i, &demand) in demands.iter().enumerate() {
        let k = (sample_weighted(&mut rng, &cfg.apps_per_user) + 1).min(cfg.num_apps);
        remaining.clear();
        remaining.extend(0..cfg.num_apps);
        let mut pre = Vec::with_capacity(k);
        for _ in 0..k {
            let weights: Vec<f64> = remaining.iter().map(|&a| shares[a]).collect();
            let pick = sample_weighted(&mut rng, &weights);
            pre.push(remaining.remove(pick));
        }
        users.push(UserRecord::new(format!("u{i}"), demand, pre));
    }
    Ok(Instance::new(cfg.num_apps, CapacitySpec::Alpha(cfg.alpha), users)?)
}

/// Index drawn with probability proportional to `weights`.
fn sample_weighted(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    // Rounding left x just past the end; take the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// `1 + share_r` per rank `r`, where the `total - users` extra units are split
/// by largest remainder over weights `r^-skew`. Sorted heaviest first.
pub fn power_law_demands(users: usize, total: u64, skew: f64) -> Vec<u64> {
    let extra = total - users as u64;
    let weights: Vec<f64> = (1..=users).map(|r| libm::pow(r as f64, -skew)).collect();
    let wsum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| extra as f64 * w / wsum).collect();
    let mut share: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = share.iter().sum();

    let mut by_fraction: Vec<usize> = (0..users).collect();
    by_fraction.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    if assigned <= extra {
        let mut missing = extra - assigned;
        for &r in by_fraction.iter().cycle() {
            if missing == 0 {
                break;
            }
            share[r] += 1;
            missing -= 1;
        }
    } else {
        // Floating-point overshoot: take units back from the smallest remainders.
        let mut surplus = assigned - extra;
        for &r in by_fraction.iter().rev().cycle() {
            if surplus == 0 {
                break;
            }
            if share[r] > 0 {
                share[r] -= 1;
                surplus -= 1;
            }
        }
    }
    share.into_iter().map(|s| s + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_shares_are_valid() {
        let shares = default_market_shares();
        assert_eq!(shares.len(), 15);
        assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(GenConfig::new(10, 100, 0).shares().is_ok());
    }

    #[test]
    fn demands_sum_exactly() {
        for (u, t, s) in [(1, 5, 1.0), (7, 7, 2.0), (1000, 123_457, 1.2), (333, 1_000_000, 0.0)] {
            let d = power_law_demands(u, t, s);
            assert_eq!(d.iter().sum::<u64>(), t);
            assert!(d.iter().all(|&x| x >= 1));
        }
    }

    #[test]
    fn zero_skew_is_flat() {
        let d = power_law_demands(97, 10_000, 0.0);
        let (min, max) = (d.iter().min().unwrap(), d.iter().max().unwrap());
        assert!(max - min <= 1);
    }

    #[test]
    fn generated_instance_is_valid_and_seeded() {
        let cfg = GenConfig::new(200, 5_000, 42);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_eq!(a.total_demand(), 5_000);
        assert!(a.users().iter().all(|u| !u.preinstalled.is_empty() && u.preinstalled.len() <= 3));
        let c = generate(&GenConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.to_canonical_json(), c.to_canonical_json());
    }

    #[test]
    fn config_errors() {
        let mut cfg = GenConfig::new(10, 5, 0);
        assert!(matches!(generate(&cfg), Err(GenError::TooFewTransactions { .. })));
        cfg.num_transactions = 100;
        cfg.alpha = 0.05;
        assert!(matches!(generate(&cfg), Err(GenError::Model(ModelError::AlphaBelowFloor { .. }))));
        cfg.alpha = 0.3;
        cfg.num_apps = 2;
        cfg.market_shares = Some(vec![1.0, 0.0]);
        assert!(matches!(generate(&cfg), Err(GenError::InvalidShares(_))));
        cfg.market_shares = Some(vec![0.5, 0.6]);
        assert!(matches!(generate(&cfg), Err(GenError::InvalidShares(_))));
        cfg.market_shares = None;
        cfg.apps_per_user = vec![];
        assert!(matches!(generate(&cfg), Err(GenError::InvalidAppsPerUser(_))));
    }

    #[test]
    fn market_share_drives_preinstall_frequency() {
        let mut cfg = GenConfig::new(1, 5, 0);
        cfg.num_apps = 2;
        cfg.market_shares = Some(vec![0.999, 0.001]);
        cfg.apps_per_user = vec![1.0];
        cfg.alpha = 1.0;
        let runs = 10_000;
        let hits = (0..runs)
            .filter(|&seed| {
                let inst = generate(&GenConfig { seed, ..cfg.clone() }).unwrap();
                assert_eq!(inst.user(0).demand, 5);
                inst.user(0).has_preinstalled(0)
            })
            .count();
        let freq = hits as f64 / runs as f64;
        assert!((freq - 0.999).abs() <= 0.01, "frequency {freq}");
    }

    #[test]
    fn heavy_users_dominate() {
        for seed in 0..5 {
            let inst = generate(&GenConfig::new(1_000, 100_000, seed)).unwrap();
            let mut d: Vec<u64> = inst.users().iter().map(|u| u.demand).collect();
            d.sort_unstable_by(|a, b| b.cmp(a));
            let top: u64 = d[..100].iter().sum();
            assert!(2 * top >= inst.total_demand(), "top decile carries {top}");
        }
    }

    #[test]
    fn config_files() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("gen.toml");
        std::fs::write(&toml_path, "num_users = 5\nnum_transactions = 50\nseed = 9\n").unwrap();
        let cfg = GenConfig::from_path(&toml_path).unwrap();
        assert_eq!(cfg, GenConfig::new(5, 50, 9));
        let json_path = dir.path().join("gen.json");
        std::fs::write(&json_path, r#"{"num_users": 5, "num_transactions": 50, "seed": 9, "bogus": 1}"#).unwrap();
        assert!(matches!(GenConfig::from_path(&json_path), Err(GenError::Parse(_))));
    }
}
