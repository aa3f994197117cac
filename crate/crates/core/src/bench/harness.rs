use std::fmt;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::inverse_gini;
use crate::heuristics::{carl, dtas, UserOrder};
use crate::model::{verify_allocation, Algorithm, CapacitySpec, Instance, ModelError, SolveResult, SolveStatus};
use crate::solvers::{exact_solve, lp_lower_bound, ExactConfig, SolveError};

/// The exact solver is refused on instances with more dashed edges than this
/// unless forced.
pub const MAX_EXACT_DASHED_EDGES: usize = 30;
/// The relaxation is refused when its network would have more arcs than this.
pub const MAX_LP_ARCS: u128 = 10_000_000;

pub const CSV_HEADER: &str = "instance,users,total_demand,num_apps,alpha,seed,algorithm,version,status,activations,objective,objective_decimal,unallocated,inverse_gini";

pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "results.json";
pub const GNUPLOT_FILE: &str = "runtime.gp";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot build worker pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no algorithms selected")]
    NoAlgorithms,
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub label: String,
    pub instance: Instance,
    pub seed: Option<u64>,
}

impl BenchInstance {
    pub fn new(label: impl Into<String>, instance: Instance, seed: Option<u64>) -> Self {
        Self {
            label: label.into(),
            instance,
            seed,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchOptions {
    /// Run the exact solver regardless of instance size.
    pub force_exact: bool,
    pub exact_time_limit: Option<Duration>,
    /// Worker pool size; `None` uses rayon's default.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    #[serde(rename = "skipped (scale)")]
    SkippedScale,
    Infeasible,
    BudgetExceeded,
    TimeLimit,
    Error,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Ok => "ok",
            CellStatus::SkippedScale => "skipped (scale)",
            CellStatus::Infeasible => "infeasible",
            CellStatus::BudgetExceeded => "budget-exceeded",
            CellStatus::TimeLimit => "time-limit",
            CellStatus::Error => "error",
        })
    }
}

/// One (instance, algorithm) cell of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub users: usize,
    pub total_demand: u64,
    pub num_apps: usize,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub algorithm: Algorithm,
    pub version: String,
    pub status: CellStatus,
    pub activation_count: Option<u64>,
    /// Exact objective as `p/q` or an integer.
    pub objective: Option<String>,
    pub objective_decimal: Option<f64>,
    pub total_unallocated: Option<u64>,
    pub wall_time_s: Option<f64>,
    pub inverse_gini: Option<f64>,
    /// Whether the allocation passed verification; absent for skipped cells.
    pub verified: Option<bool>,
    pub violations: Vec<String>,
}

impl BenchRecord {
    fn skeleton(bi: &BenchInstance, algorithm: Algorithm, status: CellStatus) -> Self {
        let inst = &bi.instance;
        Self {
            instance: bi.label.clone(),
            users: inst.num_users(),
            total_demand: inst.total_demand(),
            num_apps: inst.num_apps(),
            alpha: match inst.capacity_spec() {
                CapacitySpec::Alpha(a) => Some(*a),
                CapacitySpec::PerApp(_) => None,
            },
            seed: bi.seed,
            algorithm,
            version: algorithm.version().to_string(),
            status,
            activation_count: None,
            objective: None,
            objective_decimal: None,
            total_unallocated: None,
            wall_time_s: None,
            inverse_gini: None,
            verified: None,
            violations: Vec::new(),
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            self.instance.clone(),
            self.users.to_string(),
            self.total_demand.to_string(),
            self.num_apps.to_string(),
            opt(self.alpha.map(|a| a.to_string())),
            opt(self.seed.map(|s| s.to_string())),
            self.algorithm.tag().to_string(),
            self.version.clone(),
            self.status.to_string(),
            opt(self.activation_count.map(|k| k.to_string())),
            opt(self.objective.clone()),
            opt(self.objective_decimal.map(|x| format!("{x:.6}"))),
            opt(self.total_unallocated.map(|x| x.to_string())),
            opt(self.inverse_gini.map(|x| format!("{x:.6}"))),
        ]
    }
}

/// Whether the guards let `algorithm` run on `inst`.
pub fn within_scale(inst: &Instance, algorithm: Algorithm, force_exact: bool) -> bool {
    match algorithm {
        Algorithm::Exact => force_exact || inst.num_dashed_edges() <= MAX_EXACT_DASHED_EDGES,
        Algorithm::Lp => {
            let (u, a) = (inst.num_users() as u128, inst.num_apps() as u128);
            u + u * a + a <= MAX_LP_ARCS
        }
        _ => true,
    }
}

fn solve(inst: &Instance, algorithm: Algorithm, opts: &BenchOptions) -> Result<SolveResult, SolveError> {
    match algorithm {
        Algorithm::Exact => exact_solve(
            inst,
            &ExactConfig {
                time_limit: opts.exact_time_limit,
                ..ExactConfig::default()
            },
        ),
        Algorithm::Lp => lp_lower_bound(inst),
        Algorithm::CarlAsc => Ok(carl(inst, UserOrder::Ascending)),
        Algorithm::CarlDesc => Ok(carl(inst, UserOrder::Descending)),
        Algorithm::Dtas => Ok(dtas(inst)),
    }
}

/// Runs and verifies a single cell.
pub fn run_cell(bi: &BenchInstance, algorithm: Algorithm, opts: &BenchOptions) -> BenchRecord {
    let inst = &bi.instance;
    if !within_scale(inst, algorithm, opts.force_exact) {
        return BenchRecord::skeleton(bi, algorithm, CellStatus::SkippedScale);
    }
    let res = match solve(inst, algorithm, opts) {
        Ok(res) => res,
        Err(SolveError::GloballyInfeasible { .. }) => return BenchRecord::skeleton(bi, algorithm, CellStatus::Infeasible),
        Err(e) => {
            let mut rec = BenchRecord::skeleton(bi, algorithm, CellStatus::Error);
            rec.verified = Some(false);
            rec.violations.push(e.to_string());
            return rec;
        }
    };
    let report = verify_allocation(inst, &res.allocation);
    let rat = res.objective.as_rational();
    let mut rec = BenchRecord::skeleton(
        bi,
        algorithm,
        match res.status {
            SolveStatus::Solved => CellStatus::Ok,
            SolveStatus::BudgetExceeded => CellStatus::BudgetExceeded,
            SolveStatus::TimeLimit => CellStatus::TimeLimit,
        },
    );
    rec.activation_count = Some(res.activation_count() as u64);
    rec.objective = Some(rat.to_string());
    rec.objective_decimal = Some(res.objective.to_f64());
    rec.total_unallocated = Some(res.total_unallocated);
    rec.wall_time_s = Some(res.wall_time.as_secs_f64());
    rec.inverse_gini = inverse_gini(&res.allocation.app_loads(inst.num_apps())).ok();
    rec.verified = Some(report.consistent());
    rec.violations = report.violations.iter().map(|v| v.to_string()).collect();
    rec
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

/// Every (instance, algorithm) pair, instance-major, computed on a worker pool.
pub fn run_comparison(
    instances: &[BenchInstance],
    algorithms: &[Algorithm],
    opts: &BenchOptions,
) -> Result<BenchReport, BenchError> {
    if algorithms.is_empty() {
        return Err(BenchError::NoAlgorithms);
    }
    let cells: Vec<(&BenchInstance, Algorithm)> = instances
        .iter()
        .flat_map(|bi| algorithms.iter().map(move |&a| (bi, a)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|&(bi, algorithm)| {
                let rec = run_cell(bi, algorithm, opts);
                info!("{} / {}: {}", bi.label, algorithm, rec.status);
                rec
            })
            .collect()
    });
    Ok(BenchReport { records })
}

/// One algorithm on `inst` re-capacitated at each `alpha`.
pub fn sweep_capacity(
    label: &str,
    inst: &Instance,
    alphas: &[f64],
    algorithm: Algorithm,
    opts: &BenchOptions,
) -> Result<BenchReport, BenchError> {
    let instances = alphas
        .iter()
        .map(|&alpha| Ok(BenchInstance::new(format!("{label}@{alpha}"), inst.with_alpha(alpha)?, None)))
        .collect::<Result<Vec<_>, BenchError>>()?;
    run_comparison(&instances, &[algorithm], opts)
}

impl BenchReport {
    /// True when no cell that ran failed verification.
    pub fn all_verified(&self) -> bool {
        self.records.iter().all(|r| r.verified != Some(false))
    }

    /// RFC 4180 with LF line endings. Timings are left out so that reruns
    /// produce identical bytes; they live in the JSON report.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for rec in &self.records {
            w.write_record(rec.csv_fields()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Gnuplot script with the timings inlined as a datablock, drawing wall
    /// time against user count on log-log axes, one series per algorithm.
    pub fn to_gnuplot(&self) -> String {
        let mut s = String::from("$runtime << EOD\n# algorithm users total_demand wall_time_s\n");
        let mut algos: Vec<Algorithm> = Vec::new();
        for rec in &self.records {
            if let Some(t) = rec.wall_time_s {
                let _ = writeln!(s, "{} {} {} {:e}", rec.algorithm, rec.users, rec.total_demand, t);
                if !algos.contains(&rec.algorithm) {
                    algos.push(rec.algorithm);
                }
            }
        }
        algos.sort();
        let names: Vec<&str> = algos.iter().map(|a| a.tag()).collect();
        s.push_str("EOD\n\n");
        s.push_str("set logscale xy\nset xlabel \"users\"\nset ylabel \"wall time (s)\"\nset key top left\n");
        let _ = writeln!(
            s,
            "plot for [algo in \"{}\"] $runtime using 2:(strcol(1) eq algo ? $4 : NaN) with linespoints title algo",
            names.join(" ")
        );
        s
    }

    /// Writes the CSV, JSON and gnuplot files into `dir` and returns their paths.
    pub fn write(&self, dir: impl AsRef<Path>) -> io::Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let files = [
            (CSV_FILE, self.to_csv()),
            (JSON_FILE, self.to_json()),
            (GNUPLOT_FILE, self.to_gnuplot()),
        ];
        let mut paths = Vec::with_capacity(files.len());
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            paths.push(path);
        }
        Ok(paths)
    }
}
