use std::path::{Path, PathBuf};
use std::time::Duration;

use log::info;
use serde::{Deserialize, Serialize};

use meaf_core::bench::{run_comparison, sweep_capacity, tail_drop_eval, BenchInstance, BenchOptions, BenchReport};
use meaf_core::flow::FlowNetwork;
use meaf_core::heuristics::{carl, dtas, UserOrder};
use meaf_core::model::{verify_allocation, Algorithm, Instance, SolveResult, SolveStatus};
use meaf_core::solvers::{check_3partition, exact_solve, export_milp as write_milp, lp_lower_bound, ExactConfig, SolveError};
use meaf_core::synth::{generate as synth_generate, implied_bound, reduce_3partition, GenConfig};

use crate::args::{BenchArgs, ExportMilpArgs, Format, GenerateArgs, GlobalOpts, Reduce3pArgs, SolveArgs, SweepArgs};
use crate::manifest::write_manifest;
use crate::{config_error, exit, ExitContext, Failure};

type Outcome = Result<u8, Failure>;

/// Writes to stdout, ignoring errors such as a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::read(path).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn require_out(g: &GlobalOpts, what: &str) -> Result<PathBuf, Failure> {
    g.out.clone().ok_or_else(|| config_error(format!("{what} needs --out")))
}

fn seconds(s: Option<f64>, flag: &str) -> Result<Option<Duration>, Failure> {
    s.map(|s| Duration::try_from_secs_f64(s).map_err(|_| config_error(format!("{flag} must be a non-negative number of seconds"))))
        .transpose()
}

fn print_csv(header: &[&str], row: &[String]) {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(std::io::stdout());
    let _ = w.write_record(header);
    let _ = w.write_record(row);
    let _ = w.flush();
}

fn print_json(v: &impl Serialize) -> Result<(), Failure> {
    outln!("{}", serde_json::to_string_pretty(v).or_exit(exit::RUNTIME)?);
    Ok(())
}

pub fn generate(g: &GlobalOpts, a: &GenerateArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(path) => GenConfig::from_path(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?,
        None => match (a.users, a.transactions) {
            (Some(u), Some(t)) => GenConfig::new(u, t, 0),
            _ => return Err(config_error("generate needs --config or both --users and --transactions")),
        },
    };
    if let Some(u) = a.users {
        cfg.num_users = u;
    }
    if let Some(t) = a.transactions {
        cfg.num_transactions = t;
    }
    if let Some(n) = a.apps {
        cfg.num_apps = n;
    }
    if let Some(alpha) = a.alpha {
        cfg.alpha = alpha;
    }
    if let Some(s) = a.skew {
        cfg.skew_exponent = s;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    let out = require_out(g, "generate")?;
    let inst = synth_generate(&cfg).or_exit(exit::CONFIG)?;
    inst.write(&out).or_exit(exit::RUNTIME)?;

    let row = [
        inst.num_users().to_string(),
        inst.total_demand().to_string(),
        inst.num_apps().to_string(),
        out.display().to_string(),
    ];
    match g.format {
        None => outln!(
            "generated {} users, {} transactions, {} apps -> {}",
            row[0], row[1], row[2], row[3]
        ),
        Some(Format::Csv) => print_csv(&["users", "total_demand", "num_apps", "path"], &row),
        Some(Format::Json) => print_json(&serde_json::json!({
            "users": inst.num_users(),
            "total_demand": inst.total_demand(),
            "num_apps": inst.num_apps(),
            "path": row[3],
        }))?,
    }
    Ok(exit::OK)
}

pub fn solve(g: &GlobalOpts, a: &SolveArgs) -> Outcome {
    if a.algo != Algorithm::Exact && (a.budget.is_some() || a.time_limit.is_some() || a.no_prune) {
        return Err(config_error("--budget, --time-limit and --no-prune apply only to --algo exact"));
    }
    let time_limit = seconds(a.time_limit, "--time-limit")?;
    let inst = read_instance(&a.instance)?;
    let res = match a.algo {
        Algorithm::Exact => exact_solve(
            &inst,
            &ExactConfig {
                max_budget: a.budget,
                time_limit,
                prune: !a.no_prune,
            },
        ),
        Algorithm::Lp => lp_lower_bound(&inst),
        Algorithm::CarlAsc => Ok(carl(&inst, UserOrder::Ascending)),
        Algorithm::CarlDesc => Ok(carl(&inst, UserOrder::Descending)),
        Algorithm::Dtas => Ok(dtas(&inst)),
    };
    let res = match res {
        Ok(r) => r,
        Err(e @ SolveError::GloballyInfeasible { .. }) => return Err(e).or_exit(exit::INFEASIBLE),
        Err(e @ SolveError::InvalidConfig(_)) => return Err(e).or_exit(exit::CONFIG),
        Err(e) => return Err(e).or_exit(exit::RUNTIME),
    };
    let report = verify_allocation(&inst, &res.allocation);
    if !report.consistent() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure {
            code: exit::RUNTIME,
            error: anyhow::anyhow!("allocation failed verification: {}", list.join("; ")),
        });
    }

    let doc = res.to_doc(&inst);
    if let Some(out) = &g.out {
        let mut text = serde_json::to_string_pretty(&doc).or_exit(exit::RUNTIME)?;
        text.push('\n');
        std::fs::write(out, text).or_exit(exit::RUNTIME)?;
    }
    if let Some(dot) = &a.dot {
        let active: Vec<_> = res.allocation.activated().iter().copied().collect();
        std::fs::write(dot, FlowNetwork::build(&inst, &active).to_dot()).or_exit(exit::RUNTIME)?;
    }
    print_solve_summary(g.format, &res, &doc)?;

    Ok(if res.status == SolveStatus::BudgetExceeded {
        exit::BUDGET_EXCEEDED
    } else if inst.globally_infeasible() {
        exit::INFEASIBLE
    } else {
        exit::OK
    })
}

fn print_solve_summary(format: Option<Format>, res: &SolveResult, doc: &meaf_core::model::SolveResultDoc) -> Result<(), Failure> {
    match format {
        None => {
            let status = match res.status {
                SolveStatus::Solved if res.optimal => "optimal".to_string(),
                SolveStatus::Solved => "solved".to_string(),
                other => serde_json::to_value(other).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            };
            outln!(
                "{}: objective {}, {} activations, {} unallocated, {} ({:.3} ms)",
                res.algorithm,
                res.objective,
                res.activation_count(),
                res.total_unallocated,
                status,
                res.wall_time.as_secs_f64() * 1e3
            );
        }
        Some(Format::Json) => print_json(doc)?,
        Some(Format::Csv) => print_csv(
            &["algorithm", "activations", "objective", "objective_decimal", "unallocated", "optimal", "wall_time_s"],
            &[
                res.algorithm.to_string(),
                doc.activation_count.to_string(),
                doc.objective.clone(),
                format!("{:.6}", doc.objective_decimal),
                doc.total_unallocated.to_string(),
                doc.optimal.to_string(),
                doc.wall_time_s.to_string(),
            ],
        ),
    }
    Ok(())
}

/// Bench config file. Flags on the command line override its fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub algorithms: Vec<Algorithm>,
    /// Instance files; relative paths resolve against the config file.
    #[serde(default)]
    pub instances: Vec<PathBuf>,
    /// Template for generated instances, one per seed.
    #[serde(default)]
    pub generator: Option<GenConfig>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub force_exact: bool,
    #[serde(default)]
    pub exact_time_limit_s: Option<f64>,
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn bench_config(g: &GlobalOpts, a: &BenchArgs) -> Result<BenchConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let mut cfg: BenchConfig = read_config(path)?;
            let base = path.parent().unwrap_or(Path::new(""));
            for p in &mut cfg.instances {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            cfg
        }
        None => BenchConfig::default(),
    };
    if !a.algos.is_empty() {
        cfg.algorithms = a.algos.clone();
    }
    if cfg.algorithms.is_empty() {
        cfg.algorithms = Algorithm::ALL.to_vec();
    }
    cfg.instances.extend(a.instances.iter().cloned());
    if !a.seeds.is_empty() {
        cfg.seeds = a.seeds.clone();
    } else if let Some(seed) = g.seed {
        cfg.seeds = vec![seed];
    }
    if let (Some(u), Some(t)) = (a.users, a.transactions) {
        if cfg.generator.is_none() {
            cfg.generator = Some(GenConfig::new(u, t, 0));
        }
    }
    if let Some(gen) = &mut cfg.generator {
        if let Some(u) = a.users {
            gen.num_users = u;
        }
        if let Some(t) = a.transactions {
            gen.num_transactions = t;
        }
        if let Some(n) = a.apps {
            gen.num_apps = n;
        }
        if let Some(alpha) = a.alpha {
            gen.alpha = alpha;
        }
        if cfg.seeds.is_empty() {
            cfg.seeds = vec![gen.seed];
        }
    } else if a.users.is_some() || a.transactions.is_some() || a.apps.is_some() || a.alpha.is_some() {
        return Err(config_error("generated bench instances need both --users and --transactions"));
    }
    cfg.force_exact |= a.force;
    if a.time_limit.is_some() {
        cfg.exact_time_limit_s = a.time_limit;
    }
    if cfg.instances.is_empty() && cfg.generator.is_none() {
        return Err(config_error("bench needs instance files or a generator (--config, --instances or --users/--transactions)"));
    }
    Ok(cfg)
}

fn emit_report(g: &GlobalOpts, report: &BenchReport) {
    match g.format {
        Some(Format::Csv) => out!("{}", report.to_csv()),
        Some(Format::Json) => out!("{}", report.to_json()),
        None => {
            for r in &report.records {
                let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
                outln!(
                    "{:<24} {:<10} {:<16} activations={} objective={} unallocated={}",
                    r.instance,
                    r.algorithm.tag(),
                    r.status.to_string(),
                    opt(r.activation_count.map(|x| x.to_string())),
                    opt(r.objective.clone()),
                    opt(r.total_unallocated.map(|x| x.to_string())),
                );
            }
        }
    }
}

fn verified_exit(report: &BenchReport) -> u8 {
    if report.all_verified() {
        exit::OK
    } else {
        eprintln!("error: some cells failed verification; see results.json");
        exit::RUNTIME
    }
}

pub fn bench(g: &GlobalOpts, a: &BenchArgs) -> Outcome {
    let cfg = bench_config(g, a)?;
    let out = require_out(g, "bench")?;
    let mut instances = Vec::new();
    for path in &cfg.instances {
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        instances.push(BenchInstance::new(label, read_instance(path)?, None));
    }
    if let Some(gen) = &cfg.generator {
        for &seed in &cfg.seeds {
            let gc = GenConfig { seed, ..gen.clone() };
            let inst = synth_generate(&gc).or_exit(exit::CONFIG)?;
            info!("generated seed {seed}: {} users", inst.num_users());
            instances.push(BenchInstance::new(format!("gen-s{seed}"), inst, Some(seed)));
        }
    }
    let opts = BenchOptions {
        force_exact: cfg.force_exact,
        exact_time_limit: seconds(cfg.exact_time_limit_s, "exact_time_limit_s")?,
        threads: g.threads.map(|t| t as usize),
    };
    let report = run_comparison(&instances, &cfg.algorithms, &opts).or_exit(exit::RUNTIME)?;
    let files = report.write(&out).or_exit(exit::RUNTIME)?;
    write_manifest(&out, "bench", &cfg, &cfg.instances, &files).or_exit(exit::RUNTIME)?;
    emit_report(g, &report);
    Ok(verified_exit(&report))
}

#[derive(Serialize)]
struct SweepConfig<'a> {
    instance: &'a Path,
    algorithm: Algorithm,
    alphas: &'a [f64],
    tail_drop: bool,
    force_exact: bool,
}

pub fn sweep(g: &GlobalOpts, a: &SweepArgs) -> Outcome {
    let out = require_out(g, "sweep")?;
    if a.alphas.is_empty() {
        return Err(config_error("--alphas must list at least one value"));
    }
    let inst = read_instance(&a.instance)?;
    let label = a.instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let opts = BenchOptions {
        force_exact: a.force,
        threads: g.threads.map(|t| t as usize),
        ..Default::default()
    };
    let report = sweep_capacity(&label, &inst, &a.alphas, a.algo, &opts).or_exit(exit::CONFIG)?;
    let mut files = report.write(&out).or_exit(exit::RUNTIME)?;
    if a.tail_drop {
        let rows = tail_drop_eval(&inst, &a.alphas);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["alpha", "capacity", "users_with_remaining", "users_with_remaining_pct", "unallocated"])
            .or_exit(exit::RUNTIME)?;
        for r in &rows {
            w.write_record([
                r.alpha.to_string(),
                r.capacity.to_string(),
                r.users_with_remaining.to_string(),
                format!("{:.4}", r.users_with_remaining_pct),
                r.unallocated.to_string(),
            ])
            .or_exit(exit::RUNTIME)?;
        }
        let path = out.join("tail_drop.csv");
        std::fs::write(&path, w.into_inner().or_exit(exit::RUNTIME)?).or_exit(exit::RUNTIME)?;
        files.push(path);
    }
    let cfg = SweepConfig {
        instance: &a.instance,
        algorithm: a.algo,
        alphas: &a.alphas,
        tail_drop: a.tail_drop,
        force_exact: a.force,
    };
    write_manifest(&out, "sweep", &cfg, std::slice::from_ref(&a.instance), &files).or_exit(exit::RUNTIME)?;
    emit_report(g, &report);
    Ok(verified_exit(&report))
}

pub fn reduce3p(g: &GlobalOpts, a: &Reduce3pArgs) -> Outcome {
    let bound = match a.bound {
        Some(b) => b,
        None => implied_bound(&a.items).or_exit(exit::CONFIG)?,
    };
    let (inst, k) = reduce_3partition(&a.items, bound).or_exit(exit::CONFIG)?;
    let yes = check_3partition(&a.items, bound).or_exit(exit::CONFIG)?;
    let answer = if yes { "YES" } else { "NO" };

    if let Some(out) = &g.out {
        std::fs::create_dir_all(out).or_exit(exit::RUNTIME)?;
        let path = out.join("instance.json");
        inst.write(&path).or_exit(exit::RUNTIME)?;
        let cfg = serde_json::json!({ "items": a.items, "bound": bound });
        write_manifest(out, "reduce3p", &cfg, &[], &[path]).or_exit(exit::RUNTIME)?;
    }
    match g.format {
        None => outln!("{answer} (k={k})"),
        Some(Format::Csv) => print_csv(&["answer", "k", "m", "bound"], &[answer.into(), k.to_string(), (k / 3).to_string(), bound.to_string()]),
        Some(Format::Json) => print_json(&serde_json::json!({ "answer": answer, "k": k, "m": k / 3, "bound": bound }))?,
    }
    Ok(exit::OK)
}

pub fn export_milp(g: &GlobalOpts, a: &ExportMilpArgs) -> Outcome {
    let out = require_out(g, "export-milp")?;
    let inst = read_instance(&a.instance)?;
    std::fs::create_dir_all(&out).or_exit(exit::RUNTIME)?;
    let path = out.join("model.lp");
    write_milp(&inst, &path).or_exit(exit::RUNTIME)?;
    let cfg = serde_json::json!({ "instance": a.instance });
    write_manifest(&out, "export-milp", &cfg, std::slice::from_ref(&a.instance), std::slice::from_ref(&path)).or_exit(exit::RUNTIME)?;
    match g.format {
        None => outln!("wrote {}", path.display()),
        Some(Format::Csv) => print_csv(&["path", "dashed_edges"], &[path.display().to_string(), inst.num_dashed_edges().to_string()]),
        Some(Format::Json) => print_json(&serde_json::json!({ "path": path, "dashed_edges": inst.num_dashed_edges() }))?,
    }
    Ok(exit::OK)
}
