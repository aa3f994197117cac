use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meaf_core::model::Algorithm;

#[derive(Debug, Parser)]
#[command(name = "meaf", version, about = "Minimum edge activation flow toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for generated instances (overrides any seed in a config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (generate, solve) or directory (bench, sweep, reduce3p, export-milp).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Machine-readable stdout instead of the text summary.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for bench and sweep.
    #[arg(long, global = true, env = "MEAF_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance from a generator config.
    Generate(GenerateArgs),
    /// Solve an instance with one algorithm.
    Solve(SolveArgs),
    /// Compare algorithms over a set of instances.
    Bench(BenchArgs),
    /// Re-run one algorithm on an instance over a range of capacity fractions.
    Sweep(SweepArgs),
    /// Decide a 3-Partition instance through the activation-flow reduction.
    Reduce3p(Reduce3pArgs),
    /// Write the integer program of an instance in LP format.
    ExportMilp(ExportMilpArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator config, TOML or JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub transactions: Option<u64>,
    #[arg(long)]
    pub apps: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub skew: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
    #[arg(long, value_parser = parse_algorithm, default_value = "dtas")]
    pub algo: Algorithm,
    /// Largest activation count the exact solver may try.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Wall-clock limit for the exact solver, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Disable relaxation-based pruning in the exact solver.
    #[arg(long)]
    pub no_prune: bool,
    /// Also write the flow network restricted to solid and activated edges as DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Bench config, TOML or JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Instance files to include.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub instances: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    pub algos: Vec<Algorithm>,
    /// Seeds for generated instances, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long)]
    pub transactions: Option<u64>,
    #[arg(long)]
    pub apps: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Run the exact solver even above the size guard.
    #[arg(long)]
    pub force: bool,
    /// Wall-clock limit per exact cell, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
    #[arg(long, value_parser = parse_algorithm, default_value = "dtas")]
    pub algo: Algorithm,
    /// Capacity fractions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.10,0.15,0.20,0.25,0.30,0.35")]
    pub alphas: Vec<f64>,
    /// Also evaluate preinstalled-only tail-drop at each fraction.
    #[arg(long)]
    pub tail_drop: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct Reduce3pArgs {
    /// The 3m items, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub items: Vec<u64>,
    /// Target triple sum; defaults to sum / m.
    #[arg(long = "bound", visible_alias = "B")]
    pub bound: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExportMilpArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}
