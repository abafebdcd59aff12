//! `hetg` command line: synthetic graph generation, semantic graph builds,
//! restructuring and buffer simulation, each writing a `report.json` and a
//! `manifest.json` into its output directory, plus CSV aggregation of runs.

mod commands;
pub mod manifest;
pub mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::model::Metapath;
use crate::restructure::SubgraphKind;

pub use manifest::{RunManifest, RunReport, MANIFEST_FILE, REPORT_FILE};

/// Exit status for invalid input or configuration.
pub const EXIT_USER_ERROR: u8 = 1;
/// Exit status for argument parse failures (clap's convention).
pub const EXIT_USAGE: u8 = 2;
/// Exit status for failed internal verification.
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "hetg", version, about = "Heterogeneous graph semantic build, restructure and buffer simulation toolkit")]
pub struct Cli {
    /// Print the machine-readable report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic heterogeneous graph directory.
    Gen(GenArgs),
    /// Build semantic graphs for metapaths and report their cost.
    Build(BuildArgs),
    /// Decouple and recouple a semantic graph into three subgraphs.
    Restructure(RestructureArgs),
    /// Replay neighbor aggregation against an LRU feature buffer.
    Simulate(SimulateArgs),
    /// Aggregate the reports of several runs into one CSV table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Built-in dataset shape.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// JSON generator config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Multiplier on preset vertex counts.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Overrides the config seed when given with `--config`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ctt,
    Naive,
    Both,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated metapaths, built in the given order.
    #[arg(long, value_delimiter = ',', required_unless_present = "sweep_hops")]
    pub metapaths: Vec<Metapath>,
    #[arg(long, value_enum, default_value = "ctt")]
    pub mode: ModeArg,
    /// Build every metapath of each hop length in `MIN:MAX`, in both modes.
    #[arg(long, value_parser = parse_hop_range)]
    pub sweep_hops: Option<(usize, usize)>,
    /// Also store intermediate compositions in the trie.
    #[arg(long)]
    pub insert_intermediates: bool,
    /// Write each built semantic graph to `semantic/<metapath>.edges`.
    #[arg(long)]
    pub save_graphs: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Which semantic graph a command works on.
#[derive(Debug, Clone, Args)]
pub struct GraphInput {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Relation name in the graph schema.
    #[arg(long, conflicts_with_all = ["metapath", "edges"])]
    pub relation: Option<String>,
    /// Metapath built from the graph's relations.
    #[arg(long, conflicts_with = "edges")]
    pub metapath: Option<Metapath>,
    /// Edge file of a built semantic graph; needs `--src` and `--dst`.
    #[arg(long, requires_all = ["src", "dst"])]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub src: Option<String>,
    #[arg(long)]
    pub dst: Option<String>,
}

#[derive(Debug, Args)]
pub struct RestructureArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Restructure and verify this many random bipartite graphs instead.
    #[arg(long)]
    pub fuzz: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest side of a fuzz graph.
    #[arg(long, default_value_t = 140)]
    pub max_side: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Original,
    Restructured,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Partition directory from `restructure`; computed in place if absent.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long, required_unless_present = "capacity_bytes", conflicts_with = "capacity_bytes")]
    pub capacity_features: Option<usize>,
    #[arg(long)]
    pub capacity_bytes: Option<u64>,
    /// Bytes per source feature; defaults to 4 bytes per feature dimension
    /// of the source type, or 256 when the dimension is unknown.
    #[arg(long)]
    pub feature_bytes: Option<u64>,
    #[arg(long, value_enum, default_value = "original")]
    pub order: OrderArg,
    /// Subgraph execution order for the restructured layout.
    #[arg(long, value_delimiter = ',', default_value = "gs2,gs3,gs1")]
    pub schedule: Vec<SubgraphKind>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directories holding `manifest.json` and `report.json`.
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_hop_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad hop count `{t}`: {e}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let h = parse(s)?;
            (h, h)
        }
    };
    if lo < 1 || lo > hi {
        return Err(format!("hop range must satisfy 1 <= MIN <= MAX, got {s}"));
    }
    Ok((lo, hi))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => commands::gen(&a, cli.json),
        Command::Build(a) => commands::build(&a, cli.json),
        Command::Restructure(a) => commands::restructure(&a, cli.json),
        Command::Simulate(a) => commands::simulate(&a, cli.json),
        Command::Report(a) => report::run(&a),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USER_ERROR,
    }
}

/// Caps the global rayon pool at `HETG_THREADS` when set.
pub fn init_threads() {
    let Ok(v) = std::env::var("HETG_THREADS") else {
        return;
    };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("HETG_THREADS ignored: {e}");
            }
        }
        _ => log::warn!("HETG_THREADS must be a positive integer, got `{v}`"),
    }
}

/// Entry point of the `hetg` binary.
pub fn main_entry() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
