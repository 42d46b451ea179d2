mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rangebench::harness::EngineKind;
use rangebench::workload::QueryMode;
use rangebench::RecordKind;

use crate::commands::ScalingMode;
use crate::config::{Overrides, RunConfig, SEED_ENV};

#[derive(Parser)]
#[command(name = "rangebench", version, about = "Spatial index range-query benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic mesh as binary record files.
    Generate(RunArgs),
    /// Calibrate per-worker query workloads and write them out.
    Calibrate(RunArgs),
    /// Run every engine on every worker and write CSV and text reports.
    Bench(RunArgs),
    /// Compare two bench outputs.
    Scaling {
        #[arg(long)]
        small: PathBuf,
        #[arg(long)]
        large: PathBuf,
        #[arg(long, value_enum, default_value = "strong")]
        kind: ScalingMode,
        #[arg(long, default_value = "scaling-out")]
        out: PathBuf,
    },
    /// Re-render the table of a bench output.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated: brute, kdtree, rtree, octree.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<EngineKind>>,
    /// Comma-separated leaf sizes (R-tree: maximum fanout).
    #[arg(long, value_delimiter = ',')]
    leaf_sizes: Option<Vec<usize>>,
    /// points or elements.
    #[arg(long)]
    records: Option<RecordKind>,
    /// full or reduced query counts.
    #[arg(long)]
    mode: Option<QueryMode>,
    /// Check every query against the linear scan before timing.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    runs: Option<usize>,
    /// Nodes per axis of the mesh.
    #[arg(long)]
    mesh_n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(self) -> anyhow::Result<RunConfig> {
        let flags = Overrides {
            seed: self.seed,
            workers: self.workers,
            records: self.records,
            mode: self.mode,
            check: self.check,
            runs: self.runs,
            engines: self.engines,
            leaf_sizes: self.leaf_sizes,
            out: self.out,
            mesh_n: self.mesh_n,
        };
        RunConfig::resolve(self.config.as_deref(), std::env::var(SEED_ENV).ok(), &flags)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => commands::generate(&a.resolve()?),
        Command::Calibrate(a) => commands::calibrate(&a.resolve()?),
        Command::Bench(a) => commands::bench(&a.resolve()?),
        Command::Scaling { small, large, kind, out } => commands::scaling(&small, &large, kind, &out),
        Command::Report { input } => commands::report(&input),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
