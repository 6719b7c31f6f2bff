use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphsom::pipeline::{
    self, exit_code, InitMethod, LayoutConfig, LayoutMode, Method, RunConfig, DEFAULT_K,
};
use graphsom::som::{SomGrid, DEFAULT_EPOCHS};
use graphsom::{Error, Result};

#[derive(Parser)]
#[command(name = "graphsom", version, about = "Cluster weighted graphs and draw the clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a graph and write the partition document.
    Cluster(ClusterArgs),
    /// Summarize vertex attributes per cluster.
    Attrs(AttrsArgs),
    /// Draw a partition or a trained map as SVG.
    Layout(LayoutArgs),
    /// Print partition statistics for a graph.
    Stats(StatsArgs),
}

fn parse_radius(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected START,END")?;
    let start = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let end = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((start, end))
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = |s: &str| s.parse::<Method>().map_err(|e| e.to_string()))]
    method: Method,
    /// Number of clusters for the k-means methods.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// Spectral embedding dimension; defaults to k.
    #[arg(long)]
    p: Option<usize>,
    /// Heat-kernel diffusion time.
    #[arg(long, default_value_t = graphsom::linalg::DEFAULT_BETA)]
    beta: f64,
    /// Map size as ROWSxCOLS; required for the SOM methods.
    #[arg(long, value_parser = |s: &str| s.parse::<SomGrid>().map_err(|e| e.to_string()))]
    grid: Option<SomGrid>,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    /// Neighborhood radius at the first and last epoch, as START,END.
    #[arg(long, value_parser = parse_radius)]
    radius: Option<(f64, f64)>,
    #[arg(long, default_value_t = graphsom::clustering::DEFAULT_RESTARTS)]
    restarts: usize,
    /// Map initialization: principal or dirichlet.
    #[arg(long, default_value = "principal", value_parser = |s: &str| s.parse::<InitMethod>().map_err(|e| e.to_string()))]
    init: InitMethod,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AttrsArgs {
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    attributes: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, value_parser = |s: &str| s.parse::<LayoutMode>().map_err(|e| e.to_string()))]
    mode: LayoutMode,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    partition: Option<PathBuf>,
    /// Partition document produced by a SOM method.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    svg: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    partition: PathBuf,
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Cluster(a) => {
            let config = RunConfig {
                input: a.input,
                method: a.method,
                k: a.k,
                p: a.p.unwrap_or(a.k),
                beta: a.beta,
                grid: a.grid,
                epochs: a.epochs,
                radius: a.radius,
                init: a.init,
                seed: a.seed,
                restarts: a.restarts,
                out: a.out,
                report: a.report,
            };
            print_json(&pipeline::run_cluster(&config)?)
        }
        Command::Attrs(a) => {
            pipeline::run_attributes(&a.partition, &a.attributes, &a.out)?;
            Ok(())
        }
        Command::Layout(a) => {
            if a.mode != LayoutMode::Summary && a.model.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "layout mode {:?} requires --model",
                    a.mode
                )));
            }
            let config = LayoutConfig {
                mode: a.mode,
                input: a.input,
                partition: a.model.or(a.partition).expect("clap enforces one source"),
                svg: a.svg,
                dot: a.dot,
                iterations: a.iterations,
                seed: a.seed,
            };
            pipeline::run_layout(&config)?;
            Ok(())
        }
        Command::Stats(a) => print_json(&pipeline::run_stats(&a.input, &a.partition)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("graphsom: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
