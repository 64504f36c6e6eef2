mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_coreset::GraphFormat;

#[derive(Parser, Debug)]
#[command(
    name = "graph-coreset",
    version,
    about = "k-median coresets on weighted graphs"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a coreset of a data set.
    Build(BuildArgs),
    /// Compare coreset constructions by empirical error.
    Benchmark(BenchmarkArgs),
    /// Run local search on the data, or on a coreset of it.
    Solve(SolveArgs),
    /// Score a coreset against random or given center sets.
    Eval(EvalArgs),
    /// Generate graphs and data sets.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    /// edge-list or dimacs-gr.
    #[arg(long, default_value = "edge-list", value_parser = parse_format)]
    format: GraphFormat,
}

fn parse_format(s: &str) -> Result<GraphFormat, String> {
    s.parse().map_err(|e: graph_coreset::Error| e.to_string())
}

#[derive(Args, Debug)]
struct BicriteriaArgs {
    /// Outer bicriteria iterations.
    #[arg(long, default_value_t = 3)]
    outer_iterations: usize,
    /// Sampler runs per iteration; the cheapest is kept.
    #[arg(long, default_value_t = 5)]
    sampler_runs: usize,
    /// Sampling rounds per run (default: ceil(log2 |X|)).
    #[arg(long)]
    rounds: Option<usize>,
    /// Draws per round (default: k).
    #[arg(long)]
    per_round: Option<usize>,
}

impl BicriteriaArgs {
    fn config(&self) -> graph_coreset::BicriteriaConfig {
        graph_coreset::BicriteriaConfig {
            outer_iterations: self.outer_iterations,
            repetitions: self.sampler_runs,
            rounds: self.rounds,
            per_round: self.per_round,
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = true)]
struct SizeArgs {
    /// Number of importance samples.
    #[arg(long, conflicts_with_all = ["epsilon", "delta", "sdim", "c0"])]
    size: Option<usize>,
    #[arg(long, requires_all = ["delta", "sdim"])]
    epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    delta: Option<f64>,
    /// Shattering-dimension bound used for sizing.
    #[arg(long, requires = "epsilon")]
    sdim: Option<usize>,
    #[arg(long, requires = "epsilon")]
    c0: Option<f64>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Data points as vertex_id,weight CSV.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    size: SizeArgs,
    #[command(flatten)]
    bicriteria: BicriteriaArgs,
    #[arg(long, default_value_t = 5.0)]
    rho: f64,
    #[arg(long)]
    seed: u64,
    /// Coreset CSV; metadata goes to the same path with `.meta` appended.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Coreset,
    Uniform,
    Identity,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    k: usize,
    /// Comma-separated coreset sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "coreset,uniform")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 2000)]
    center_sets: usize,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[command(flatten)]
    bicriteria: BicriteriaArgs,
    #[arg(long, default_value_t = 5.0)]
    rho: f64,
    #[arg(long)]
    seed: u64,
    /// CSV report; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report with per-repetition arrays.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write all timings as zero so reruns are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Data X, centers from V.
    #[value(name = "XxV")]
    XxV,
    /// Data D, centers from V.
    #[value(name = "DxV")]
    DxV,
    /// Data D, centers from support(D).
    #[value(name = "DxD")]
    DxD,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Full data set; required for XxV and used to report cost_full.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Coreset CSV; required for DxV and DxD.
    #[arg(long)]
    coreset: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    coreset: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated center set; random sets are drawn when omitted.
    #[arg(long, value_delimiter = ',', conflicts_with = "center_sets")]
    centers: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2000)]
    center_sets: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Lower-bound graph with a role sidecar.
    Lowerbound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
        /// vertex_id,role CSV.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Star with ceil(100 k / epsilon) leaves.
    Star {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Road-like grid with jittered weights and a few missing edges.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random connected graph.
    Random {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic data set on a graph.
    Dataset {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        count: usize,
        /// Concentrate points around this vertex.
        #[arg(long, requires = "region_size")]
        region_center: Option<usize>,
        /// Vertices in the concentration region.
        #[arg(long, requires = "region_center")]
        region_size: Option<usize>,
        #[arg(long, default_value_t = 0.9)]
        fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COESET_LOG", "error"))
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
