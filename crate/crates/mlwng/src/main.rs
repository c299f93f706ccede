//! Command-line front end: generate networks, run single games, execute
//! configured sweeps, and compute graph statistics.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mlwng::config::{ConfigError, SweepFile};
use mlwng::edgelist::{edge_list_string, parse_edge_list, EdgeListError};
use mlwng::experiment::ExperimentError;
use mlwng::game::{run_observed, GameError, PairSelection};
use mlwng::generate::{
    gen_baseline, gen_mlw, mlw_defaults, BaselineKind, BaselineParams, GenError, MlwParams,
    DEFAULT_SW_REWIRE_PROB,
};
use mlwng::graph::Graph;
use mlwng::metrics::DEFAULT_STAGNATION_WINDOW;
use mlwng::output::write_results;
use mlwng::run_experiment;

/// Naming game on multi-local-world community networks.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 runtime
/// (generation) failure. Non-convergence of a game is data, not failure.
#[derive(Parser)]
#[command(name = "mlwng", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network, write its edge list, and print its statistics.
    Generate(GenerateArgs),
    /// Run one naming game and print the outcome.
    Run(RunArgs),
    /// Execute a configured sweep into a results directory.
    Sweep(SweepArgs),
    /// Print the statistics of an edge-list file.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    /// Multi-local-world community network.
    Mlw,
    /// Uniform random graph with an exact edge budget.
    Rg,
    /// Rewired ring lattice.
    Sw,
    /// Preferential-attachment growth.
    Sf,
    /// Fully connected graph.
    Complete,
}

/// Flags describing a network to generate. Flag values override nothing:
/// they are the single source for one-off generation (sweeps read files).
#[derive(Args)]
struct NetworkArgs {
    /// Network model.
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Node count.
    #[arg(long)]
    n: Option<usize>,
    /// Fraction of nodes pre-assigned to initial local worlds (mlw).
    #[arg(long)]
    rho: Option<f64>,
    /// Initial local-world size (mlw).
    #[arg(long)]
    m0: Option<usize>,
    /// Preferential-attachment offset (mlw).
    #[arg(long, default_value_t = mlw_defaults::ALPHA)]
    alpha: f64,
    /// Dispatch bound for adding local worlds (mlw).
    #[arg(long, default_value_t = mlw_defaults::PROBS.0)]
    p1: f64,
    /// Dispatch bound for adding nodes (mlw).
    #[arg(long, default_value_t = mlw_defaults::PROBS.1)]
    p2: f64,
    /// Dispatch bound for adding intra-world edges (mlw).
    #[arg(long, default_value_t = mlw_defaults::PROBS.2)]
    p3: f64,
    /// Dispatch bound for deleting intra-world edges (mlw).
    #[arg(long, default_value_t = mlw_defaults::PROBS.3)]
    p4: f64,
    /// Edges wired per new node (mlw).
    #[arg(long, default_value_t = mlw_defaults::NODE_EDGES)]
    e1: usize,
    /// Intra-world edges added per dispatch (mlw).
    #[arg(long, default_value_t = mlw_defaults::INTRA_ADDITIONS)]
    e2: usize,
    /// Intra-world edges deleted per dispatch (mlw).
    #[arg(long, default_value_t = mlw_defaults::INTRA_DELETIONS)]
    e3: usize,
    /// Inter-world edges added per dispatch (mlw).
    #[arg(long, default_value_t = mlw_defaults::INTER_ADDITIONS)]
    e4: usize,
    /// Target average degree (rg, sw, sf).
    #[arg(long)]
    k: Option<f64>,
    /// Rewiring probability (sw).
    #[arg(long, default_value_t = DEFAULT_SW_REWIRE_PROB)]
    rewire: f64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Generation seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output edge-list path (defaults to a name derived from the flags).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Edge-list file to play on (alternative to --model flags).
    #[arg(long, conflicts_with = "model")]
    graph: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkArgs,
    /// Game seed (the network, when generated here, uses a derived seed).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Iteration cap.
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    /// Write the sampled trajectory CSV here.
    #[arg(long)]
    series: Option<PathBuf>,
    /// Write a per-step interaction log here (debug aid; every step).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// How speaker/hearer pairs are drawn.
    #[arg(long, value_enum, default_value_t = PairArg::SpeakerFirst)]
    pair_selection: PairArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairArg {
    SpeakerFirst,
    EdgeUniform,
}

impl From<PairArg> for PairSelection {
    fn from(value: PairArg) -> Self {
        match value {
            PairArg::SpeakerFirst => PairSelection::SpeakerFirst,
            PairArg::EdgeUniform => PairSelection::EdgeUniform,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (TOML).
    config: PathBuf,
    /// Results directory (defaults to results/<config stem>).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Concurrent runs (0 = all available parallelism). Overrides the file.
    #[arg(long)]
    workers: Option<usize>,
    /// Runs per sweep point. Overrides the file.
    #[arg(long)]
    runs: Option<usize>,
    /// Iteration cap per run. Overrides the file.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Base seed. Overrides the file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StatsArgs {
    /// Edge-list file.
    path: PathBuf,
}

enum AppError {
    Usage(String),
    Runtime(String),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<GenError> for AppError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::InvalidParams(_) => AppError::Usage(e.to_string()),
            GenError::Disconnected { .. } => AppError::Runtime(e.to_string()),
        }
    }
}

impl From<ExperimentError> for AppError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidConfig(_) => AppError::Usage(e.to_string()),
            ExperimentError::Generator { .. } => AppError::Runtime(e.to_string()),
        }
    }
}

impl From<GameError> for AppError {
    fn from(e: GameError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<EdgeListError> for AppError {
    fn from(e: EdgeListError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

impl NetworkArgs {
    fn model(&self) -> Result<Model, AppError> {
        self.model
            .ok_or_else(|| AppError::Usage("--model is required (or pass --graph)".into()))
    }

    fn require<T: Copy>(&self, value: Option<T>, flag: &str, model: &str) -> Result<T, AppError> {
        value.ok_or_else(|| AppError::Usage(format!("--{flag} is required for --model {model}")))
    }

    fn mlw_params(&self) -> Result<MlwParams, AppError> {
        let n = self.require(self.n, "n", "mlw")?;
        let rho = self.require(self.rho, "rho", "mlw")?;
        let m0 = self.require(self.m0, "m0", "mlw")?;
        let mut params = MlwParams::from_rho(n, rho, m0)?;
        params.alpha = self.alpha;
        params.p1 = self.p1;
        params.p2 = self.p2;
        params.p3 = self.p3;
        params.p4 = self.p4;
        params.e1 = self.e1;
        params.e2 = self.e2;
        params.e3 = self.e3;
        params.e4 = self.e4;
        params.validate()?;
        Ok(params)
    }

    fn baseline_params(&self, kind: BaselineKind, tag: &str) -> Result<BaselineParams, AppError> {
        let params = BaselineParams {
            kind,
            n: self.require(self.n, "n", tag)?,
            target_avg_degree: self.require(self.k, "k", tag)?,
            sw_rewire_prob: self.rewire,
        };
        params.validate()?;
        Ok(params)
    }

    fn build(&self, seed: u64) -> Result<(Graph, String), AppError> {
        match self.model()? {
            Model::Mlw => {
                let params = self.mlw_params()?;
                let net = gen_mlw(&params, seed)?;
                let name = format!(
                    "mlw_n{}_rho{}_m0{}_seed{seed}.edges",
                    params.n, params.rho, params.m0
                );
                Ok((net.graph, name))
            }
            Model::Rg => {
                let params = self.baseline_params(BaselineKind::RandomGraph, "rg")?;
                let name = format!("rg_n{}_k{}_seed{seed}.edges", params.n, params.target_avg_degree);
                Ok((gen_baseline(&params, seed)?, name))
            }
            Model::Sw => {
                let params = self.baseline_params(BaselineKind::SmallWorld, "sw")?;
                let name = format!("sw_n{}_k{}_seed{seed}.edges", params.n, params.target_avg_degree);
                Ok((gen_baseline(&params, seed)?, name))
            }
            Model::Sf => {
                let params = self.baseline_params(BaselineKind::ScaleFree, "sf")?;
                let name = format!("sf_n{}_k{}_seed{seed}.edges", params.n, params.target_avg_degree);
                Ok((gen_baseline(&params, seed)?, name))
            }
            Model::Complete => {
                let n = self.require(self.n, "n", "complete")?;
                if n < 2 {
                    return Err(AppError::Usage("complete graphs need --n >= 2".into()));
                }
                Ok((Graph::complete(n), format!("complete_n{n}.edges")))
            }
        }
    }
}

fn stats_line(g: &Graph) -> String {
    let stats = g.stats();
    let mut line = format!(
        "n={} edges={} avg_degree={:.4} avg_path_length={} avg_clustering={:.4} connected={}",
        g.node_count(),
        g.edge_count(),
        stats.avg_degree,
        stats
            .avg_path_length
            .map(|pl| format!("{pl:.4}"))
            .unwrap_or_else(|| "undefined".into()),
        stats.avg_clustering,
        stats.connected,
    );
    if g.communities().is_some() {
        match g.community_ratio() {
            Ok(report) => {
                write!(
                    line,
                    " mean_ratio={:.6} ratio_std={:.6} communities={} excluded={}",
                    report.mean_ratio,
                    report.std,
                    report.per_community.len() + report.excluded.len(),
                    report.excluded.len()
                )
                .unwrap();
            }
            Err(e) => write!(line, " mean_ratio=undefined ({e})").unwrap(),
        }
    }
    line
}

fn cmd_generate(args: GenerateArgs) -> Result<(), AppError> {
    let (graph, default_name) = args.network.build(args.seed)?;
    let path = args.output.unwrap_or_else(|| PathBuf::from(default_name));
    fs::write(&path, edge_list_string(&graph))?;
    println!("wrote {}", path.display());
    println!("{}", stats_line(&graph));
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), AppError> {
    if args.max_steps == 0 {
        return Err(AppError::Usage("--max-steps must be >= 1".into()));
    }
    let graph = match &args.graph {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
            parse_edge_list(&text)?
        }
        None => {
            // reserve the given seed for the game itself
            let network_seed = mlwng::seed::derive_seed(args.seed, &[0]);
            args.network.build(network_seed)?.0
        }
    };
    let pair_selection: PairSelection = args.pair_selection.into();

    let mut trace = match &args.trace {
        Some(path) => Some(std::io::BufWriter::new(fs::File::create(path)?)),
        None => None,
    };
    let (outcome, series) = run_observed(&graph, args.seed, args.max_steps, pair_selection, |step, o| {
        if let Some(w) = trace.as_mut() {
            writeln!(
                w,
                "{step} {} {} {} {} {}",
                o.speaker, o.hearer, o.uttered, o.success, o.invented
            )
            .expect("trace write");
        }
    })?;

    if let Some(path) = &args.series {
        let mut csv = String::from("step,n_total,n_diff,success_rate\n");
        for s in series.samples() {
            writeln!(csv, "{},{},{},{}", s.step, s.n_total, s.n_diff, s.success_rate).unwrap();
        }
        fs::write(path, csv)?;
    }

    match outcome.convergence_time {
        Some(t) => println!("CONVERGED step={t} n_total={}", outcome.final_n_total),
        None => {
            let stagnant = series
                .detect_stagnation(DEFAULT_STAGNATION_WINDOW)
                .map(|s| s.to_string())
                .unwrap_or_else(|_| "n/a".into());
            println!(
                "NON-CONVERGED steps={} final_n_diff={} final_n_total={} stagnant={stagnant}",
                outcome.steps, outcome.final_n_diff, outcome.final_n_total
            );
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), AppError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| AppError::Usage(format!("{}: {e}", args.config.display())))?;
    let mut file = SweepFile::parse(&text)?;
    // flags override file values
    if args.workers.is_some() {
        file.workers = args.workers;
    }
    if args.runs.is_some() {
        file.runs = args.runs;
    }
    if args.max_steps.is_some() {
        file.max_steps = args.max_steps;
    }
    if args.seed.is_some() {
        file.base_seed = args.seed;
    }
    let cfg = file.resolve()?;

    let out_dir = args.output.unwrap_or_else(|| {
        let stem = args
            .config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        Path::new("results").join(stem)
    });

    let progress = |done: usize, total: usize| {
        eprint!("\rruns {done}/{total}");
        if done == total {
            eprintln!();
        }
    };
    let result = run_experiment(&cfg, Some(&progress))?;
    write_results(&out_dir, &result)?;
    if let Some(rho_th) = result.rho_th {
        println!("rho_th={rho_th}");
    }
    println!("wrote {}", out_dir.display());
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), AppError> {
    let text = fs::read_to_string(&args.path)
        .map_err(|e| AppError::Usage(format!("{}: {e}", args.path.display())))?;
    let graph = parse_edge_list(&text)?;
    println!("{}", stats_line(&graph));
    Ok(())
}
