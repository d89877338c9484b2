//! Command-line frontend: experiment configuration, deterministic batch
//! execution, and machine-readable output.
//!
//! Every command is a thin wrapper over one library entry point. Outputs are
//! pure functions of the arguments: trial streams are keyed by
//! `(seed, trial_index)` and cross-trial merges are integer-only, so reruns
//! are byte-identical and `--threads` changes wall time, never values.
//! Standard output carries only the result table; progress and errors go to
//! standard error.
//!
//! Exit codes: 0 on success, 2 for configuration or input errors, 3 when a
//! capacity or accuracy limit is hit, 1 for I/O failures.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::branching::{
    bpve_survival_estimate, check_supercritical, teo1_condition, BlockProcess, BlockSampling,
};
use crate::env::{sufcond_check, EnvSchedule};
use crate::error::{Error, Result};
use crate::exact::{lambda_prob_exact, varyenv_chain_exact, ExactOptions, Method};
use crate::growth::GrowthFunction;
use crate::records::{perfect_record_prob, AlphaSpec, ScoreSampler};
use crate::report;
use crate::sim::{estimate_lambda_prob, RootMode, TrialConfig};
use num_traits::ToPrimitive;

#[derive(Parser)]
#[command(
    name = "accperc",
    version,
    about = "Accessibility percolation on spherically symmetric trees: \
             Monte Carlo frontier simulation, exact solvers, branching-process \
             embeddings, record statistics, and varying fitness floors."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for all deterministic trial streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format for tabular results (JSON-only commands ignore this).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trial-parallel commands; 0 means all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RootArg {
    Zero,
    Random,
}

impl From<RootArg> for RootMode {
    fn from(r: RootArg) -> RootMode {
        match r {
            RootArg::Zero => RootMode::Zero,
            RootArg::Random => RootMode::Random,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    FreshRoot,
    Embedded,
}

impl From<ModeArg> for BlockSampling {
    fn from(m: ModeArg) -> BlockSampling {
        match m {
            ModeArg::FreshRoot => BlockSampling::FreshRoot,
            ModeArg::Embedded => BlockSampling::Embedded,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate per-level accessibility probabilities by frontier Monte
    /// Carlo.
    Simulate(SimulateArgs),
    /// Sweep the linear-ceiling growth parameter and tabulate survival at
    /// checkpoint depths.
    Phase(PhaseArgs),
    /// Solve the accessibility recursion exactly (rational polynomials) or
    /// by adaptive quadrature.
    Exact(ExactArgs),
    /// Block branching-process embedding: condition checkers and survival
    /// curves.
    #[command(subcommand)]
    Bpve(BpveCommand),
    /// Perfect-record probability in a competition with growing fields.
    Records(RecordsArgs),
    /// Varying fitness floors: sufficient-condition check and exact
    /// increasing chains.
    #[command(subcommand)]
    Varyenv(VaryenvCommand),
}

fn parse_growth(s: &str) -> std::result::Result<GrowthFunction, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid growth spec: {e}"))
}

fn parse_env(s: &str) -> std::result::Result<EnvSchedule, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid schedule spec: {e}"))
}

#[derive(Args)]
struct SimulateArgs {
    /// Growth function as JSON, e.g. '{"kind":"linear_ceil","alpha":2.0}'.
    #[arg(long, value_parser = parse_growth)]
    growth: GrowthFunction,
    /// Deepest level to simulate.
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    trials: u64,
    /// Root fitness: zero or uniform on the level-0 floor's range.
    #[arg(long, value_enum, default_value_t = RootArg::Random)]
    root: RootArg,
    /// Frontier size cap; the smallest fitness values are kept when the cap
    /// is exceeded, so survival frequencies are lower bounds from the first
    /// capped level on.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
    /// Fitness-floor schedule as JSON, e.g. '{"kind":"geometric","beta":3.0}';
    /// the default keeps every floor at zero.
    #[arg(long, value_parser = parse_env)]
    env: Option<EnvSchedule>,
}

#[derive(Args)]
struct PhaseArgs {
    /// Comma-separated growth parameters, e.g. '0.5,1,1.5,2,3'.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    /// Deepest level to simulate.
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    trials: u64,
    /// Comma-separated depths at which to report; default is `depth` alone.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = RootArg::Random)]
    root: RootArg,
    /// Frontier size cap, as in `simulate`.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Args)]
struct ExactArgs {
    /// Growth function as JSON.
    #[arg(long, value_parser = parse_growth)]
    growth: GrowthFunction,
    /// Target level.
    #[arg(long)]
    depth: u32,
    #[arg(long, value_enum, default_value_t = RootArg::Random)]
    root: RootArg,
    /// Backend: auto, polynomial, or quadrature.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Largest polynomial degree the exact backend accepts.
    #[arg(long, default_value_t = 3000)]
    degree_cap: usize,
    /// Quadrature stops when two panel refinements agree this closely.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Gauss-Legendre points per panel.
    #[arg(long, default_value_t = 12)]
    order: usize,
    #[arg(long, default_value_t = 4096)]
    max_panels: usize,
}

#[derive(Subcommand)]
enum BpveCommand {
    /// Evaluate block mean offspring and the supercriticality condition
    /// min over generations of mu > 1.
    Check(BpveCheckArgs),
    /// Estimate survival fractions of the block process per generation.
    Survive(BpveSurviveArgs),
    /// Check the geometric-mean growth condition for trees with
    /// children(i) = (i+1) * alpha_i.
    Teo1(Teo1Args),
}

#[derive(Args)]
struct BpveCheckArgs {
    #[arg(long, value_parser = parse_growth)]
    growth: GrowthFunction,
    /// Block length in tree levels.
    #[arg(long)]
    n: u32,
    /// Number of generations to evaluate.
    #[arg(long, default_value_t = 20)]
    horizon: u64,
}

#[derive(Args)]
struct BpveSurviveArgs {
    #[arg(long, value_parser = parse_growth)]
    growth: GrowthFunction,
    /// Block length in tree levels.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    generations: u32,
    #[arg(long)]
    trials: u64,
    /// fresh-root draws an independent root fitness per individual;
    /// embedded reuses each parent's terminal fitness.
    #[arg(long, value_enum, default_value_t = ModeArg::FreshRoot)]
    mode: ModeArg,
    /// Individuals kept per generation (smallest fitness first).
    #[arg(long, default_value_t = 100_000)]
    population_cap: usize,
    /// Largest per-block vertex count that may be simulated.
    #[arg(long, default_value_t = 1_000_000_000_000)]
    size_cap: usize,
}

#[derive(Args)]
struct Teo1Args {
    /// Comma-separated positive integer factors alpha_0, alpha_1, ...
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<u64>,
    /// Repeat the factor list cyclically up to the horizon.
    #[arg(long)]
    cycle: bool,
    /// Number of prefix geometric means to evaluate; default is the list
    /// length.
    #[arg(long)]
    horizon: Option<u64>,
}

#[derive(Args)]
struct RecordsArgs {
    /// Participants per edition: 'uniform', 'ceil:A', or a comma-separated
    /// list of counts.
    #[arg(long)]
    alphas: AlphaSpec,
    #[arg(long)]
    editions: u32,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Attach the exact probability from the rational recursion.
    #[arg(long)]
    exact: bool,
    /// max-of-k draws every participant; inverse-cdf draws one value per
    /// edition.
    #[arg(long, value_enum, default_value_t = SamplerArg::InverseCdf)]
    sampler: SamplerArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    MaxOfK,
    InverseCdf,
}

impl From<SamplerArg> for ScoreSampler {
    fn from(s: SamplerArg) -> ScoreSampler {
        match s {
            SamplerArg::MaxOfK => ScoreSampler::MaxOfK,
            SamplerArg::InverseCdf => ScoreSampler::InverseCdf,
        }
    }
}

#[derive(Subcommand)]
enum VaryenvCommand {
    /// Evaluate per-block growth of a d-ary tree under the schedule and
    /// report whether the growth condition holds.
    Check(VaryenvCheckArgs),
    /// Exact increasing-chain probability under the schedule, with its
    /// ratio-product lower bound.
    Chain(VaryenvChainArgs),
}

#[derive(Args)]
struct VaryenvCheckArgs {
    /// Children per vertex of the homogeneous tree.
    #[arg(long)]
    d: u64,
    /// Schedule as JSON, e.g. '{"kind":"geometric","beta":3.0}'.
    #[arg(long, value_parser = parse_env)]
    env: EnvSchedule,
    /// Block length in tree levels.
    #[arg(long)]
    n: u64,
    /// Number of blocks to evaluate.
    #[arg(long, default_value_t = 40)]
    horizon: u64,
}

#[derive(Args)]
struct VaryenvChainArgs {
    /// Schedule as JSON.
    #[arg(long, value_parser = parse_env)]
    env: EnvSchedule,
    /// Chain length: the chain covers levels 0..=n.
    #[arg(long)]
    n: u64,
}

/// Parses the process arguments, runs the command, and exits with the
/// documented code.
pub fn main_entry() -> ! {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code)
}

/// Runs a parsed invocation; library errors map to exit codes in
/// [`main_entry`].
pub fn run(cli: Cli) -> Result<()> {
    let output = with_pool(cli.threads, || match &cli.command {
        Command::Simulate(args) => cmd_simulate(args, cli.seed, cli.format),
        Command::Phase(args) => cmd_phase(args, cli.seed, cli.format),
        Command::Exact(args) => cmd_exact(args),
        Command::Bpve(BpveCommand::Check(args)) => cmd_bpve_check(args),
        Command::Bpve(BpveCommand::Survive(args)) => cmd_bpve_survive(args, cli.seed, cli.format),
        Command::Bpve(BpveCommand::Teo1(args)) => cmd_bpve_teo1(args),
        Command::Records(args) => cmd_records(args, cli.seed, cli.format),
        Command::Varyenv(VaryenvCommand::Check(args)) => cmd_varyenv_check(args),
        Command::Varyenv(VaryenvCommand::Chain(args)) => cmd_varyenv_chain(args),
    })?;
    emit(&cli.out, &output)
}

/// Runs the command inside a dedicated thread pool when an explicit thread
/// count was requested.
fn with_pool(threads: usize, f: impl FnOnce() -> Result<String> + Send) -> Result<String> {
    if threads == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(f)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output structures serialize") + "\n"
}

fn cmd_simulate(args: &SimulateArgs, seed: u64, format: Format) -> Result<String> {
    let config = TrialConfig {
        growth: args.growth.clone(),
        max_depth: args.depth,
        root_mode: args.root.into(),
        frontier_cap: args.cap,
        seed,
        env: args.env.clone().unwrap_or(EnvSchedule::Constant0),
    };
    let est = estimate_lambda_prob(&config, args.trials)?;
    Ok(match format {
        Format::Csv => report::level_estimates_csv(&est),
        Format::Json => json_line(&serde_json::json!({
            "config": config,
            "rows": est.rows,
        })),
    })
}

#[derive(Serialize)]
struct PhaseRow {
    alpha: f64,
    depth: u32,
    p_hat: f64,
    stderr: f64,
}

fn cmd_phase(args: &PhaseArgs, seed: u64, format: Format) -> Result<String> {
    if args.alphas.is_empty() {
        return Err(Error::Config("alpha grid must be nonempty".to_string()));
    }
    let checkpoints = match &args.checkpoints {
        Some(c) if c.is_empty() => {
            return Err(Error::Config("checkpoint list must be nonempty".to_string()))
        }
        Some(c) => c.clone(),
        None => vec![args.depth],
    };
    if let Some(&bad) = checkpoints.iter().find(|&&c| c > args.depth) {
        return Err(Error::Config(format!(
            "checkpoint {bad} exceeds the simulated depth {}",
            args.depth
        )));
    }
    let mut rows = Vec::new();
    for &alpha in &args.alphas {
        let config = TrialConfig {
            growth: GrowthFunction::linear_ceil(alpha)?,
            max_depth: args.depth,
            root_mode: args.root.into(),
            frontier_cap: args.cap,
            seed,
            env: EnvSchedule::Constant0,
        };
        let est = estimate_lambda_prob(&config, args.trials)?;
        for &ckpt in &checkpoints {
            let row = &est.rows[ckpt as usize];
            rows.push(PhaseRow { alpha, depth: ckpt, p_hat: row.p_hat, stderr: row.stderr });
        }
    }
    Ok(match format {
        Format::Csv => report::phase_csv(
            &rows.iter().map(|r| (r.alpha, r.depth, r.p_hat, r.stderr)).collect::<Vec<_>>(),
        ),
        Format::Json => json_line(&rows),
    })
}

fn cmd_exact(args: &ExactArgs) -> Result<String> {
    let method = match args.method.trim() {
        "auto" => None,
        other => Some(other.parse::<Method>()?),
    };
    let opts = ExactOptions {
        method,
        degree_cap: args.degree_cap,
        tol: args.tol,
        order: args.order,
        max_panels: args.max_panels,
    };
    let root: RootMode = args.root.into();
    let result = lambda_prob_exact(&args.growth, args.depth, root, &opts)?;
    Ok(json_line(&serde_json::json!({
        "config": { "growth": args.growth, "root": root },
        "n": args.depth,
        "method": result.method,
        "value": result.value,
        "error_estimate": result.error_estimate,
    })))
}

fn cmd_bpve_check(args: &BpveCheckArgs) -> Result<String> {
    let report = check_supercritical(&args.growth, args.n, args.horizon)?;
    Ok(report::condition_json(&report, "mu_by_generation"))
}

fn cmd_bpve_survive(args: &BpveSurviveArgs, seed: u64, format: Format) -> Result<String> {
    let process = BlockProcess {
        growth: args.growth.clone(),
        block_len: args.n,
        mode: args.mode.into(),
    };
    let curve = bpve_survival_estimate(
        &process,
        args.generations,
        args.trials,
        args.population_cap,
        args.size_cap,
        seed,
    )?;
    Ok(match format {
        Format::Csv => report::survival_csv(&curve),
        Format::Json => json_line(&serde_json::json!({
            "process": process,
            "rows": curve.rows,
        })),
    })
}

fn cmd_bpve_teo1(args: &Teo1Args) -> Result<String> {
    let horizon = args.horizon.unwrap_or(args.alphas.len() as u64);
    let alphas: Vec<u64> = if args.cycle {
        if args.alphas.is_empty() {
            return Err(Error::Config("factor list must be nonempty".to_string()));
        }
        args.alphas.iter().copied().cycle().take(horizon as usize).collect()
    } else {
        args.alphas.clone()
    };
    let report = teo1_condition(&alphas, horizon)?;
    Ok(report::condition_json(&report, "g_by_n"))
}

fn cmd_records(args: &RecordsArgs, seed: u64, format: Format) -> Result<String> {
    let est = perfect_record_prob(
        &args.alphas,
        args.editions,
        args.trials,
        seed,
        args.sampler.into(),
        args.exact,
    )?;
    Ok(match format {
        Format::Csv => report::records_csv(&est),
        Format::Json => json_line(&est),
    })
}

fn cmd_varyenv_check(args: &VaryenvCheckArgs) -> Result<String> {
    let report = sufcond_check(args.d, &args.env, args.n, args.horizon)?;
    Ok(report::condition_json(&report, "mu_by_generation"))
}

fn cmd_varyenv_chain(args: &VaryenvChainArgs) -> Result<String> {
    let exact = varyenv_chain_exact(&args.env, args.n)?;
    let value = exact.to_f64().ok_or_else(|| {
        Error::Accuracy("exact chain probability does not fit in f64".to_string())
    })?;
    Ok(json_line(&serde_json::json!({
        "env": args.env,
        "start_index": args.env.start_index(),
        "n": args.n,
        "chain_product": args.env.chain_product(args.n)?,
        "exact": value,
    })))
}
