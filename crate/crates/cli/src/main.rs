//! `qubo-admm`: generate knapsack instances, solve them with the
//! dual-decomposition or slack-penalty pipelines, and run benchmark grids.
//!
//! Exit codes are a stable contract: 0 success with a feasible result,
//! 2 no feasible solution found, 3 input error (files), 4 parameter error
//! (flags and values).

mod bench;
mod instance;
mod methods;
mod record;

use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use qubo_admm::qkp::{self, MAX_ORACLE_VARS};

use methods::{Method, Postprocess, SolverSpec};
use record::RunRecord;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unwritable, or malformed files.
    Input(String),
    /// Flag values that do not make sense, alone or together.
    Parameter(String),
}

impl CliError {
    pub fn param(e: impl fmt::Display) -> Self {
        CliError::Parameter(e.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Parameter(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Parameter(msg) => f.write_str(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qubo-admm",
    version,
    about = "Constrained binary optimization by dual decomposition over pluggable QUBO samplers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write deterministic knapsack instance files
    Generate(GenerateArgs),
    /// Solve one instance file; prints a result record as JSON
    Solve(SolveArgs),
    /// Run a (n, delta, method) grid and report accuracy and timing
    Benchmark(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of variables
    #[arg(long)]
    n: usize,
    /// Profit density in (0, 1]
    #[arg(long)]
    delta: f64,
    /// Base seed; instance k uses seed + 1000 k (plus degeneracy retries)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many instances to write
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Output directory (default: $QUBO_ADMM_OUT_DIR, else current dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Solver knobs shared by `solve` and `benchmark`. Defaults mirror the
/// library defaults.
#[derive(Args, Clone)]
struct SolverFlags {
    /// Sample postprocessing: none, greedy, or boltzmann
    #[arg(long, value_enum, default_value_t = Postprocess::None)]
    postprocess: Postprocess,
    /// Inverse temperature for boltzmann postprocessing
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    /// Gibbs sweeps per chain in boltzmann postprocessing
    #[arg(long, default_value_t = 10)]
    gibbs_sweeps: usize,
    /// Annealing reads per sampler call
    #[arg(long, default_value_t = 2000)]
    reads: usize,
    /// Annealing sweeps per read
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
    /// Augmented-penalty weight
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Iteration budget
    #[arg(long, default_value_t = 30)]
    t_max: usize,
    /// Stop after this many iterations without an incumbent improvement
    #[arg(long, default_value_t = 10)]
    t_conv: usize,
    /// Residual-norm stopping threshold
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Violation weight in the reported infeasibility-aware merit
    /// (default: derived from the objective range)
    #[arg(long)]
    gamma: Option<f64>,
    /// Slack-penalty weight for the slack method
    /// (default: one above the objective range)
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file
    instance: PathBuf,
    /// Solution method
    #[arg(long, value_enum)]
    method: Method,
    #[command(flatten)]
    flags: SolverFlags,
    /// Seed for all solver randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated list of sizes, each at most 24
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated list of densities in (0, 1]
    #[arg(long, value_delimiter = ',', required = true)]
    delta_list: Vec<f64>,
    /// Instances per (n, delta) cell
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Comma-separated methods to compare
    #[arg(long, value_delimiter = ',', value_enum, required = true)]
    methods: Vec<Method>,
    /// Root seed; every instance and solver seed derives from it
    #[arg(long)]
    seed: u64,
    /// Solver seeds per instance
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    flags: SolverFlags,
    /// Aggregate CSV path (default: <out-dir>/benchmark.csv)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write tidy series (mape and time against n) to this CSV
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Output directory (default: $QUBO_ADMM_OUT_DIR, else current dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl SolverFlags {
    fn spec(&self, method: Method, seed: u64) -> SolverSpec {
        SolverSpec {
            method,
            postprocess: self.postprocess,
            beta: self.beta,
            gibbs_sweeps: self.gibbs_sweeps,
            reads: self.reads,
            sweeps: self.sweeps,
            rho: self.rho,
            t_max: self.t_max,
            t_conv: self.t_conv,
            epsilon: self.epsilon,
            gamma: self.gamma,
            mu: self.mu,
            seed,
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("QUBO_ADMM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run_command(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run_command(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<i32, CliError> {
    if args.n == 0 {
        return Err(CliError::Parameter("n must be at least 1".into()));
    }
    if !(args.delta.is_finite() && args.delta > 0.0 && args.delta <= 1.0) {
        return Err(CliError::Parameter(format!(
            "density must be in (0, 1], got {}",
            args.delta
        )));
    }
    if args.count == 0 {
        return Err(CliError::Parameter("count must be at least 1".into()));
    }
    let dir = out_dir(&args.out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    for k in 0..args.count {
        let slot = args.seed + 1000 * k as u64;
        let (inst, _skipped) =
            qkp::generate_nondegenerate(args.n, args.delta, slot).map_err(CliError::param)?;
        let path = instance::write_instance(&dir, &inst)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> Result<i32, CliError> {
    let inst = instance::read_instance(&args.instance)?;
    let spec = args.flags.spec(args.method, args.seed);
    let outcome = methods::run(&inst, &spec)?;
    let optimal = if args.method == Method::Oracle {
        outcome.found
    } else if inst.n <= MAX_ORACLE_VARS && inst.capacity >= 0 {
        Some(qkp::brute_force_opt(&inst).map_err(CliError::param)?.1)
    } else {
        None
    };
    let id = args.instance.file_stem().map_or_else(
        || "instance".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    let record = RunRecord::new(id, &spec, &outcome, optimal);
    println!("{}", record.to_line());
    Ok(if outcome.feasible { 0 } else { 2 })
}

fn cmd_benchmark(args: BenchArgs) -> Result<i32, CliError> {
    let dir = out_dir(&args.out_dir);
    let cfg = bench::BenchConfig {
        n_list: args.n_list.clone(),
        delta_list: args.delta_list.clone(),
        instances: args.instances,
        methods: args.methods.clone(),
        repeats: args.repeats,
        seed: args.seed,
        csv_path: args
            .csv
            .clone()
            .unwrap_or_else(|| dir.join("benchmark.csv")),
        plot_path: args.plot_data.clone(),
    };
    // The method slot in the base spec is a placeholder; cells override it.
    let base = args.flags.spec(args.methods[0], args.seed);
    bench::run(&cfg, &base)
}
