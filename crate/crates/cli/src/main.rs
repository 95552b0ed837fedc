//! `tdcube` — train, evaluate, and inspect n-tuple TD agents for the
//! 2x2x2 and 3x3x3 twisty puzzles.

mod commands;
mod presets;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tdcube_core::agent_io::AgentIoError;
use tdcube_core::oracle::OracleError;
use tdcube_core::{CubeVariant, Metric};

/// Command outcome; the variant decides the process exit code
/// (usage = 1, data/format = 2, resource = 3).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Resource(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Resource(m) => f.write_str(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<AgentIoError> for CliError {
    fn from(e: AgentIoError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> CliError {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "tdcube",
    version,
    about = "n-tuple TD learning with tree-search evaluation for 2x2x2 and 3x3x3 twisty puzzles",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master random seed; identical seeds reproduce every output file.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for parallel evaluation (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Directory where output files are written.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out_dir: PathBuf,
    /// Training configuration file (TOML); consumed by `train`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one or more agents from a preset or a TOML config file.
    Train(TrainArgs),
    /// Evaluate saved agents over a range of scramble depths.
    Eval(EvalArgs),
    /// Average number of distinct symmetric states per scramble depth.
    Symcount(SymcountArgs),
    /// Enumerate the full 2x2x2 state space by breadth-first search.
    Oracle(OracleArgs),
    /// Solve a single scramble with a saved agent, printing each move.
    Solve(SolveArgs),
    /// Measure a 2x2x2 agent against exact distances from an oracle table.
    Audit(AuditArgs),
}

#[derive(Args)]
pub struct TrainArgs {
    /// Built-in preset name (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    /// Print the available preset names and exit.
    #[arg(long)]
    list_presets: bool,
    /// Number of independently seeded agents to train (seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Override: run name used for output file stems.
    #[arg(long)]
    name: Option<String>,
    /// Override: total training episodes (full-episode) or samples (one-step-davi).
    #[arg(long)]
    episodes: Option<u64>,
    /// Override: symmetric states per value estimate (0 = none).
    #[arg(long)]
    n_sym: Option<usize>,
    /// Override: maximum scramble depth during training.
    #[arg(long)]
    p_max: Option<usize>,
    /// Override: training mode (full-episode | one-step-davi).
    #[arg(long)]
    mode: Option<String>,
    /// Override: learning-curve cadence in episodes (0 = no curve).
    #[arg(long)]
    eval_every: Option<u64>,
    /// Override: training-log cadence in episodes (0 = no log file).
    #[arg(long)]
    log_every: Option<u64>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Saved agent file; repeat the flag to average over replicates.
    #[arg(long = "agent", required = true, value_name = "FILE")]
    pub agent: Vec<PathBuf>,
    /// Require this cube variant (error if an agent differs).
    #[arg(long)]
    pub variant: Option<CubeVariant>,
    /// Scramble depth or inclusive range, e.g. 5 or 1-14.
    #[arg(long = "p", default_value = "1-14", value_name = "P[-P]")]
    pub p_range: String,
    /// Comma-separated search budgets per move (0 = greedy, no search).
    #[arg(long, default_value = "0,100")]
    pub iterations: String,
    /// Cubes per (depth, budget) cell.
    #[arg(long, default_value_t = 200)]
    pub cubes: usize,
    /// Move limit per cube.
    #[arg(long, default_value_t = 50)]
    pub e_eval: usize,
    /// Override the agent's symmetric-state sample count.
    #[arg(long)]
    pub n_sym: Option<usize>,
    /// Exploration constant of the tree search.
    #[arg(long, default_value_t = 1.0)]
    pub c_puct: f64,
    /// Tree depth limit (< 1 = unbounded).
    #[arg(long, default_value_t = 50)]
    pub d_max: i32,
    /// Use min-shifted proportional priors instead of softmax priors.
    #[arg(long)]
    pub no_softmax: bool,
    /// Rebuild the search tree from scratch after every move.
    #[arg(long)]
    pub no_reuse: bool,
    /// Summary CSV path (default: <out-dir>/eval.csv).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write one row per evaluated cube to this CSV.
    #[arg(long, value_name = "FILE")]
    pub records: Option<PathBuf>,
}

#[derive(Args)]
pub struct SymcountArgs {
    /// Cube variant.
    #[arg(long, default_value = "pocket2")]
    pub variant: CubeVariant,
    /// Twist metric used for scrambling.
    #[arg(long, default_value = "qtm")]
    pub metric: Metric,
    /// Scramble depth or inclusive range (0 = solved cube allowed).
    #[arg(long = "p", default_value = "0-13", value_name = "P[-P]")]
    pub p_range: String,
    /// Scrambles sampled per depth.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Output CSV path (default: <out-dir>/symcount.csv).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct OracleArgs {
    /// Twist metric to enumerate.
    #[arg(long, default_value = "qtm")]
    pub metric: Metric,
    /// Distance-table path (default: <out-dir>/oracle-<metric>.tbl).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Level-histogram CSV path (default: <out-dir>/oracle-<metric>-levels.csv).
    #[arg(long, value_name = "FILE")]
    pub levels_csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Saved agent file.
    #[arg(long, value_name = "FILE")]
    pub agent: PathBuf,
    /// Scramble move sequence, e.g. "U L F2" (faces U L F D R B; suffix 1, 2, 3 or ').
    #[arg(long)]
    pub scramble: Option<String>,
    /// Random scramble depth (alternative to --scramble).
    #[arg(long)]
    pub p: Option<usize>,
    /// Search budget per move (0 = greedy).
    #[arg(long, default_value_t = 100)]
    pub iterations: u32,
    /// Move limit.
    #[arg(long, default_value_t = 50)]
    pub e_eval: usize,
    /// Override the agent's symmetric-state sample count.
    #[arg(long)]
    pub n_sym: Option<usize>,
    /// Exploration constant of the tree search.
    #[arg(long, default_value_t = 1.0)]
    pub c_puct: f64,
    /// Tree depth limit (< 1 = unbounded).
    #[arg(long, default_value_t = 50)]
    pub d_max: i32,
    /// Use min-shifted proportional priors instead of softmax priors.
    #[arg(long)]
    pub no_softmax: bool,
    /// Rebuild the search tree from scratch after every move.
    #[arg(long)]
    pub no_reuse: bool,
}

#[derive(Args)]
pub struct AuditArgs {
    /// Saved 2x2x2 agent file.
    #[arg(long, value_name = "FILE")]
    agent: PathBuf,
    /// Oracle distance-table file (produced by `oracle`).
    #[arg(long, value_name = "FILE")]
    table: PathBuf,
    /// States sampled uniformly from the table (solved state excluded).
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Search budget per move (0 = greedy).
    #[arg(long, default_value_t = 0)]
    iterations: u32,
    /// Move limit per state.
    #[arg(long, default_value_t = 50)]
    e_eval: usize,
    /// Override the agent's symmetric-state sample count.
    #[arg(long)]
    n_sym: Option<usize>,
    /// Exploration constant of the tree search.
    #[arg(long, default_value_t = 1.0)]
    c_puct: f64,
    /// Tree depth limit (< 1 = unbounded).
    #[arg(long, default_value_t = 50)]
    d_max: i32,
    /// Use min-shifted proportional priors instead of softmax priors.
    #[arg(long)]
    no_softmax: bool,
    /// Rebuild the search tree from scratch after every move.
    #[arg(long)]
    no_reuse: bool,
    /// Per-sample CSV output path.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| {
                CliError::Resource(format!(
                    "cannot initialize {} worker threads: {e}",
                    cli.global.threads
                ))
            })?;
    }
    let seed = cli.global.seed;
    let out_dir = &cli.global.out_dir;
    match &cli.command {
        Command::Train(args) => {
            if args.list_presets {
                for name in presets::PRESET_NAMES {
                    println!("{name}");
                }
                return Ok(());
            }
            if args.replicates < 1 {
                return Err(CliError::Usage("--replicates must be at least 1".into()));
            }
            let mut file_cfg = resolve_train_config(&cli.global, args)?;
            apply_train_overrides(&mut file_cfg, args);
            commands::cmd_train(seed, out_dir, file_cfg, args)
        }
        Command::Eval(args) => commands::cmd_eval(seed, out_dir, args),
        Command::Symcount(args) => commands::cmd_symcount(seed, out_dir, args),
        Command::Oracle(args) => commands::cmd_oracle(out_dir, args),
        Command::Solve(args) => commands::cmd_solve(seed, args),
        Command::Audit(args) => commands::cmd_audit(
            seed,
            out_dir,
            &commands::AuditArgsView {
                agent: &args.agent,
                table: &args.table,
                samples: args.samples,
                iterations: args.iterations,
                e_eval: args.e_eval,
                n_sym: args.n_sym,
                wrap_args: commands::EvalWrapArgs {
                    c_puct: args.c_puct,
                    d_max: args.d_max,
                    no_softmax: args.no_softmax,
                    no_reuse: args.no_reuse,
                },
                out: args.out.clone(),
            },
        ),
    }
}

fn resolve_train_config(
    global: &GlobalArgs,
    args: &TrainArgs,
) -> Result<presets::TrainFileConfig, CliError> {
    match (&global.config, &args.preset) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "pass either --config or --preset, not both".into(),
        )),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Data(format!("bad config {}: {e}", path.display())))
        }
        (None, Some(name)) => presets::preset(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset '{name}' (try --list-presets)"))
        }),
        (None, None) => Err(CliError::Usage(
            "pass --preset <name> or --config <file> (try --list-presets)".into(),
        )),
    }
}

fn apply_train_overrides(cfg: &mut presets::TrainFileConfig, args: &TrainArgs) {
    if let Some(v) = &args.name {
        cfg.name = v.clone();
    }
    if let Some(v) = args.episodes {
        cfg.episodes = v;
    }
    if let Some(v) = args.n_sym {
        cfg.n_sym = v;
    }
    if let Some(v) = args.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = &args.mode {
        cfg.mode = v.clone();
    }
    if let Some(v) = args.eval_every {
        cfg.eval_every = v;
    }
    if let Some(v) = args.log_every {
        cfg.log_every = v;
    }
}
