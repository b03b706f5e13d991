//! `hidden-history`: run seeded experiments, sample single histories, or
//! print transition kernels.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when `--strict`
//! is set and an experiment misses its threshold, 1 on anything else.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hidden_history::harness::{
    emit_results, run_experiment, summary_to_json, ExperimentConfig, ExperimentKind,
};
use hidden_history::history::{sample_history, HistoryQuery, SamplerOptions};
use hidden_history::rng::substream;
use hidden_history::theories::{dense_kernel, random_block_unitary, random_state, KernelOptions};
use hidden_history::{Error, Granularity, SlicedProgram, TheoryKind};

#[derive(Parser)]
#[command(
    name = "hidden-history",
    version,
    about = "Hidden-variable history sampling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Axiom suite: marginalization, indifference and robustness probes.
    Axioms(RunArgs),
    /// Juggle subroutine failure and flip rates.
    Juggle(RunArgs),
    /// Statistical Difference solver on generated instances.
    Sd(RunArgs),
    /// One-to-one versus two-to-one distinguisher.
    Collision(RunArgs),
    /// Graph isomorphism through the SD solver.
    Gi(RunArgs),
    /// Cube-root database search.
    Search(RunArgs),
    /// Search over several sizes with a log-log fit of the query counts.
    Scaling(RunArgs),
    /// Sample one history of a program stored as JSON; prints CSV.
    History(HistoryArgs),
    /// Kernel of a random state and block unitary; prints CSV.
    Kernel(KernelArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theory: Option<String>,
    /// Comma-separated sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Falls back to HH_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for `<experiment>.csv` and `<experiment>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 3 if the experiment misses its threshold.
    #[arg(long)]
    strict: bool,
    /// Record wall time per trial (makes the CSV nondeterministic).
    #[arg(long)]
    timing: bool,
    /// Extra key=value settings, e.g. `--set c=8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct HistoryArgs {
    /// Program file as written by `SlicedProgram::to_json`.
    #[arg(long)]
    program: PathBuf,
    #[arg(long, default_value = "flow")]
    theory: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "gate")]
    granularity: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    qubits: usize,
    #[arg(long, default_value = "flow")]
    theory: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest block of the random unitary (default: half the dimension).
    #[arg(long)]
    block: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Threshold,
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidInstance(_) | Error::DimensionCap { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Other(other.to_string()),
        }
    }
}

fn seed_or_env(seed: Option<u64>) -> Result<Option<u64>, Failure> {
    if seed.is_some() {
        return Ok(seed);
    }
    match std::env::var("HH_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Config(format!("HH_SEED `{v}` is not a u64"))),
        Err(_) => Ok(None),
    }
}

fn parse_theory(s: &str) -> Result<TheoryKind, Failure> {
    s.parse()
        .map_err(|_| Failure::Config(format!("unknown theory `{s}`")))
}

fn build_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let c = ExperimentConfig::parse(&text, Some(kind))?;
            if c.experiment != kind {
                return Err(Failure::Config(format!(
                    "config file is for `{}`, command is `{kind}`",
                    c.experiment
                )));
            }
            c
        }
        None => ExperimentConfig::new(kind),
    };
    if args.config.is_none() || args.seed.is_some() {
        if let Some(seed) = seed_or_env(args.seed)? {
            config.seed = seed;
        }
    }
    if let Some(t) = &args.theory {
        config.theory = parse_theory(t)?;
    }
    if let Some(n) = &args.n {
        config.set("sizes", n)?;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    config.strict |= args.strict;
    config.timing |= args.timing;
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        if k.trim() == "experiment" {
            return Err(Failure::Config(
                "the experiment is chosen by the subcommand".into(),
            ));
        }
        config.set(k, v)?;
    }
    config.validate()?;
    Ok(config)
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<(), Failure> {
    let config = build_config(kind, args)?;
    let result = run_experiment(&config)?;
    print!("{}", summary_to_json(&result.summary)?);
    if let Some(dir) = &config.out {
        let (csv, json) = emit_results(&result.records, &result.summary, dir)?;
        eprintln!("wrote {} and {}", csv.display(), json.display());
    }
    if config.strict && !result.summary.passed {
        return Err(Failure::Threshold);
    }
    Ok(())
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn history(args: &HistoryArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.program)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.program.display())))?;
    let program = SlicedProgram::from_json(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let granularity: Granularity = args
        .granularity
        .parse()
        .map_err(|_| Failure::Config(format!("unknown granularity `{}`", args.granularity)))?;
    let query = HistoryQuery::new(
        program,
        parse_theory(&args.theory)?,
        seed_or_env(args.seed)?.unwrap_or(0),
    );
    let h = sample_history(&query, &SamplerOptions::with_granularity(granularity))?;
    write_or_print(&args.out, &h.to_csv())
}

fn kernel(args: &KernelArgs) -> Result<(), Failure> {
    if !(1..=8).contains(&args.qubits) {
        return Err(Failure::Config(format!(
            "{} qubits outside 1..=8",
            args.qubits
        )));
    }
    let theory = parse_theory(&args.theory)?;
    let mut rng = substream(seed_or_env(args.seed)?.unwrap_or(0), 0);
    let dim = 1usize << args.qubits;
    let state = random_state::<f64, _>(args.qubits, &mut rng)?;
    let u = random_block_unitary::<f64, _>(
        args.qubits,
        args.block.unwrap_or((dim / 2).max(1)),
        &mut rng,
    );
    let k = dense_kernel(theory, &state, &u, &KernelOptions::default())?;
    write_or_print(&args.out, &k.to_csv(theory))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Axioms(a) => run(ExperimentKind::Axioms, a),
        Command::Juggle(a) => run(ExperimentKind::Juggle, a),
        Command::Sd(a) => run(ExperimentKind::Sd, a),
        Command::Collision(a) => run(ExperimentKind::Collision, a),
        Command::Gi(a) => run(ExperimentKind::Gi, a),
        Command::Search(a) => run(ExperimentKind::Search, a),
        Command::Scaling(a) => run(ExperimentKind::Scaling, a),
        Command::History(a) => history(a),
        Command::Kernel(a) => kernel(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Threshold) => {
            eprintln!("experiment missed its threshold");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
