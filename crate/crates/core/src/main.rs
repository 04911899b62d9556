use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonstatcov::cli_harness::{run_experiment, ExperimentConfig, ExperimentKind, REFERENCE_CONFIGS};
use nonstatcov::{exec, Error};

#[derive(Parser)]
#[command(name = "nonstatcov", version, about = "Finite-section covariance operator experiments")]
struct Cli {
    /// Print the names of the bundled reference configs and exit.
    #[arg(long)]
    list_reference_configs: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON). `ref:<name>` selects a bundled config.
    #[arg(long)]
    config: String,
    /// Output directory for tables.csv, verdicts.json and metadata.json.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; falls back to NONSTATCOV_THREADS, then all cores.
    #[arg(long, env = "NONSTATCOV_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    Simulate(RunArgs),
    Decay(RunArgs),
    Invert(RunArgs),
    Neumann(RunArgs),
    Var(RunArgs),
    Baxter(RunArgs),
    Smoothness(RunArgs),
    Partial(RunArgs),
    Coherence(RunArgs),
    Physical(RunArgs),
    VerifyAll(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        use ExperimentKind as K;
        match self {
            Command::Simulate(a) => (K::Simulate, a),
            Command::Decay(a) => (K::Decay, a),
            Command::Invert(a) => (K::Invert, a),
            Command::Neumann(a) => (K::Neumann, a),
            Command::Var(a) => (K::Var, a),
            Command::Baxter(a) => (K::Baxter, a),
            Command::Smoothness(a) => (K::Smoothness, a),
            Command::Partial(a) => (K::Partial, a),
            Command::Coherence(a) => (K::Coherence, a),
            Command::Physical(a) => (K::Physical, a),
            Command::VerifyAll(a) => (K::VerifyAll, a),
        }
    }
}

fn load(spec: &str) -> Result<ExperimentConfig, Error> {
    match spec.strip_prefix("ref:") {
        Some(name) => nonstatcov::cli_harness::reference_config(name),
        None => ExperimentConfig::from_path(spec.as_ref()),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_reference_configs {
        for (name, _) in REFERENCE_CONFIGS {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    let (kind, args) = cmd.split();
    let mut cfg = match load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    // The subcommand decides what runs; the config's own kind is a default.
    cfg.experiment = kind;
    let threads = args.threads.unwrap_or(0);
    let res = if threads > 0 {
        exec::with_threads(threads, || run_experiment(&cfg, Some(&args.out))).and_then(|r| r)
    } else {
        run_experiment(&cfg, Some(&args.out))
    };
    match res {
        Ok(report) => {
            for v in &report.verdicts {
                println!("{}: {}", if v.pass { "PASS" } else { "FAIL" }, v.check);
            }
            for e in &report.numeric_failures {
                eprintln!("numeric failure: {e}");
            }
            if !report.numeric_failures.is_empty() {
                ExitCode::from(3)
            } else if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
