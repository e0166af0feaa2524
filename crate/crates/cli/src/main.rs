use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermistab::PerturbationMode;
use fermistab_cli::config::OUTPUT_DIR_ENV;
use fermistab_cli::{execute, Experiment, Failure, Panel, RunConfig, Status};

#[derive(Parser)]
#[command(
    name = "fermistab",
    version,
    about = "Stability sweeps for free-fermion models with coefficient errors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write <experiment>.csv and <experiment>.summary.json.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    experiment: Experiment,
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $FERMISTAB_OUTPUT_DIR, else ./results].
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<u64>,
    /// Which couplings receive errors: existing-terms or all-local-terms.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<PerturbationMode>,
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long = "J", value_delimiter = ',')]
    j: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long = "T", value_delimiter = ',')]
    total_time: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    #[arg(long = "M", value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    panel: Option<Vec<Panel>>,
    #[arg(long)]
    time_step: Option<f64>,
}

fn parse_mode(s: &str) -> Result<PerturbationMode, String> {
    match s {
        "existing-terms" => Ok(PerturbationMode::ExistingTerms),
        "all-local-terms" => Ok(PerturbationMode::AllLocalTerms),
        _ => Err(format!(
            "unknown mode '{s}', expected existing-terms or all-local-terms"
        )),
    }
}

impl RunArgs {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            instances: self.instances,
            threads: self.threads,
            output_dir: self.output_dir.clone(),
            mode: self.mode,
            delta: self.delta.clone(),
            n: self.n.clone(),
            j: self.j.clone(),
            t: self.t.clone(),
            total_time: self.total_time.clone(),
            beta: self.beta.clone(),
            m: self.m.clone(),
            eta: self.eta.clone(),
            panel: self.panel.clone(),
            time_step: self.time_step,
            ..Default::default()
        }
    }
}

fn run(args: RunArgs) -> Result<Status, Failure> {
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let cfg = file
        .overlay(args.overrides())
        .resolve(args.experiment, env_dir)?;
    let summary = execute(args.experiment, cfg)?;
    for a in &summary.assertions {
        log::info!(
            "{} {}: {}",
            if a.passed { "pass" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    for f in &summary.failures {
        log::error!("{}: {}", f.key, f.message);
    }
    for note in &summary.notes {
        log::warn!("{note}");
    }
    println!(
        "{}: {} records, {}/{} assertions passed, {} failures, {:.1}s",
        summary.experiment,
        summary.record_count,
        summary.assertions.iter().filter(|a| a.passed).count(),
        summary.assertions.len(),
        summary.failures.len(),
        summary.timings.total_seconds
    );
    Ok(summary.status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                fermistab_cli::EXIT_CONFIG
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let Command::Run(args) = cli.command;
    match run(args) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
