//! Thin CLI over the library: one subcommand per pipeline stage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use babelprep::pipeline::{
    run_pipeline, run_stage, validate_config, PipelineConfig, Stage, StageReport,
};

#[derive(Parser)]
#[command(
    name = "babelprep",
    version,
    about = "Build a cleaned, deduplicated, tier-balanced multilingual pre-training corpus",
    long_about = "Runs the corpus pipeline over a manifest of text sources, producing the four \
corpus versions (noisy, cleaned, deduplicated, split) plus an optional training mix.\n\n\
Exit codes: 0 success, 1 data errors, 2 usage or missing-prerequisite errors."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's worker count (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Harmonize manifest inputs into the noisy version
    Ingest(StageArgs),
    /// Resolve language codes and detect scripts
    Normalize(StageArgs),
    /// Modify and filter documents into the cleaned version
    Clean(StageArgs),
    /// Near- and exact-deduplicate into the deduplicated version
    Dedup(StageArgs),
    /// Sample categories into the training mix
    Mix(StageArgs),
    /// Produce train/valid splits
    Split(StageArgs),
    /// Compute corpus statistics and distributions
    Stats(StageArgs),
    /// Run the configured stage sequence end to end
    Pipeline(StageArgs),
    /// Check a config against every invariant and print diagnostics
    Validate(StageArgs),
}

fn load(args: &StageArgs) -> Result<PipelineConfig, String> {
    let mut config = PipelineConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    Ok(config)
}

fn print_summary(report: &StageReport) {
    println!("{}", serde_json::to_string(&report.summary()).expect("summary serializes"));
    for error in &report.errors {
        eprintln!("error: {error}");
    }
}

fn run_one(stage: Stage, args: &StageArgs) -> ExitCode {
    let config = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_stage(stage, &config) {
        Ok(report) => {
            print_summary(&report);
            if report.errors.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest(args) => run_one(Stage::Ingest, &args),
        Command::Normalize(args) => run_one(Stage::Normalize, &args),
        Command::Clean(args) => run_one(Stage::Clean, &args),
        Command::Dedup(args) => run_one(Stage::Dedup, &args),
        Command::Mix(args) => run_one(Stage::Mix, &args),
        Command::Split(args) => run_one(Stage::Split, &args),
        Command::Stats(args) => run_one(Stage::Stats, &args),
        Command::Pipeline(args) => {
            let config = match load(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let diagnostics = validate_config(&config);
            if !diagnostics.is_empty() {
                for d in &diagnostics {
                    eprintln!("config error: {d}");
                }
                return ExitCode::from(2);
            }
            match run_pipeline(&config) {
                Ok(reports) => {
                    let mut had_errors = false;
                    for report in &reports {
                        print_summary(report);
                        had_errors |= !report.errors.is_empty();
                    }
                    if had_errors {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate(args) => {
            let config = match load(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let diagnostics = validate_config(&config);
            if diagnostics.is_empty() {
                println!("config ok");
                ExitCode::SUCCESS
            } else {
                for d in &diagnostics {
                    println!("{d}");
                }
                ExitCode::from(2)
            }
        }
    }
}
