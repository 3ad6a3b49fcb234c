//! `coref-forge`: corpus engineering for gender-inclusive coreference data.
//!
//! Exit codes: 0 on success, 1 on data errors (unreadable or invalid input,
//! scoring mismatches), 2 on usage errors (bad flags or flag values).

mod commands;
mod config;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use thiserror::Error;

use config::{FileConfig, Settings};

/// A command-line mistake — wrong flags or flag values, not bad data.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Build a usage error (reported with exit code 2).
pub fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "coref-forge",
    version,
    about = "Corpus engineering for gender-inclusive coreference data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit reports as a single JSON object instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for all randomized operations (default 0).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads for per-document parallelism (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Lexicon file merged over the built-in gender lexicon.
    #[arg(long, global = true, value_name = "FILE")]
    lexicon: Option<PathBuf>,

    /// Output format: conll or jsonl (default: by output file extension).
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// More stderr logging (repeat for debug output).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check document invariants and report violations.
    Validate(commands::ValidateArgs),
    /// Summarize a corpus: documents, tokens, clusters, links, vocabulary.
    Stats(commands::StatsArgs),
    /// Rewrite a corpus with gender augmentation rules.
    Augment(commands::AugmentArgs),
    /// Strip or rewrite gender cues mechanism by mechanism.
    Ablate(commands::AblateArgs),
    /// Score a system corpus against gold.
    Score(commands::ScoreArgs),
    /// Score labelled pronoun-resolution instances.
    MapScore(commands::MapScoreArgs),
    /// Merge three annotator corpora by majority vote.
    Adjudicate(commands::AdjudicateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message; --help and --version exit 0.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.is::<UsageError>() => {
            eprintln!("usage error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = FileConfig::from_env()?;
    let settings = Settings::resolve(
        cli.seed,
        cli.lexicon,
        cli.format.as_deref(),
        cli.json,
        cli.verbose,
        cli.jobs,
        config,
    )?;
    init_logging(settings.verbosity);
    if let Some(jobs) = settings.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match &cli.command {
        Command::Validate(args) => commands::validate_cmd(&settings, args),
        Command::Stats(args) => commands::stats_cmd(&settings, args),
        Command::Augment(args) => commands::augment_cmd(&settings, args),
        Command::Ablate(args) => commands::ablate_cmd(&settings, args),
        Command::Score(args) => commands::score_cmd(&settings, args),
        Command::MapScore(args) => commands::map_score_cmd(&settings, args),
        Command::Adjudicate(args) => commands::adjudicate_cmd(&settings, args),
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init()
        .ok();
}
