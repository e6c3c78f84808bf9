mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldir::LdirError;

use crate::config::ConfigError;

/// Build, apply and evaluate LDIR text embeddings.
#[derive(Parser, Debug)]
#[command(name = "ldir", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select anchor texts from a corpus and write an anchor-set file
    SampleAnchors(SampleArgs),
    /// Write LDIR embeddings for a corpus
    Embed(EmbedArgs),
    /// Run an evaluation task and report its metric
    Eval(EvalArgs),
    /// Show the anchors each text scores highest on
    Inspect(InspectArgs),
    /// Convert a vector store between JSON lines and the binary layout
    Store(StoreArgs),
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// TOML file with default settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus as JSON lines {"id", "text"}
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Encoder, `kind:key=value,...` [default: hashed]
    #[arg(long)]
    pub provider: Option<String>,
    /// fps, uniform or kmeans [default: fps]
    #[arg(long)]
    pub method: Option<String>,
    /// Number of anchors [default: 500]
    #[arg(long)]
    pub n: Option<u64>,
    /// [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// short, medium, long or all [default: all]
    #[arg(long)]
    pub bucket: Option<String>,
    /// FPS start rule: centroid_farthest, seeded or seeded(N) [default: centroid_farthest]
    #[arg(long)]
    pub start: Option<String>,
    /// Sample on raw encoder outputs instead of unit directions
    #[arg(long)]
    pub no_normalize: bool,
    /// Anchor-set file to write
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also export the anchors as JSON lines
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

/// Where LDIR embeddings come from: one anchor set or several concatenated.
#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Anchor-set file
    #[arg(long)]
    pub anchors: Option<PathBuf>,
    /// Encoder to embed with [default: the one recorded in the anchor set]
    #[arg(long)]
    pub provider: Option<String>,
    /// Concatenate several anchor sets, each `PATH` or `PATH:PROVIDER`
    #[arg(long = "fine-grained", num_args = 1.., value_name = "PATH[:PROVIDER]")]
    pub fine_grained: Vec<String>,
    /// Relatedness metric [default: cosine]
    #[arg(long)]
    pub metric: Option<String>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Texts to embed: JSON-lines corpus or an anchor-set file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// jsonl or binary [default: binary for .bin/.ldir, else jsonl]
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// sts, retrieval, clustering or cognitive-load
    #[arg(long)]
    pub task: Option<String>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// STS TSV or clustering JSON lines
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Retrieval documents, JSON lines
    #[arg(long)]
    pub docs: Option<PathBuf>,
    /// Retrieval queries, JSON lines
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Retrieval judgements, TSV
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    /// k-means seed for clustering [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Binarization k for cognitive load [default: 25]
    #[arg(long)]
    pub k: Option<u64>,
    /// nDCG cutoff for retrieval [default: 10]
    #[arg(long)]
    pub cutoff: Option<u64>,
    /// JSON report to write
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Anchors listed per text [default: 5]
    #[arg(long)]
    pub top: Option<u64>,
    /// JSON-lines corpus of texts to inspect
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Texts to inspect
    pub texts: Vec<String>,
}

#[derive(Args, Debug)]
pub struct StoreArgs {
    /// JSON-lines or binary vector store
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// jsonl or binary [default: from the output extension]
    #[arg(long)]
    pub to: Option<String>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<LdirError>() {
        Some(
            LdirError::InvalidParameter(_)
            | LdirError::InvalidN { .. }
            | LdirError::InvalidK { .. }
            | LdirError::KTooLarge { .. }
            | LdirError::CorpusTooSmall { .. }
            | LdirError::EncoderMismatch { .. }
            | LdirError::DimensionMismatch { .. },
        ) => 2,
        Some(LdirError::ProviderUnavailable(_) | LdirError::MissingText(_)) => 3,
        Some(_) => 4,
        None if err.downcast_ref::<std::io::Error>().is_some() => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SampleAnchors(args) => commands::sample::run(args),
        Command::Embed(args) => commands::embed::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Inspect(args) => commands::inspect::run(args),
        Command::Store(args) => commands::store::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
