use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vrsuite_core::render::CodecConfig;
use vrsuite_core::sample::Split;

#[derive(Debug, Parser)]
#[command(name = "vrsuite", version, about = "Generate, score and analyze procedural video-reasoning tasks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and validate samples.
    Generate(GenerateArgs),
    /// Re-validate every sample under a dataset root.
    Validate(ValidateArgs),
    /// Score candidate videos against a dataset.
    Score(ScoreArgs),
    /// Aggregate scores.csv into the benchmark table.
    Report(ReportArgs),
    /// Win ratios, alignment and residual capability correlations.
    Analyze(AnalyzeArgs),
    /// Queue-based batch generation with retries.
    Factory(FactoryArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// Task family code, repeatable; all families when omitted.
    #[arg(long = "task")]
    pub tasks: Vec<String>,
    #[arg(long, value_parser = parse_split)]
    pub split: Split,
    #[arg(long)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub start: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// One directory per model, laid out as `<family>/<split>/<index>/`
    /// holding `candidate.mp4` or a `frames/` directory. Repeatable.
    #[arg(long = "candidates", required = true)]
    pub candidates: Vec<PathBuf>,
    /// Model names, in `--candidates` order; directory names by default.
    #[arg(long = "model")]
    pub models: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Report directory; next to the scores file by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long, required_unless_present = "leaderboard")]
    pub scores: Option<PathBuf>,
    /// Pairwise human judgments: sample, modelA, modelB, outcome.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Use the bundled reference leaderboard instead of scores.csv for the
    /// capability matrix.
    #[arg(long)]
    pub leaderboard: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Files,
    Archive,
}

#[derive(Debug, Args, Serialize)]
pub struct FactoryArgs {
    /// TOML generation plan (`[[entries]]` with family, split, start, count).
    #[arg(long, conflicts_with_all = ["tasks", "split", "count"])]
    pub plan: Option<PathBuf>,
    #[arg(long = "task")]
    pub tasks: Vec<String>,
    #[arg(long, value_parser = parse_split, required_unless_present = "plan")]
    pub split: Option<Split>,
    #[arg(long, required_unless_present = "plan")]
    pub count: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 25)]
    pub batch: u64,
    #[arg(long, default_value_t = 15 * 60)]
    pub visibility_secs: u64,
    #[arg(long, value_enum, default_value_t = Format::Files)]
    pub format: Format,
    /// Probability that a job's first attempt fails. Testing only.
    #[arg(long, default_value_t = 0.0)]
    pub fault_rate: f64,
    /// Probability that a job fails every attempt. Testing only.
    #[arg(long, default_value_t = 0.0)]
    pub persistent_fault_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub fault_seed: u64,
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse().map_err(|_| format!("unknown split '{s}' (expected train, test-id or test-ood)"))
}

/// Absolute form of a path that may not exist yet.
pub fn resolve(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).with_context(|| format!("resolving {}", p.display()))
}

/// Echoed into every report directory.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, T: Serialize> {
    pub subcommand: &'a str,
    pub version: &'a str,
    pub args: &'a T,
    pub encoder: Option<PathBuf>,
    pub decoder: Option<PathBuf>,
}

impl<'a, T: Serialize> RunConfig<'a, T> {
    pub fn new(subcommand: &'a str, args: &'a T, codec: &CodecConfig) -> Self {
        RunConfig { subcommand, version: env!("CARGO_PKG_VERSION"), args, encoder: codec.encoder.clone(), decoder: codec.decoder.clone() }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(dir.join("run_config.json"), text).with_context(|| format!("writing run config into {}", dir.display()))
    }
}
