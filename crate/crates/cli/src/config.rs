use clap::{Args, Parser, Subcommand};
use hvkg_core::retriever::{PenaltyMode, RetrievalConfig};
use hvkg_core::{BlockFamily, HdcConfig, Operator};
use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "hvkg", version, about = "Hypervector path retrieval over knowledge graphs")]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Repeat for more log output.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a relation codebook from a triples file.
    Codebook {
        #[arg(long)]
        triples: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        hdc: HdcFlags,
    },
    /// Retrieve Top-K paths for every question.
    Retrieve {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        retrieval: RetrievalFlags,
    },
    /// Retrieve, then adjudicate each question with one model call.
    Answer {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        retrieval: RetrievalFlags,
        #[command(flatten)]
        llm: LlmFlags,
    },
    /// Generate a planted-path benchmark.
    Synth {
        #[arg(long, default_value_t = 200)]
        entities: usize,
        #[arg(long, default_value_t = 20)]
        relations: usize,
        #[arg(long = "num-triples", default_value_t = 2000)]
        num_triples: usize,
        #[arg(long = "num-questions", default_value_t = 100)]
        num_questions: usize,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        types: usize,
        /// Directory for triples.tsv, questions.jsonl and types.tsv.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the Monte Carlo validation suite and gate on its thresholds.
    Validate(ValidateFlags),
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    #[arg(long)]
    pub triples: PathBuf,
    #[arg(long)]
    pub questions: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    /// JSON Lines output; records are appended.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct HdcFlags {
    /// Number of blocks D (GHRR) or the dimension (flat families).
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Block size m.
    #[arg(long)]
    pub block_size: Option<usize>,
    #[arg(long)]
    pub operator: Option<Operator>,
    #[arg(long)]
    pub family: Option<BlockFamily>,
}

#[derive(Debug, Args, Default)]
pub struct RetrievalFlags {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, short = 'k')]
    pub k: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub beam: Option<usize>,
    #[arg(long, value_parser = parse_penalty)]
    pub penalty_mode: Option<PenaltyMode>,
    /// Use gold schemas as query plans when present.
    #[arg(long)]
    pub gold_plan_hint: bool,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct LlmSource {
    /// Completion endpoint URL.
    #[arg(long)]
    pub llm_endpoint: Option<String>,
    /// Answer offline with the deterministic top-1 mock.
    #[arg(long)]
    pub mock_llm: bool,
}

#[derive(Debug, Args)]
pub struct LlmFlags {
    #[command(flatten)]
    pub source: LlmSource,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    pub token_env: Option<String>,
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Args, Default)]
pub struct ValidateFlags {
    /// Comma-separated subset of tail,capacity,separation,order,scaling.
    #[arg(long, value_delimiter = ',')]
    pub experiments: Vec<String>,
    /// Tail threshold epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Trials per tail dimension.
    #[arg(long)]
    pub tail_trials: Option<u64>,
    /// Shrink every experiment for a smoke run.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}

fn parse_penalty(s: &str) -> Result<PenaltyMode, String> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "as_printed" => Ok(PenaltyMode::AsPrinted),
        "length_proportional" => Ok(PenaltyMode::LengthProportional),
        _ => Err(format!("unknown penalty mode `{s}` (as_printed, length_proportional)")),
    }
}

/// Optional TOML defaults. Keys mirror the long flag names with `_`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub blocks: Option<usize>,
    pub block_size: Option<usize>,
    pub operator: Option<String>,
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub l_max: Option<usize>,
    pub beam: Option<usize>,
    pub penalty_mode: Option<String>,
    pub llm_endpoint: Option<String>,
    pub token_env: Option<String>,
    pub timeout: Option<f64>,
    pub retries: Option<u32>,
    pub max_tokens: Option<u32>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn resolve_seed(cli: Option<u64>, file: &FileConfig) -> u64 {
    cli.or(file.seed).unwrap_or(0)
}

pub(crate) fn resolve_hdc(flags: &HdcFlags, file: &FileConfig, seed: u64) -> Result<HdcConfig, CliError> {
    let mut cfg = HdcConfig { seed, ..HdcConfig::default() };
    if let Some(op) = flags.operator.map(Ok).or_else(|| file.operator.as_deref().map(str::parse)) {
        cfg.operator = op.map_err(CliError::invalid)?;
    }
    if let Some(f) = flags.family.map(Ok).or_else(|| file.family.as_deref().map(str::parse)) {
        cfg.block_family = f.map_err(CliError::invalid)?;
    }
    if cfg.operator != Operator::Ghrr {
        cfg.block_size = 1;
    }
    if let Some(m) = flags.block_size.or(file.block_size) {
        cfg.block_size = m;
    }
    if let Some(d) = flags.blocks.or(file.blocks) {
        cfg.num_blocks = d;
    } else if cfg.operator != Operator::Ghrr {
        cfg.num_blocks = HdcConfig::default().dim();
    }
    cfg.validate().map_err(CliError::invalid)?;
    Ok(cfg)
}

pub(crate) fn resolve_retrieval(flags: &RetrievalFlags, file: &FileConfig, hdc: HdcConfig) -> Result<RetrievalConfig, CliError> {
    let d = RetrievalConfig::default();
    let penalty = match &flags.penalty_mode {
        Some(p) => *p,
        None => match &file.penalty_mode {
            Some(s) => parse_penalty(s).map_err(CliError::Validation)?,
            None => d.penalty_mode,
        },
    };
    let cfg = RetrievalConfig {
        hdc,
        alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
        beta: flags.beta.or(file.beta).unwrap_or(d.beta),
        lambda: flags.lambda.or(file.lambda).unwrap_or(d.lambda),
        k: flags.k.or(file.k).unwrap_or(d.k),
        l_max: flags.l_max.or(file.l_max).unwrap_or(d.l_max),
        beam: flags.beam.or(file.beam).unwrap_or(d.beam),
        penalty_mode: penalty,
        gold_plan_hint: flags.gold_plan_hint,
    };
    cfg.validate().map_err(CliError::invalid)?;
    Ok(cfg)
}
