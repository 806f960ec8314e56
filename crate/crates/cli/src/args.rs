use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ericson",
    version,
    about = "Open-domain conversational search agent"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Talk to the agent in the terminal.
    Chat(ChatArgs),
    /// Train the general intent classifier.
    Train(TrainArgs),
    /// Cross-validate classifiers and print per-class tables.
    Eval(EvalArgs),
    /// Engagement, proactivity and rating reports from dialogue logs.
    Analyze(AnalyzeArgs),
    /// Re-run logged sessions and compare responses.
    Replay(ReplayArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Validate a news feed and add it to the fixture store.
    Ingest(IngestArgs),
}

#[derive(Debug, Args)]
pub struct AgentArgs {
    /// TOML agent configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured fixture directory.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Overrides the configured model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChatArgs {
    #[command(flatten)]
    pub agent: AgentArgs,
    /// Where turns are logged; defaults to the configured directory or `logs`.
    #[arg(long, conflicts_with = "no_log")]
    pub log_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_log: bool,
    /// Fixed session id, for reproducible transcripts.
    #[arg(long)]
    pub session_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    /// nb, maxent or gbdt.
    #[arg(long, default_value = "gbdt")]
    pub classifier: String,
    /// Defaults to `model.json` in the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    /// Labeled utterances; defaults to `intents.tsv` in the data directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub folds: usize,
    /// Classifiers to compare; repeatable.
    #[arg(long = "classifier", default_values = ["nb", "maxent", "gbdt"])]
    pub classifiers: Vec<String>,
    /// Also compare general-only and entity-aware labels on a synthetic set
    /// of this many utterances.
    #[arg(long)]
    pub hierarchical: Option<usize>,
    #[arg(long, default_value_t = 2017)]
    pub seed: u64,
    /// Model used for the hierarchical comparison.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Writes the machine-readable report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value = "logs")]
    pub log_dir: PathBuf,
    /// Date (YYYY-MM-DD), RFC 3339 time or epoch milliseconds dividing the
    /// before and after periods.
    #[arg(long)]
    pub split: String,
    /// Only sessions starting at or after this time.
    #[arg(long)]
    pub from: Option<String>,
    /// Only sessions starting before this time.
    #[arg(long)]
    pub to: Option<String>,
    /// Restrict engagement to these components; repeatable.
    #[arg(long = "component")]
    pub components: Vec<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub agent: AgentArgs,
    #[arg(long, default_value = "logs")]
    pub log_dir: PathBuf,
    /// Replay one session instead of all of them.
    #[arg(long)]
    pub session: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TOML service configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<String>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    /// Topic tag the items are filed under.
    #[arg(long)]
    pub tag: String,
    /// RSS or Atom file.
    pub feed: PathBuf,
}
