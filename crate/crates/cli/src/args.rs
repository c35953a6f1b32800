use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emomodes::labels::{Label, Task};
use emomodes::llm::Variant;

#[derive(Debug, Parser)]
#[command(name = "emomodes", version, about = "Sentence-level emotion annotation pipeline")]
pub struct Cli {
    /// JSON run configuration (`train`, `annotator`, `features`, `threshold`, `strict`); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for training, prediction and LLM requests.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write sentence-level gold vectors.
    Prepare(PrepareArgs),
    /// Assign whole documents to train/dev/test.
    Split(SplitArgs),
    /// Corpus size and label distribution per subset.
    Stats(StatsArgs),
    /// Train a linear or boosted one-vs-rest model.
    Train(TrainArgs),
    /// Score sentences with a trained model, or validate external predictions.
    Predict(PredictArgs),
    /// Annotate sentences by prompting a chat-completion backend.
    #[command(name = "annotate-llm")]
    AnnotateLlm(AnnotateLlmArgs),
    /// Annotate sentences from an emotion lexicon.
    #[command(name = "lexicon-annotate")]
    LexiconAnnotate(LexiconArgs),
    /// Per-label precision, recall and F1 against gold.
    Evaluate(EvaluateArgs),
    /// Confusion matrices, kappa, mode/category tables and agreement rates.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnnotatorKind {
    Linear,
    Boosted,
    Lexicon,
    Llm,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubsetArg {
    Train,
    Dev,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct CorpusSelection {
    /// Corpus JSONL (one document per line).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Split JSON; without it every document is used.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    pub subset: SubsetArg,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Gold JSONL output.
    #[arg(long)]
    pub out: PathBuf,
    /// Fail when a gold vector breaks a derivation rule.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Train, dev and test sentence fractions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.7, 0.1, 0.2])]
    pub fractions: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of a plain-text table.
    #[arg(long)]
    pub json: bool,
    /// Also write per-label positive-class weights computed on the training subset.
    #[arg(long)]
    pub class_weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub annotator: AnnotatorKind,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Precomputed sentence embeddings (TSV) used instead of token counts.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Model file output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: CorpusSelection,
    #[arg(long, value_enum)]
    pub annotator: AnnotatorKind,
    /// Model file (linear, boosted).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Prediction JSONL produced elsewhere (external).
    #[arg(long)]
    pub external: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnnotateLlmArgs {
    #[command(flatten)]
    pub data: CorpusSelection,
    #[arg(long, value_parser = parse_variant, default_value = "with_counterexamples")]
    pub variant: Variant,
    /// Prompt specification JSON replacing the built-in one.
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    /// Annotate only the first N sentences.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Write the full conversations here as plain text.
    #[arg(long)]
    pub transcripts: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    #[command(flatten)]
    pub data: CorpusSelection,
    /// Emotion lexicon TSV: term, kind (labeled|behavioral), category.
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Polarity lexicon TSV: term, negative score, positive score.
    #[arg(long, requires = "polarity_out")]
    pub polarity_lexicon: Option<PathBuf>,
    /// Polarity JSONL output.
    #[arg(long, requires = "polarity_lexicon")]
    pub polarity_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Gold JSONL written by `prepare`.
    #[arg(long)]
    pub gold: PathBuf,
    /// Prediction JSONL.
    #[arg(long)]
    pub pred: PathBuf,
    /// Restrict gold to one subset of this split.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum, requires = "split")]
    pub subset: Option<SubsetArg>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Only sentences whose gold carries this label.
    #[arg(long, value_parser = parse_label, requires = "task")]
    pub condition: Option<Label>,
    /// Task reported under --condition.
    #[arg(long, value_parser = parse_task, requires = "condition")]
    pub task: Option<Task>,
    /// Polarity JSONL to score against gold categories projected to polarity.
    #[arg(long)]
    pub polarity: Option<PathBuf>,
    /// Category to polarity mapping JSON.
    #[arg(long)]
    pub polarity_map: Option<PathBuf>,
    /// Fail when predicted vectors break derivation rules.
    #[arg(long)]
    pub strict: bool,
    /// Report JSON output; the table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum, requires = "split")]
    pub subset: Option<SubsetArg>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Expert judgments JSONL: {"source": "human"|"model"|"both", "agree": bool}.
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn parse_label(s: &str) -> Result<Label, String> {
    s.parse().map_err(|e: emomodes::labels::LabelError| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: emomodes::labels::LabelError| e.to_string())
}
