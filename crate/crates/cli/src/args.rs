//! Command-line surface. Every value flag is optional so a config file
//! can supply it; resolution order is CLI > file > built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ModelKind, Subtask};

#[derive(Parser, Debug)]
#[command(
    name = "offlang",
    version,
    about = "Offensive-language identification: data preparation, training, evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

// Parsed once at startup; the variant size spread is irrelevant.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load raw corpora, map/balance labels and write train/validation TSVs
    Prepare(PrepareArgs),
    /// Train the deep model or an SVM baseline on prepared data
    Train(TrainArgs),
    /// Evaluate a trained model against gold labels
    Evaluate(EvaluateArgs),
    /// Predict labels for a file of raw input texts
    Predict(PredictArgs),
    /// Report the constant-prediction baselines for a gold file
    Baseline(BaselineArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
pub struct SharedArgs {
    /// Flat `key = value` config file; CLI flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for output artifacts [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Seed for balancing, splitting, initialization and shuffling [default: 5]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Subtask A (NOT/OFF) or B (TIN/UNT) [default: A]
    #[arg(long)]
    pub subtask: Option<Subtask>,
    /// Keep execution single-threaded and fully seeded [default: true]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
}

/// Preprocessing flags: obfuscation lexicon and token expansions.
#[derive(Args, Debug)]
pub struct PreprocessArgs {
    /// Offensive-word list (one word per line); defaults to the built-in list
    #[arg(long)]
    pub word_list: Option<PathBuf>,
    /// Maximum substituted positions per word variant [default: 3]
    #[arg(long)]
    pub max_substitutions: Option<usize>,
    /// Expand contractions ("I'm" -> "I am") [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub expand_contractions: Option<bool>,
    /// Expand abbreviations ("w/" -> "with") [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub expand_abbreviations: Option<bool>,
}

/// Pretrained word-embedding table flags (deep model).
#[derive(Args, Debug)]
pub struct EmbeddingArgs {
    /// Word-embedding table in textual format
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Read at most this many embedding rows
    #[arg(long)]
    pub embedding_limit: Option<usize>,
}

/// Deep-model hyperparameter overrides.
#[derive(Args, Debug)]
pub struct DeepArgs {
    /// Character table size including PAD and UNK [default: 258]
    #[arg(long)]
    pub char_vocab_size: Option<usize>,
    /// Character embedding dimension [default: 32]
    #[arg(long)]
    pub char_emb_dim: Option<usize>,
    /// Filters in the first convolution [default: 64]
    #[arg(long)]
    pub conv1_filters: Option<usize>,
    /// Filters in the second convolution [default: 128]
    #[arg(long)]
    pub conv2_filters: Option<usize>,
    /// Convolution kernel width [default: 2]
    #[arg(long)]
    pub kernel_size: Option<usize>,
    /// Max-pooling width and stride [default: 2]
    #[arg(long)]
    pub pool_size: Option<usize>,
    /// LSTM hidden units [default: 256]
    #[arg(long)]
    pub lstm_units: Option<usize>,
    /// Units in the penultimate dense layer [default: 128]
    #[arg(long)]
    pub fc1_units: Option<usize>,
    /// Characters kept per word; computed from the corpus when omitted
    #[arg(long)]
    pub max_word_len: Option<usize>,
    /// Dropout keep probability [default: 0.5]
    #[arg(long)]
    pub dropout_keep: Option<f64>,
    /// Adam learning rate [default: 0.001]
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Mini-batch size [default: 32]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Training epochs [default: 20]
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// LSTM readout: last or mean [default: last]
    #[arg(long)]
    pub readout: Option<String>,
}

/// SVM hyperparameter overrides.
#[derive(Args, Debug)]
pub struct SvmArgs {
    /// SGD epochs [default: 15]
    #[arg(long)]
    pub svm_epochs: Option<usize>,
    /// Elastic-net strength [default: 1e-6]
    #[arg(long)]
    pub svm_alpha: Option<f64>,
    /// L1 share of the elastic-net penalty [default: 0.15]
    #[arg(long)]
    pub svm_l1_ratio: Option<f64>,
    /// Id-keyed sentence-vector file (embedding-svm only)
    #[arg(long)]
    pub vectors: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub shared: SharedArgs,
    /// OLID-format training TSV
    #[arg(long)]
    pub olid_train: Option<PathBuf>,
    /// Toxic-Comments CSV used to augment subtask-A training data
    #[arg(long)]
    pub toxic: Option<PathBuf>,
    /// Augment with mapped/balanced toxic comments [default: set iff --toxic given]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub augment: Option<bool>,
    /// Examples in the training portion (before augmentation)
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Examples in the validation portion
    #[arg(long)]
    pub n_val: Option<usize>,
    /// Validation share when --n-train/--n-val are omitted [default: 0.1]
    #[arg(long)]
    pub val_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    #[command(flatten)]
    pub deep: DeepArgs,
    #[command(flatten)]
    pub svm: SvmArgs,
    /// Prepared (or OLID-format) training file
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Prepared (or OLID-format) validation file
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// Classifier to train: deep, svm or embedding-svm [default: deep]
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Fold the validation set into training data ("+val" variant) [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_validation_in_training: Option<bool>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    /// Trained model artifact (deep checkpoint or SVM dump)
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Kind of model stored in --model-file [default: deep]
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Gold-labelled file (prepared or OLID format)
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Id-keyed sentence vectors for the gold file (embedding-svm only)
    #[arg(long)]
    pub vectors: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    /// Deep-model checkpoint
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Input file with one text per line
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output CSV [default: <out-dir>/predictions.csv]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print the normalized tokens of every input line to stdout
    #[arg(long)]
    pub debug_tokens: bool,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub shared: SharedArgs,
    /// Gold-labelled file (prepared or OLID format)
    #[arg(long)]
    pub gold: Option<PathBuf>,
}
