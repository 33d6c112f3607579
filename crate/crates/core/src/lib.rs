//! Offensive-language identification for short social-media text.
//!
//! The pipeline has four stages, each with its own module:
//!
//! - [`lexnorm`]: replaces obfuscated profanity ("a$$hole") with its
//!   canonical form and tokenizes tweets;
//! - [`corpus`]: loads OLID and Toxic-Comments data, maps labels,
//!   balances classes and splits train/validation;
//! - [`encoding`]: turns token lists into character-index grids and
//!   word-embedding matrices;
//! - [`nn`]: the char-CNN + word-LSTM classifier with its training loop;
//! - [`baselines`]: n-gram and sentence-vector linear SVMs trained by SGD;
//! - [`metrics`]: confusion matrices, per-class precision/recall/F1,
//!   macro-F1, accuracy and one-class baselines.

pub mod baselines;
pub mod corpus;
pub mod encoding;
pub mod error;
pub mod lexnorm;
pub mod metrics;
pub mod nn;

pub use corpus::{DataSplit, LabelA, LabelB, LabeledExample, Source, ToxicRow};
pub use encoding::{CharVocabulary, EmbeddingTable, EncodedBatch};
pub use error::Error;
pub use lexnorm::{ObfuscationLexicon, SubstitutionMap, Token};
pub use metrics::{ConfusionMatrix, MetricsReport};
pub use nn::{ModelConfig, ModelParams, TrainHistory};

pub type Result<T> = std::result::Result<T, Error>;
