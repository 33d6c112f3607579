//! Subcommand implementations and the helpers they share.

mod baseline;
mod evaluate;
mod predict;
mod prepare;
mod train;

use std::path::{Path, PathBuf};

use offlang_core::corpus::{self, LabeledExample};
use offlang_core::lexnorm::{
    build_variant_table, builtin_word_list, load_word_list, normalize_text, ObfuscationLexicon,
    SubstitutionMap, Token, DEFAULT_MAX_SUBSTITUTIONS,
};
use offlang_core::Error;

use crate::args::{Command, PreprocessArgs, SharedArgs};
use crate::config::{Resolver, Subtask};
use crate::CliError;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Prepare(args) => prepare::run(args),
        Command::Train(args) => train::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Predict(args) => predict::run(args),
        Command::Baseline(args) => baseline::run(args),
    }
}

/// Settings every subcommand resolves the same way.
pub struct Shared {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub subtask: Subtask,
    pub deterministic: bool,
}

pub fn resolve_shared(r: &Resolver, args: &SharedArgs) -> Result<Shared, CliError> {
    let shared = Shared {
        out_dir: r.get("out_dir", args.out_dir.clone(), PathBuf::from("."))?,
        seed: r.get("seed", args.seed, corpus::DEFAULT_SEED)?,
        subtask: r.get("subtask", args.subtask, Subtask::A)?,
        deterministic: r.get("deterministic", args.deterministic, true)?,
    };
    std::fs::create_dir_all(&shared.out_dir)
        .map_err(|e| Error::io(shared.out_dir.display().to_string(), e))?;
    Ok(shared)
}

/// Resolved preprocessing pipeline: obfuscation lexicon plus expansion
/// switches.
pub struct Preprocessor {
    pub lexicon: ObfuscationLexicon,
    pub expand_contractions: bool,
    pub expand_abbreviations: bool,
    pub word_list: Option<PathBuf>,
    pub max_substitutions: usize,
}

impl Preprocessor {
    pub fn tokens(&self, text: &str) -> Vec<Token> {
        normalize_text(
            text,
            &self.lexicon,
            self.expand_contractions,
            self.expand_abbreviations,
        )
    }

    pub fn tokens_of(&self, texts: &[String]) -> Vec<Vec<Token>> {
        texts.iter().map(|t| self.tokens(t)).collect()
    }
}

pub fn resolve_preprocessor(
    r: &Resolver,
    args: &PreprocessArgs,
) -> Result<Preprocessor, CliError> {
    let word_list = r.opt("word_list", args.word_list.clone())?;
    let max_substitutions = r.get(
        "max_substitutions",
        args.max_substitutions,
        DEFAULT_MAX_SUBSTITUTIONS,
    )?;
    let words = match &word_list {
        None => builtin_word_list(),
        Some(path) => load_word_list(path)?,
    };
    let lexicon = build_variant_table(&words, &SubstitutionMap::default(), max_substitutions)?;
    Ok(Preprocessor {
        lexicon,
        expand_contractions: r.get("expand_contractions", args.expand_contractions, false)?,
        expand_abbreviations: r.get("expand_abbreviations", args.expand_abbreviations, false)?,
        word_list,
        max_substitutions,
    })
}

/// Load a labelled file in either supported format, sniffed from the
/// header line: prepared TSV or OLID TSV.
pub fn load_examples_auto(path: &Path) -> Result<Vec<LabeledExample>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Core(Error::io(path.display().to_string(), e)))?;
    let header = text.lines().next().unwrap_or("").trim_end();
    if header == corpus::PREPARED_HEADER {
        Ok(corpus::read_prepared(path)?)
    } else if header == corpus::OLID_HEADER {
        Ok(corpus::load_olid(path)?)
    } else {
        Err(CliError::Core(Error::parse(
            path.display().to_string(),
            1,
            format!("unrecognized header {header:?}"),
        )))
    }
}

/// Texts with class indices for the requested subtask. Subtask B
/// requires every example to carry a TIN/UNT label.
pub fn texts_and_labels(
    examples: &[LabeledExample],
    subtask: Subtask,
) -> Result<(Vec<String>, Vec<usize>), CliError> {
    let mut texts = Vec::with_capacity(examples.len());
    let mut labels = Vec::with_capacity(examples.len());
    for ex in examples {
        let label = match subtask {
            Subtask::A => ex.label_a.index(),
            Subtask::B => ex
                .label_b
                .ok_or_else(|| {
                    CliError::Core(Error::LabelSetMismatch(format!(
                        "example {} has no subtask-B label",
                        ex.id
                    )))
                })?
                .index(),
        };
        texts.push(ex.text.clone());
        labels.push(label);
    }
    Ok((texts, labels))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Core(Error::io(path.display().to_string(), e)))
}

/// Required-flag helper: `--flag` (or config key) must be present.
pub fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}
