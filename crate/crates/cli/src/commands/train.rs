//! `offlang train`: fit the deep model or an SVM baseline on prepared
//! data, writing the model artifact, training history and a frozen
//! config echo.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use offlang_core::baselines::{
    featurize, fit_featurizer, read_id_vectors, save_svm_model, train_embedding_svm,
    train_linear_svm, SgdHyperparams, SvmModelFile,
};
use offlang_core::encoding::{build_char_vocab, load_embedding_table, suggest_max_word_len};
use offlang_core::nn::{self, Dataset, ModelConfig};
use offlang_core::{Error, Token};

use crate::args::TrainArgs;
use crate::commands::{
    load_examples_auto, require, resolve_preprocessor, resolve_shared, texts_and_labels,
    Preprocessor, Shared,
};
use crate::config::{parse_readout, readout_name, ConfigEcho, ModelKind, Resolver};
use crate::CliError;

/// Everything resolved from flags/config before dispatching on the
/// model kind.
struct TrainRun {
    shared: Shared,
    pre: Preprocessor,
    model: ModelKind,
    include_validation: bool,
    train_path: PathBuf,
    validation_path: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    embedding_limit: Option<usize>,
    vectors: Option<PathBuf>,
    model_config: ModelConfig,
    explicit_max_word_len: Option<usize>,
    sgd: SgdHyperparams,
}

fn resolve(args: &TrainArgs) -> Result<TrainRun, CliError> {
    let r = Resolver::new(args.shared.config.as_ref())?;
    let shared = resolve_shared(&r, &args.shared)?;
    let pre = resolve_preprocessor(&r, &args.preprocess)?;
    let model = r.get("model", args.model, ModelKind::Deep)?;

    let d = &args.deep;
    let defaults = ModelConfig::default();
    let mut mc = ModelConfig {
        char_vocab_size: r.get("char_vocab_size", d.char_vocab_size, defaults.char_vocab_size)?,
        char_emb_dim: r.get("char_emb_dim", d.char_emb_dim, defaults.char_emb_dim)?,
        conv1_filters: r.get("conv1_filters", d.conv1_filters, defaults.conv1_filters)?,
        conv2_filters: r.get("conv2_filters", d.conv2_filters, defaults.conv2_filters)?,
        kernel_size: r.get("kernel_size", d.kernel_size, defaults.kernel_size)?,
        pool_size: r.get("pool_size", d.pool_size, defaults.pool_size)?,
        lstm_units: r.get("lstm_units", d.lstm_units, defaults.lstm_units)?,
        fc1_units: r.get("fc1_units", d.fc1_units, defaults.fc1_units)?,
        dropout_keep: r.get("dropout_keep", d.dropout_keep, defaults.dropout_keep)?,
        learning_rate: r.get("learning_rate", d.learning_rate, defaults.learning_rate)?,
        batch_size: r.get("batch_size", d.batch_size, defaults.batch_size)?,
        max_epochs: r.get("max_epochs", d.max_epochs, defaults.max_epochs)?,
        ..defaults
    };
    mc.seed = shared.seed;
    if let Some(s) = r.opt("readout", d.readout.clone())? {
        mc.readout = parse_readout(&s).map_err(CliError::Usage)?;
    }
    if mc.char_vocab_size < 3 {
        return Err(CliError::Usage(format!(
            "char_vocab_size {} leaves no room beyond PAD and UNK",
            mc.char_vocab_size
        )));
    }

    let sgd = SgdHyperparams {
        epochs: r.get("svm_epochs", args.svm.svm_epochs, 15)?,
        alpha: r.get("svm_alpha", args.svm.svm_alpha, 1e-6)?,
        l1_ratio: r.get("svm_l1_ratio", args.svm.svm_l1_ratio, 0.15)?,
        seed: shared.seed,
    };

    Ok(TrainRun {
        train_path: require(r.opt("train", args.train.clone())?, "train")?,
        validation_path: r.opt("validation", args.validation.clone())?,
        embeddings: r.opt("embeddings", args.embedding.embeddings.clone())?,
        embedding_limit: r.opt("embedding_limit", args.embedding.embedding_limit)?,
        vectors: r.opt("vectors", args.svm.vectors.clone())?,
        include_validation: r.get(
            "include_validation_in_training",
            args.include_validation_in_training,
            false,
        )?,
        shared,
        pre,
        model,
        model_config: mc,
        explicit_max_word_len: r.opt("max_word_len", d.max_word_len)?,
        sgd,
    })
}

/// Shared config-echo entries; model-specific keys are appended by the
/// per-model paths.
fn base_echo(run: &TrainRun) -> ConfigEcho {
    let mut echo = ConfigEcho::default();
    echo.set("model", run.model);
    echo.set("subtask", run.shared.subtask);
    echo.set("seed", run.shared.seed);
    echo.set("deterministic", run.shared.deterministic);
    echo.set("train", run.train_path.display());
    echo.set_opt(
        "validation",
        run.validation_path.as_ref().map(|p| p.display()),
    );
    echo.set(
        "include_validation_in_training",
        run.include_validation,
    );
    echo.set_opt("word_list", run.pre.word_list.as_ref().map(|p| p.display()));
    echo.set("max_substitutions", run.pre.max_substitutions);
    echo.set("expand_contractions", run.pre.expand_contractions);
    echo.set("expand_abbreviations", run.pre.expand_abbreviations);
    echo
}

fn echo_model_config(echo: &mut ConfigEcho, mc: &ModelConfig) {
    echo.set("char_vocab_size", mc.char_vocab_size);
    echo.set("char_emb_dim", mc.char_emb_dim);
    echo.set("conv1_filters", mc.conv1_filters);
    echo.set("conv2_filters", mc.conv2_filters);
    echo.set("kernel_size", mc.kernel_size);
    echo.set("pool_size", mc.pool_size);
    echo.set("lstm_units", mc.lstm_units);
    echo.set("fc1_units", mc.fc1_units);
    echo.set("embedding_dim", mc.embedding_dim);
    echo.set("max_word_len", mc.max_word_len);
    echo.set("dropout_keep", mc.dropout_keep);
    echo.set("learning_rate", mc.learning_rate);
    echo.set("batch_size", mc.batch_size);
    echo.set("max_epochs", mc.max_epochs);
    echo.set("readout", readout_name(mc.readout));
}

fn echo_sgd(echo: &mut ConfigEcho, sgd: &SgdHyperparams) {
    echo.set("svm_epochs", sgd.epochs);
    echo.set("svm_alpha", sgd.alpha);
    echo.set("svm_l1_ratio", sgd.l1_ratio);
}

pub fn run(args: TrainArgs) -> Result<(), CliError> {
    let mut run = resolve(&args)?;

    let train_examples = load_examples_auto(&run.train_path)?;
    let (mut train_texts, mut train_labels) =
        texts_and_labels(&train_examples, run.shared.subtask)?;
    let train_ids: Vec<String> = train_examples.iter().map(|e| e.id.clone()).collect();

    let (mut val_texts, mut val_labels, val_ids) = match &run.validation_path {
        Some(path) => {
            let examples = load_examples_auto(path)?;
            let (texts, labels) = texts_and_labels(&examples, run.shared.subtask)?;
            let ids: Vec<String> = examples.iter().map(|e| e.id.clone()).collect();
            (texts, labels, ids)
        }
        None => (Vec::new(), Vec::new(), Vec::new()),
    };

    let mut ids = train_ids;
    if run.include_validation {
        train_texts.append(&mut val_texts);
        train_labels.append(&mut val_labels);
        ids.extend(val_ids);
        val_texts = Vec::new();
        val_labels = Vec::new();
    }

    match run.model {
        ModelKind::Deep => train_deep(
            &mut run,
            train_texts,
            train_labels,
            val_texts,
            val_labels,
        ),
        ModelKind::Svm => train_svm(&run, &train_texts, &train_labels),
        ModelKind::EmbeddingSvm => train_embedding(&run, &ids, &train_labels),
    }
}

fn train_deep(
    run: &mut TrainRun,
    train_texts: Vec<String>,
    train_labels: Vec<usize>,
    val_texts: Vec<String>,
    val_labels: Vec<usize>,
) -> Result<(), CliError> {
    let embeddings = require(run.embeddings.clone(), "embeddings")?;

    let train_tokens: Vec<Vec<Token>> = run.pre.tokens_of(&train_texts);
    let val_tokens: Vec<Vec<Token>> = run.pre.tokens_of(&val_texts);

    // Character frequencies and the word-length suggestion both come
    // from the training split only.
    let vocab = build_char_vocab(&train_tokens, run.model_config.char_vocab_size - 2)?;
    run.model_config.char_vocab_size = vocab.table_size();
    run.model_config.max_word_len = match run.explicit_max_word_len {
        Some(len) => len,
        None => suggest_max_word_len(&train_tokens),
    };

    let table = load_embedding_table(&embeddings, run.embedding_limit)?;
    run.model_config.embedding_dim = table.dim();

    let train_ds = Dataset::new(train_tokens, train_labels)?;
    let val_ds = Dataset::new(val_tokens, val_labels)?;
    let (params, history) = nn::train(&train_ds, &val_ds, &vocab, &table, &run.model_config)?;

    let ckpt_path = run.shared.out_dir.join("model.ckpt");
    nn::save_checkpoint(&ckpt_path, &params, &run.model_config, &vocab)?;
    crate::commands::write_text(
        &run.shared.out_dir.join("history.jsonl"),
        &history.to_jsonl(),
    )?;

    let mut echo = base_echo(run);
    echo.set("embeddings", embeddings.display());
    echo.set_opt("embedding_limit", run.embedding_limit);
    echo_model_config(&mut echo, &run.model_config);
    echo.write(&run.shared.out_dir.join("config_echo.txt"))?;

    for warning in &history.warnings {
        eprintln!("warning: {warning}");
    }
    let best = &history.epochs[history.best_epoch];
    match best.val_macro_f1 {
        Some(f1) => println!(
            "trained deep model: best epoch {} (val macro-F1 {:.4}), checkpoint {}",
            best.epoch,
            f1,
            ckpt_path.display()
        ),
        None => println!(
            "trained deep model: {} epochs, checkpoint {}",
            history.epochs.len(),
            ckpt_path.display()
        ),
    }
    Ok(())
}

fn train_svm(run: &TrainRun, texts: &[String], labels: &[usize]) -> Result<(), CliError> {
    let featurizer = fit_featurizer(texts)?;
    let x = featurize(&featurizer, texts);
    let model = train_linear_svm(&x, labels, &run.sgd)?;
    let path = run.shared.out_dir.join("svm_model.json");
    save_svm_model(
        &path,
        &SvmModelFile {
            featurizer: Some(featurizer),
            model,
        },
    )?;

    let mut echo = base_echo(run);
    echo_sgd(&mut echo, &run.sgd);
    echo.write(&run.shared.out_dir.join("config_echo.txt"))?;

    println!("trained n-gram SVM on {} examples, model {}", texts.len(), path.display());
    Ok(())
}

fn train_embedding(run: &TrainRun, ids: &[String], labels: &[usize]) -> Result<(), CliError> {
    let vectors_path = require(run.vectors.clone(), "vectors")?;
    let rows = vectors_by_id(&vectors_path, ids)?;
    let model = train_embedding_svm(&rows, labels, &run.sgd)?;
    let path = run.shared.out_dir.join("svm_model.json");
    save_svm_model(
        &path,
        &SvmModelFile {
            featurizer: None,
            model,
        },
    )?;

    let mut echo = base_echo(run);
    echo.set("vectors", vectors_path.display());
    echo_sgd(&mut echo, &run.sgd);
    echo.write(&run.shared.out_dir.join("config_echo.txt"))?;

    println!(
        "trained sentence-vector SVM on {} examples, model {}",
        ids.len(),
        path.display()
    );
    Ok(())
}

/// Look up one sentence vector per example id, in example order.
pub fn vectors_by_id(path: &Path, ids: &[String]) -> Result<Vec<Vec<f64>>, CliError> {
    let entries = read_id_vectors(path)?;
    let by_id: HashMap<&str, &Vec<f64>> =
        entries.iter().map(|(id, v)| (id.as_str(), v)).collect();
    ids.iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .map(|v| (*v).clone())
                .ok_or_else(|| {
                    CliError::Core(Error::SizeMismatch(format!(
                        "no sentence vector for example id {id} in {}",
                        path.display()
                    )))
                })
        })
        .collect()
}
