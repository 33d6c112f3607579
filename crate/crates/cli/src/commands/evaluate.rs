//! `offlang evaluate`: score a trained model against gold labels and
//! write predictions, metrics, the confusion matrix and the trivial
//! baselines.

use std::fmt::Write as _;

use offlang_core::baselines::{dense_to_sparse, featurize, load_svm_model};
use offlang_core::encoding::load_embedding_table;
use offlang_core::metrics::{confusion, report, trivial_baseline};
use offlang_core::nn;
use offlang_core::Error;

use crate::args::EvaluateArgs;
use crate::commands::train::vectors_by_id;
use crate::commands::{
    load_examples_auto, require, resolve_preprocessor, resolve_shared, texts_and_labels,
    write_text,
};
use crate::config::{ModelKind, Resolver};
use crate::CliError;

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let r = Resolver::new(args.shared.config.as_ref())?;
    let shared = resolve_shared(&r, &args.shared)?;
    let model_kind = r.get("model", args.model, ModelKind::Deep)?;
    let model_file = require(r.opt("model_file", args.model_file)?, "model-file")?;
    let gold_path = require(r.opt("gold", args.gold)?, "gold")?;

    let gold_examples = load_examples_auto(&gold_path)?;
    let (texts, gold_labels) = texts_and_labels(&gold_examples, shared.subtask)?;
    let names = shared.subtask.class_names();

    // Predicted class index plus a per-prediction score: the softmax
    // probability for the deep model, the decision value for the SVMs.
    let (pred_labels, scores): (Vec<usize>, Vec<f64>) = match model_kind {
        ModelKind::Deep => {
            let pre = resolve_preprocessor(&r, &args.preprocess)?;
            let embeddings = require(
                r.opt("embeddings", args.embedding.embeddings)?,
                "embeddings",
            )?;
            let limit = r.opt("embedding_limit", args.embedding.embedding_limit)?;
            let (params, config, vocab) = nn::load_checkpoint(&model_file)?;
            let table = load_embedding_table(&embeddings, limit)?;
            let tokens = pre.tokens_of(&texts);
            nn::predict(&params, &config, &vocab, &table, &tokens)?
                .into_iter()
                .unzip()
        }
        ModelKind::Svm => {
            let dump = load_svm_model(&model_file)?;
            let featurizer = dump.featurizer.ok_or_else(|| {
                CliError::Core(Error::BadCheckpoint(format!(
                    "{} holds no featurizer; evaluate it with --model embedding-svm",
                    model_file.display()
                )))
            })?;
            let x = featurize(&featurizer, &texts);
            x.rows
                .iter()
                .map(|row| (dump.model.predict_row(row), dump.model.decision(row)))
                .unzip()
        }
        ModelKind::EmbeddingSvm => {
            let vectors = require(r.opt("vectors", args.vectors)?, "vectors")?;
            let dump = load_svm_model(&model_file)?;
            let ids: Vec<String> = gold_examples.iter().map(|e| e.id.clone()).collect();
            let rows = vectors_by_id(&vectors, &ids)?;
            let x = dense_to_sparse(&rows);
            x.rows
                .iter()
                .map(|row| (dump.model.predict_row(row), dump.model.decision(row)))
                .unzip()
        }
    };

    let gold_strs: Vec<&str> = gold_labels.iter().map(|&l| names[l]).collect();
    let pred_strs: Vec<&str> = pred_labels.iter().map(|&l| names[l]).collect();
    let cm = confusion(&gold_strs, &pred_strs, &names)?;
    let metrics = report(&cm)?;

    let mut csv = String::from("id,gold,predicted,score\n");
    for (((ex, gold), pred), score) in gold_examples
        .iter()
        .zip(&gold_strs)
        .zip(&pred_strs)
        .zip(&scores)
    {
        let _ = writeln!(csv, "{},{},{},{:.6}", ex.id, gold, pred, score);
    }
    write_text(&shared.out_dir.join("predictions.csv"), &csv)?;
    write_text(&shared.out_dir.join("metrics.json"), &metrics.to_json()?)?;
    write_text(&shared.out_dir.join("confusion.txt"), &cm.render())?;

    // Constant-prediction reference points for the same gold file.
    let mut baselines = serde_json::Map::new();
    for name in names {
        let rep = trivial_baseline(&gold_strs, name, &names)?.rounded();
        baselines.insert(
            format!("all_{name}"),
            serde_json::to_value(rep).map_err(Error::from)?,
        );
    }
    let baselines_json = serde_json::to_string_pretty(&serde_json::Value::Object(baselines))
        .map_err(Error::from)?;
    write_text(&shared.out_dir.join("trivial_baselines.json"), &baselines_json)?;

    println!(
        "evaluated {} examples: accuracy {:.4}, macro-F1 {:.4} (reports in {})",
        gold_examples.len(),
        metrics.accuracy,
        metrics.macro_f1,
        shared.out_dir.display()
    );
    Ok(())
}
