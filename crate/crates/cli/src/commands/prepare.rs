//! `offlang prepare`: load raw corpora, map and balance labels, split
//! into train/validation TSVs, and record a manifest.

use std::collections::BTreeMap;

use serde::Serialize;

use offlang_core::corpus::{
    balance, build_subtask_b_view, load_toxic_comments, map_toxic_labels, split, write_prepared,
    LabeledExample,
};

use crate::args::PrepareArgs;
use crate::commands::{load_examples_auto, require, resolve_shared, write_text};
use crate::config::{Resolver, Subtask};
use crate::CliError;

#[derive(Serialize)]
struct SplitCounts {
    n: usize,
    by_label: BTreeMap<String, usize>,
    by_source: BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct Manifest {
    subtask: String,
    seed: u64,
    n_train: usize,
    n_val: usize,
    /// OFF/NOT pairs appended from the toxic corpus, absent without
    /// augmentation; the two counts are equal by construction.
    augmented_pairs: Option<BTreeMap<String, usize>>,
    train: SplitCounts,
    validation: SplitCounts,
}

fn count_split(examples: &[LabeledExample], subtask: Subtask) -> SplitCounts {
    let mut by_label = BTreeMap::new();
    let mut by_source = BTreeMap::new();
    for ex in examples {
        let label = match subtask {
            Subtask::A => ex.label_a.as_str(),
            Subtask::B => ex.label_b.map(|b| b.as_str()).unwrap_or("-"),
        };
        *by_label.entry(label.to_string()).or_insert(0) += 1;
        *by_source.entry(ex.source.as_str().to_string()).or_insert(0) += 1;
    }
    SplitCounts {
        n: examples.len(),
        by_label,
        by_source,
    }
}

pub fn run(args: PrepareArgs) -> Result<(), CliError> {
    let r = Resolver::new(args.shared.config.as_ref())?;
    let shared = resolve_shared(&r, &args.shared)?;

    let olid_train = require(r.opt("olid_train", args.olid_train)?, "olid-train")?;
    let toxic = r.opt("toxic", args.toxic)?;
    let augment = r.get("augment", args.augment, toxic.is_some())?;
    if augment && toxic.is_none() {
        return Err(CliError::Usage(
            "augmentation requested but no --toxic file given".to_string(),
        ));
    }
    if augment && shared.subtask == Subtask::B {
        return Err(CliError::Usage(
            "subtask B has no targeted/untargeted labels for toxic comments; \
             augmentation is not available"
                .to_string(),
        ));
    }

    let examples = load_examples_auto(&olid_train)?;
    let examples = match shared.subtask {
        Subtask::A => examples,
        Subtask::B => build_subtask_b_view(&examples),
    };

    let n = examples.len();
    let n_train = r.opt("n_train", args.n_train)?;
    let n_val = r.opt("n_val", args.n_val)?;
    let val_fraction = r.get("val_fraction", args.val_fraction, 0.1)?;
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(CliError::Usage(format!(
            "val_fraction {val_fraction} outside [0, 1)"
        )));
    }
    let (n_train, n_val) = match (n_train, n_val) {
        (Some(t), Some(v)) => (t, v),
        (Some(t), None) => (t, n.saturating_sub(t)),
        (None, Some(v)) => (n.saturating_sub(v), v),
        (None, None) => {
            let v = (n as f64 * val_fraction).round() as usize;
            (n - v, v)
        }
    };

    let split_result = split(examples, n_train, n_val, shared.seed)?;
    let mut train = split_result.train;
    let validation = split_result.validation;

    let augmented_pairs = if augment {
        let toxic_path = toxic.expect("checked above");
        let rows = load_toxic_comments(&toxic_path)?;
        let mapped = map_toxic_labels(&rows);
        let balanced = balance(mapped, shared.seed);
        let mut counts = BTreeMap::new();
        for ex in &balanced {
            *counts.entry(ex.label_a.as_str().to_string()).or_insert(0) += 1;
        }
        train.extend(balanced);
        Some(counts)
    } else {
        None
    };

    write_prepared(&shared.out_dir.join("train.tsv"), &train)?;
    write_prepared(&shared.out_dir.join("validation.tsv"), &validation)?;

    let manifest = Manifest {
        subtask: shared.subtask.to_string(),
        seed: shared.seed,
        n_train,
        n_val,
        augmented_pairs,
        train: count_split(&train, shared.subtask),
        validation: count_split(&validation, shared.subtask),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(offlang_core::Error::from)?;
    write_text(&shared.out_dir.join("manifest.json"), &json)?;

    let toxic_added = manifest
        .augmented_pairs
        .as_ref()
        .map(|c| c.values().sum::<usize>())
        .unwrap_or(0);
    println!(
        "prepared {} train / {} validation examples ({} augmented) in {}",
        manifest.train.n,
        manifest.validation.n,
        toxic_added,
        shared.out_dir.display()
    );
    Ok(())
}
