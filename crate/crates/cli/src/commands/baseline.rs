//! `offlang baseline`: constant-prediction baselines for a gold file.

use offlang_core::metrics::trivial_baseline;
use offlang_core::Error;

use crate::args::BaselineArgs;
use crate::commands::{load_examples_auto, require, resolve_shared, texts_and_labels, write_text};
use crate::config::Resolver;
use crate::CliError;

pub fn run(args: BaselineArgs) -> Result<(), CliError> {
    let r = Resolver::new(args.shared.config.as_ref())?;
    let shared = resolve_shared(&r, &args.shared)?;
    let gold_path = require(r.opt("gold", args.gold)?, "gold")?;

    let examples = load_examples_auto(&gold_path)?;
    let (_texts, labels) = texts_and_labels(&examples, shared.subtask)?;
    let names = shared.subtask.class_names();
    let gold_strs: Vec<&str> = labels.iter().map(|&l| names[l]).collect();

    let mut out = serde_json::Map::new();
    for name in names {
        let rep = trivial_baseline(&gold_strs, name, &names)?.rounded();
        println!(
            "all_{name}: accuracy {:.4}  macro-F1 {:.4}",
            rep.accuracy, rep.macro_f1
        );
        out.insert(
            format!("all_{name}"),
            serde_json::to_value(rep).map_err(Error::from)?,
        );
    }
    let json = serde_json::to_string_pretty(&serde_json::Value::Object(out))
        .map_err(Error::from)?;
    write_text(&shared.out_dir.join("trivial_baselines.json"), &json)?;
    Ok(())
}
