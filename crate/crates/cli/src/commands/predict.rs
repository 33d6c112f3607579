//! `offlang predict`: label a file of raw texts (one per line) with a
//! trained deep-model checkpoint.

use std::fmt::Write as _;

use offlang_core::encoding::load_embedding_table;
use offlang_core::nn;
use offlang_core::Error;

use crate::args::PredictArgs;
use crate::commands::{require, resolve_preprocessor, resolve_shared, write_text};
use crate::config::Resolver;
use crate::CliError;

pub fn run(args: PredictArgs) -> Result<(), CliError> {
    let r = Resolver::new(args.shared.config.as_ref())?;
    let shared = resolve_shared(&r, &args.shared)?;
    let pre = resolve_preprocessor(&r, &args.preprocess)?;
    let model_file = require(r.opt("model_file", args.model_file)?, "model-file")?;
    let input = require(r.opt("input", args.input)?, "input")?;
    let embeddings = require(r.opt("embeddings", args.embedding.embeddings)?, "embeddings")?;
    let limit = r.opt("embedding_limit", args.embedding.embedding_limit)?;
    let output = r
        .opt("output", args.output)?
        .unwrap_or_else(|| shared.out_dir.join("predictions.csv"));
    let names = shared.subtask.class_names();

    let (params, config, vocab) = nn::load_checkpoint(&model_file)?;
    let table = load_embedding_table(&embeddings, limit)?;

    let text = std::fs::read_to_string(&input)
        .map_err(|e| Error::io(input.display().to_string(), e))?;
    let lines: Vec<&str> = text.lines().collect();
    let tokens: Vec<_> = lines.iter().map(|line| pre.tokens(line)).collect();
    if args.debug_tokens {
        for (i, toks) in tokens.iter().enumerate() {
            let joined: Vec<&str> = toks.iter().map(|t| t.as_str()).collect();
            println!("tokens {}: {}", i + 1, joined.join(" "));
        }
    }

    let predictions = nn::predict(&params, &config, &vocab, &table, &tokens)?;
    let mut csv = String::from("id,label,probability\n");
    for (i, (class, probability)) in predictions.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{:.6}", i + 1, names[*class], probability);
    }
    write_text(&output, &csv)?;

    println!("predicted {} lines into {}", lines.len(), output.display());
    Ok(())
}
