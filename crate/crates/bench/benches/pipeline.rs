//! End-to-end hot paths: tokenization + normalization, lexicon build,
//! batch encoding, the deep model's forward pass, n-gram featurization
//! and SGD training of the linear SVM.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use offlang_bench::{sample_texts, sample_token_lists};
use offlang_core::baselines::{featurize, fit_featurizer, train_linear_svm, SgdHyperparams};
use offlang_core::encoding::{build_char_vocab, make_batch, EmbeddingTable};
use offlang_core::lexnorm::{
    build_variant_table, builtin_word_list, normalize_text, ObfuscationLexicon, SubstitutionMap,
};
use offlang_core::nn::{self, Mode, ModelConfig};

fn bench_normalize(c: &mut Criterion) {
    let lexicon = ObfuscationLexicon::builtin().unwrap();
    let texts = sample_texts(64);
    c.bench_function("normalize_text/64 tweets", |b| {
        b.iter(|| {
            for text in &texts {
                black_box(normalize_text(text, &lexicon, false, false));
            }
        })
    });
}

fn bench_lexicon_build(c: &mut Criterion) {
    let words = builtin_word_list();
    let subs = SubstitutionMap::default();
    let mut group = c.benchmark_group("lexicon");
    group.sample_size(10);
    group.bench_function("build_variant_table/builtin word list", |b| {
        b.iter(|| black_box(build_variant_table(&words, &subs, 3).unwrap()))
    });
    group.finish();
}

fn bench_encode_batch(c: &mut Criterion) {
    let lexicon = ObfuscationLexicon::builtin().unwrap();
    let texts = sample_texts(32);
    let tokens = sample_token_lists(&texts, &lexicon);
    let vocab = build_char_vocab(&tokens, 256).unwrap();
    let table = EmbeddingTable::empty(300);
    c.bench_function("make_batch/32 tweets", |b| {
        b.iter(|| black_box(make_batch(&tokens, None, &vocab, &table, 16).unwrap()))
    });
}

fn bench_deep_forward(c: &mut Criterion) {
    let lexicon = ObfuscationLexicon::builtin().unwrap();
    let texts = sample_texts(8);
    let tokens = sample_token_lists(&texts, &lexicon);
    let vocab = build_char_vocab(&tokens, 256).unwrap();
    let table = EmbeddingTable::empty(300);
    let config = ModelConfig {
        char_vocab_size: vocab.table_size(),
        max_word_len: 16,
        batch_size: 8,
        ..ModelConfig::default()
    };
    let params = nn::init_model(&config).unwrap();
    let batch = make_batch(&tokens, None, &vocab, &table, config.max_word_len).unwrap();
    let mut group = c.benchmark_group("deep");
    group.sample_size(20);
    group.bench_function("forward/batch of 8, full-size model", |b| {
        b.iter(|| black_box(nn::forward(&params, &batch, &config, Mode::Eval, None).unwrap()))
    });
    group.finish();
}

fn bench_featurize_and_svm(c: &mut Criterion) {
    let texts = sample_texts(200);
    let labels: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let featurizer = fit_featurizer(&texts).unwrap();
    c.bench_function("featurize/200 tweets", |b| {
        b.iter(|| black_box(featurize(&featurizer, &texts)))
    });
    let x = featurize(&featurizer, &texts);
    let mut group = c.benchmark_group("svm");
    group.sample_size(20);
    group.bench_function("train_linear_svm/200 rows, 15 epochs", |b| {
        b.iter(|| black_box(train_linear_svm(&x, &labels, &SgdHyperparams::default()).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_normalize,
    bench_lexicon_build,
    bench_encode_batch,
    bench_deep_forward,
    bench_featurize_and_svm,
);
criterion_main!(benches);
