//! The deep classifier: configuration, parameters, seeded training with
//! Adam, prediction, and single-file checkpoints.

mod model;

pub use model::{char_word_features, forward, loss, softmax, Mode};

use ndarray::{Array1, Array2, Array3, ArrayViewD};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::encoding::{make_batch, CharVocabulary, EmbeddingTable, EncodedBatch};
use crate::error::Error;
use crate::lexnorm::Token;
use crate::Result;

/// How the LSTM's per-step outputs are reduced to one vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// Output at the last unmasked time step.
    Last,
    /// Mean of the outputs at unmasked time steps.
    Mean,
}

/// All architecture and training knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub char_vocab_size: usize,
    pub char_emb_dim: usize,
    pub conv1_filters: usize,
    pub conv2_filters: usize,
    pub kernel_size: usize,
    pub pool_size: usize,
    pub lstm_units: usize,
    pub fc1_units: usize,
    pub n_classes: usize,
    pub embedding_dim: usize,
    pub max_word_len: usize,
    pub dropout_keep: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub readout: Readout,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            char_vocab_size: 258,
            char_emb_dim: 32,
            conv1_filters: 64,
            conv2_filters: 128,
            kernel_size: 2,
            pool_size: 2,
            lstm_units: 256,
            fc1_units: 128,
            n_classes: 2,
            embedding_dim: 300,
            max_word_len: 32,
            dropout_keep: 0.5,
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 20,
            seed: 5,
            readout: Readout::Last,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [
            self.char_vocab_size,
            self.char_emb_dim,
            self.conv1_filters,
            self.conv2_filters,
            self.kernel_size,
            self.pool_size,
            self.lstm_units,
            self.fc1_units,
            self.n_classes,
            self.embedding_dim,
            self.max_word_len,
            self.batch_size,
            self.max_epochs,
        ];
        if sizes.contains(&0) {
            return Err(Error::DimensionMismatch(
                "all model sizes must be at least 1".to_string(),
            ));
        }
        if !(self.dropout_keep > 0.0 && self.dropout_keep <= 1.0) {
            return Err(Error::DimensionMismatch(format!(
                "dropout keep rate {} outside (0, 1]",
                self.dropout_keep
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Numeric(format!(
                "bad learning rate {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    /// Factor the two pooling layers divide the word length by.
    pub fn pooling_depth(&self) -> usize {
        self.pool_size * self.pool_size
    }

    /// Word length after padding up to a multiple of the pooling depth.
    pub fn padded_word_len(&self) -> usize {
        let pp = self.pooling_depth();
        self.max_word_len.div_ceil(pp) * pp
    }

    /// Flattened char-feature width per word.
    pub fn feature_dim(&self) -> usize {
        self.padded_word_len() / self.pooling_depth() * self.conv2_filters
    }

    /// LSTM input width: char features concatenated with the word vector.
    pub fn lstm_input_dim(&self) -> usize {
        self.feature_dim() + self.embedding_dim
    }
}

/// All learned tensors. LSTM gate blocks are stacked (i, f, g, o) along
/// the first axis of `lstm_w_x` / `lstm_w_h` / `lstm_bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub char_embedding: Array2<f64>,
    pub conv1_kernel: Array3<f64>,
    pub conv1_bias: Array1<f64>,
    pub conv2_kernel: Array3<f64>,
    pub conv2_bias: Array1<f64>,
    pub lstm_w_x: Array2<f64>,
    pub lstm_w_h: Array2<f64>,
    pub lstm_bias: Array1<f64>,
    pub fc1_weight: Array2<f64>,
    pub fc1_bias: Array1<f64>,
    pub fc2_weight: Array2<f64>,
    pub fc2_bias: Array1<f64>,
}

impl ModelParams {
    /// All-zero parameters with the shapes the config implies.
    pub fn zeros(config: &ModelConfig) -> ModelParams {
        let (v, e) = (config.char_vocab_size, config.char_emb_dim);
        let (k, f1, f2) = (config.kernel_size, config.conv1_filters, config.conv2_filters);
        let h = config.lstm_units;
        let d = config.lstm_input_dim();
        ModelParams {
            char_embedding: Array2::zeros((v, e)),
            conv1_kernel: Array3::zeros((k, e, f1)),
            conv1_bias: Array1::zeros(f1),
            conv2_kernel: Array3::zeros((k, f1, f2)),
            conv2_bias: Array1::zeros(f2),
            lstm_w_x: Array2::zeros((4 * h, d)),
            lstm_w_h: Array2::zeros((4 * h, h)),
            lstm_bias: Array1::zeros(4 * h),
            fc1_weight: Array2::zeros((config.fc1_units, h)),
            fc1_bias: Array1::zeros(config.fc1_units),
            fc2_weight: Array2::zeros((config.n_classes, config.fc1_units)),
            fc2_bias: Array1::zeros(config.n_classes),
        }
    }

    /// Zero tensors with this instance's shapes (gradient container).
    pub fn zeros_like(&self) -> ModelParams {
        ModelParams {
            char_embedding: Array2::zeros(self.char_embedding.raw_dim()),
            conv1_kernel: Array3::zeros(self.conv1_kernel.raw_dim()),
            conv1_bias: Array1::zeros(self.conv1_bias.raw_dim()),
            conv2_kernel: Array3::zeros(self.conv2_kernel.raw_dim()),
            conv2_bias: Array1::zeros(self.conv2_bias.raw_dim()),
            lstm_w_x: Array2::zeros(self.lstm_w_x.raw_dim()),
            lstm_w_h: Array2::zeros(self.lstm_w_h.raw_dim()),
            lstm_bias: Array1::zeros(self.lstm_bias.raw_dim()),
            fc1_weight: Array2::zeros(self.fc1_weight.raw_dim()),
            fc1_bias: Array1::zeros(self.fc1_bias.raw_dim()),
            fc2_weight: Array2::zeros(self.fc2_weight.raw_dim()),
            fc2_bias: Array1::zeros(self.fc2_bias.raw_dim()),
        }
    }

    /// Named views over every tensor, in the fixed serialization order.
    pub fn tensor_views(&self) -> Vec<(&'static str, ArrayViewD<'_, f64>)> {
        vec![
            ("char_embedding", self.char_embedding.view().into_dyn()),
            ("conv1_kernel", self.conv1_kernel.view().into_dyn()),
            ("conv1_bias", self.conv1_bias.view().into_dyn()),
            ("conv2_kernel", self.conv2_kernel.view().into_dyn()),
            ("conv2_bias", self.conv2_bias.view().into_dyn()),
            ("lstm_w_x", self.lstm_w_x.view().into_dyn()),
            ("lstm_w_h", self.lstm_w_h.view().into_dyn()),
            ("lstm_bias", self.lstm_bias.view().into_dyn()),
            ("fc1_weight", self.fc1_weight.view().into_dyn()),
            ("fc1_bias", self.fc1_bias.view().into_dyn()),
            ("fc2_weight", self.fc2_weight.view().into_dyn()),
            ("fc2_bias", self.fc2_bias.view().into_dyn()),
        ]
    }

    /// Total trainable parameter count.
    pub fn param_count(&self) -> usize {
        self.tensor_views().iter().map(|(_, v)| v.len()).sum()
    }

    /// All tensors concatenated in serialization order, row-major.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (_, view) in self.tensor_views() {
            out.extend(view.iter().copied());
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten); shapes must already match.
    pub fn assign_from_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} parameters",
                flat.len(),
                self.param_count()
            )));
        }
        let mut offset = 0;
        for slot in [
            self.char_embedding.view_mut().into_dyn(),
            self.conv1_kernel.view_mut().into_dyn(),
            self.conv1_bias.view_mut().into_dyn(),
            self.conv2_kernel.view_mut().into_dyn(),
            self.conv2_bias.view_mut().into_dyn(),
            self.lstm_w_x.view_mut().into_dyn(),
            self.lstm_w_h.view_mut().into_dyn(),
            self.lstm_bias.view_mut().into_dyn(),
            self.fc1_weight.view_mut().into_dyn(),
            self.fc1_bias.view_mut().into_dyn(),
            self.fc2_weight.view_mut().into_dyn(),
            self.fc2_bias.view_mut().into_dyn(),
        ] {
            let mut view = slot;
            let len = view.len();
            for (dst, src) in view.iter_mut().zip(&flat[offset..offset + len]) {
                *dst = *src;
            }
            offset += len;
        }
        Ok(())
    }
}

fn uniform_fill(rng: &mut ChaCha8Rng, len: usize, fan_in: usize) -> Vec<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    (0..len).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// Seeded uniform fan-in-scaled initialization; biases zero. The draw
/// order is fixed (embedding, conv1, conv2, LSTM Wx/Wh, fc1, fc2), so a
/// seed pins every value.
pub fn init_model(config: &ModelConfig) -> Result<ModelParams> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(init_model_from_rng(config, &mut rng))
}

pub(crate) fn init_model_from_rng(config: &ModelConfig, rng: &mut ChaCha8Rng) -> ModelParams {
    let (v, e) = (config.char_vocab_size, config.char_emb_dim);
    let (k, f1, f2) = (config.kernel_size, config.conv1_filters, config.conv2_filters);
    let h = config.lstm_units;
    let d = config.lstm_input_dim();
    let mut params = ModelParams::zeros(config);
    params.char_embedding =
        Array2::from_shape_vec((v, e), uniform_fill(rng, v * e, e)).expect("shape");
    params.conv1_kernel =
        Array3::from_shape_vec((k, e, f1), uniform_fill(rng, k * e * f1, k * e)).expect("shape");
    params.conv2_kernel =
        Array3::from_shape_vec((k, f1, f2), uniform_fill(rng, k * f1 * f2, k * f1)).expect("shape");
    params.lstm_w_x =
        Array2::from_shape_vec((4 * h, d), uniform_fill(rng, 4 * h * d, d)).expect("shape");
    params.lstm_w_h =
        Array2::from_shape_vec((4 * h, h), uniform_fill(rng, 4 * h * h, h)).expect("shape");
    params.fc1_weight = Array2::from_shape_vec(
        (config.fc1_units, h),
        uniform_fill(rng, config.fc1_units * h, h),
    )
    .expect("shape");
    params.fc2_weight = Array2::from_shape_vec(
        (config.n_classes, config.fc1_units),
        uniform_fill(rng, config.n_classes * config.fc1_units, config.fc1_units),
    )
    .expect("shape");
    params
}

/// One tokenized, label-encoded dataset.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub tokens: Vec<Vec<Token>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(tokens: Vec<Vec<Token>>, labels: Vec<usize>) -> Result<Dataset> {
        if tokens.len() != labels.len() {
            return Err(Error::SizeMismatch(format!(
                "{} token lists for {} labels",
                tokens.len(),
                labels.len()
            )));
        }
        Ok(Dataset { tokens, labels })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Per-epoch training record. Validation fields are absent when the
/// validation set is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_macro_f1: Option<f64>,
    pub val_accuracy: Option<f64>,
}

/// Full training trace plus the index of the retained epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Zero-based index into `epochs` of the retained parameters:
    /// maximal validation macro-F1, earliest on ties.
    pub best_epoch: usize,
    pub warnings: Vec<String>,
}

impl TrainHistory {
    /// One JSON record per epoch, newline-separated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.epochs {
            out.push_str(&serde_json::to_string(record).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

/// Adam state over the flattened parameter vector.
struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn new(lr: f64, len: usize) -> Adam {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / b1t;
            let v_hat = *v / b2t;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

fn eval_predictions(
    params: &ModelParams,
    config: &ModelConfig,
    vocab: &CharVocabulary,
    table: &EmbeddingTable,
    data: &Dataset,
) -> Result<Vec<usize>> {
    let mut preds = Vec::with_capacity(data.len());
    for chunk in data.tokens.chunks(config.batch_size) {
        let batch = make_batch(chunk, None, vocab, table, config.max_word_len)?;
        let logits = forward(params, &batch, config, Mode::Eval, None)?;
        for row in logits.rows() {
            preds.push(argmax_tie_low(row.iter().copied()));
        }
    }
    Ok(preds)
}

/// Argmax with ties broken toward the lowest class index.
fn argmax_tie_low(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    best_idx
}

fn validation_metrics(
    params: &ModelParams,
    config: &ModelConfig,
    vocab: &CharVocabulary,
    table: &EmbeddingTable,
    val: &Dataset,
) -> Result<(f64, f64)> {
    let preds = eval_predictions(params, config, vocab, table, val)?;
    let class_names: Vec<String> = (0..config.n_classes).map(|c| c.to_string()).collect();
    let class_refs: Vec<&str> = class_names.iter().map(|s| s.as_str()).collect();
    let gold: Vec<&str> = val.labels.iter().map(|&l| class_refs[l]).collect();
    let pred: Vec<&str> = preds.iter().map(|&l| class_refs[l]).collect();
    let cm = crate::metrics::confusion(&gold, &pred, &class_refs)?;
    let report = crate::metrics::report(&cm)?;
    Ok((report.macro_f1, report.accuracy))
}

/// Train with seeded shuffled mini-batches and Adam. After every epoch
/// the validation macro-F1 is computed; the returned parameters are
/// those of the best epoch (earliest on ties). An empty validation set
/// keeps the final epoch and records a warning.
pub fn train(
    train_data: &Dataset,
    val_data: &Dataset,
    vocab: &CharVocabulary,
    table: &EmbeddingTable,
    config: &ModelConfig,
) -> Result<(ModelParams, TrainHistory)> {
    config.validate()?;
    if train_data.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if train_data.tokens.len() != train_data.labels.len()
        || val_data.tokens.len() != val_data.labels.len()
    {
        return Err(Error::SizeMismatch(
            "token/label counts disagree".to_string(),
        ));
    }
    if let Some(&bad) = train_data
        .labels
        .iter()
        .chain(&val_data.labels)
        .find(|&&l| l >= config.n_classes)
    {
        return Err(Error::DimensionMismatch(format!(
            "label {bad} outside {} classes",
            config.n_classes
        )));
    }
    if table.dim() != config.embedding_dim {
        return Err(Error::DimensionMismatch(format!(
            "embedding table dim {} != configured {}",
            table.dim(),
            config.embedding_dim
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = init_model_from_rng(config, &mut rng);
    let mut adam = Adam::new(config.learning_rate, params.param_count());

    let n = train_data.len();
    let mut history = TrainHistory {
        epochs: Vec::with_capacity(config.max_epochs),
        best_epoch: 0,
        warnings: Vec::new(),
    };
    let mut best: Option<(f64, ModelParams)> = None;

    if val_data.is_empty() {
        history
            .warnings
            .push("validation set empty; keeping final-epoch parameters".to_string());
    }

    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let tokens: Vec<Vec<Token>> =
                chunk.iter().map(|&i| train_data.tokens[i].clone()).collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| train_data.labels[i]).collect();
            let batch = make_batch(&tokens, Some(&labels), vocab, table, config.max_word_len)?;
            let masks = if config.dropout_keep < 1.0 {
                Some(model::sample_masks(
                    config,
                    batch.batch_size(),
                    batch.max_words(),
                    &mut rng,
                ))
            } else {
                None
            };
            let (batch_loss, grads) = model::loss_and_grads(&params, &batch, config, masks.as_ref())?;
            if !batch_loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss {batch_loss} at epoch {epoch}"
                )));
            }
            loss_sum += batch_loss * chunk.len() as f64;
            let mut flat = params.flatten();
            adam.step(&mut flat, &grads.flatten());
            params.assign_from_flat(&flat)?;
        }
        let train_loss = loss_sum / n as f64;

        let (val_macro_f1, val_accuracy) = if val_data.is_empty() {
            (None, None)
        } else {
            let (f1, acc) = validation_metrics(&params, config, vocab, table, val_data)?;
            (Some(f1), Some(acc))
        };
        if let Some(f1) = val_macro_f1 {
            let improved = best.as_ref().is_none_or(|(best_f1, _)| f1 > *best_f1);
            if improved {
                best = Some((f1, params.clone()));
                history.best_epoch = epoch;
            }
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_macro_f1,
            val_accuracy,
        });
    }

    if let Some((_, best_params)) = best {
        params = best_params;
    } else {
        history.best_epoch = config.max_epochs - 1;
    }
    Ok((params, history))
}

/// Predict class index and softmax probability for each token list.
/// Ties in the logits resolve toward class 0.
pub fn predict(
    params: &ModelParams,
    config: &ModelConfig,
    vocab: &CharVocabulary,
    table: &EmbeddingTable,
    examples: &[Vec<Token>],
) -> Result<Vec<(usize, f64)>> {
    if examples.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(examples.len());
    for chunk in examples.chunks(config.batch_size) {
        let batch = make_batch(chunk, None, vocab, table, config.max_word_len)?;
        let logits = forward(params, &batch, config, Mode::Eval, None)?;
        let probs = softmax(&logits);
        for (logit_row, prob_row) in logits.rows().into_iter().zip(probs.rows()) {
            let class = argmax_tie_low(logit_row.iter().copied());
            out.push((class, prob_row[class]));
        }
    }
    Ok(out)
}

/// Loss and analytic parameter gradients for one labelled batch with
/// dropout disabled, for finite-difference gradient checking.
pub fn loss_and_gradients(
    params: &ModelParams,
    batch: &EncodedBatch,
    config: &ModelConfig,
) -> Result<(f64, ModelParams)> {
    model::loss_and_grads(params, batch, config, None)
}

/// Magic bytes opening every checkpoint file.
pub const CHECKPOINT_MAGIC: &[u8; 8] = b"OFFMDL1\0";

#[derive(Serialize, Deserialize)]
struct TensorInfo {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    config: ModelConfig,
    char_vocab: String,
    embedding_dim: usize,
    tensors: Vec<TensorInfo>,
}

/// Write a single-file checkpoint: magic, length-prefixed JSON header
/// (config echo, char vocabulary, tensor manifest), then all tensor
/// values as little-endian f64 in manifest order.
pub fn save_checkpoint(
    path: &Path,
    params: &ModelParams,
    config: &ModelConfig,
    vocab: &CharVocabulary,
) -> Result<()> {
    let header = CheckpointHeader {
        config: config.clone(),
        char_vocab: vocab.to_text(),
        embedding_dim: config.embedding_dim,
        tensors: params
            .tensor_views()
            .iter()
            .map(|(name, view)| TensorInfo {
                name: name.to_string(),
                shape: view.shape().to_vec(),
            })
            .collect(),
    };
    let header_json = serde_json::to_vec(&header)?;
    let mut bytes = Vec::with_capacity(16 + header_json.len() + params.param_count() * 8);
    bytes.extend_from_slice(CHECKPOINT_MAGIC);
    bytes.extend_from_slice(&(header_json.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&header_json);
    for (_, view) in params.tensor_views() {
        for &value in view.iter() {
            bytes.extend_from_slice(&value.to_le_bytes());
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<(ModelParams, ModelConfig, CharVocabulary)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    if bytes.len() < 16 || &bytes[0..8] != CHECKPOINT_MAGIC {
        return Err(Error::BadCheckpoint("bad magic header".to_string()));
    }
    let header_len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let payload_start = 16 + header_len;
    if bytes.len() < payload_start {
        return Err(Error::BadCheckpoint("truncated header".to_string()));
    }
    let header: CheckpointHeader = serde_json::from_slice(&bytes[16..payload_start])
        .map_err(|e| Error::BadCheckpoint(format!("unreadable header: {e}")))?;
    header.config.validate()?;
    let vocab = CharVocabulary::from_text(&header.char_vocab, "checkpoint")
        .map_err(|e| Error::BadCheckpoint(format!("bad embedded vocabulary: {e}")))?;

    let mut params = ModelParams::zeros(&header.config);
    // verify the manifest matches the config-implied shapes
    for ((name, view), info) in params.tensor_views().iter().zip(&header.tensors) {
        if *name != info.name || view.shape() != info.shape.as_slice() {
            return Err(Error::BadCheckpoint(format!(
                "tensor {} has shape {:?}, expected {:?} for {}",
                info.name,
                info.shape,
                view.shape(),
                name
            )));
        }
    }
    if header.tensors.len() != params.tensor_views().len() {
        return Err(Error::BadCheckpoint("tensor manifest length mismatch".to_string()));
    }

    let expected_payload = params.param_count() * 8;
    let payload = &bytes[payload_start..];
    if payload.len() != expected_payload {
        return Err(Error::BadCheckpoint(format!(
            "payload of {} bytes, expected {expected_payload}",
            payload.len()
        )));
    }
    let mut flat = Vec::with_capacity(params.param_count());
    for chunk in payload.chunks_exact(8) {
        flat.push(f64::from_le_bytes(chunk.try_into().expect("8 bytes")));
    }
    params.assign_from_flat(&flat)?;
    Ok((params, header.config, vocab))
}
