//! Forward and backward passes of the char-CNN + word-LSTM classifier.
//!
//! The char pipeline per word: embedding lookup → conv(k=2, same, ReLU)
//! → maxpool(2,2) → conv → maxpool → flatten. The flattened feature is
//! concatenated with the word's pretrained embedding and the sequence is
//! fed to a unidirectional LSTM; the read-out goes through two
//! fully-connected layers producing one logit per class.

use ndarray::{concatenate, s, Array1, Array2, Array3, ArrayView2, ArrayView3, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::{EncodedBatch, PAD_INDEX};
use crate::error::Error;
use crate::Result;

use super::{ModelConfig, ModelParams, Readout};

/// Dropout behaviour: `Train` applies inverted dropout, `Eval` is
/// deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Inverted-dropout masks (entries 0 or 1/keep) for the four dropout
/// sites: CNN output, word vectors, LSTM read-out, fc1 output.
pub(crate) struct DropoutMasks {
    cnn: Array2<f64>,
    words: Array3<f64>,
    readout: Array2<f64>,
    fc1: Array2<f64>,
}

fn bernoulli(rng: &mut ChaCha8Rng, keep: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
        .collect()
}

pub(crate) fn sample_masks(
    config: &ModelConfig,
    n: usize,
    max_words: usize,
    rng: &mut ChaCha8Rng,
) -> DropoutMasks {
    let keep = config.dropout_keep;
    let fd = config.feature_dim();
    let m = n * max_words;
    DropoutMasks {
        cnn: Array2::from_shape_vec((m, fd), bernoulli(rng, keep, m * fd)).expect("shape"),
        words: Array3::from_shape_vec(
            (n, max_words, config.embedding_dim),
            bernoulli(rng, keep, m * config.embedding_dim),
        )
        .expect("shape"),
        readout: Array2::from_shape_vec((n, config.lstm_units), bernoulli(rng, keep, n * config.lstm_units))
            .expect("shape"),
        fc1: Array2::from_shape_vec((n, config.fc1_units), bernoulli(rng, keep, n * config.fc1_units))
            .expect("shape"),
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Copy a 3-D view into a standard-layout [x·y, z] matrix.
fn collapse3(a: ArrayView3<f64>) -> Array2<f64> {
    let (x, y, z) = a.dim();
    a.to_owned()
        .into_shape_with_order((x * y, z))
        .expect("owned arrays are standard layout")
}

/// Length-preserving ("same") convolution along the middle axis:
/// out[m, t, f] = bias[f] + Σ_d input[m, t − pad_left + d, :] · kernel[d, :, f]
/// with pad_left = (k−1)/2, out-of-range positions contributing zero.
fn conv_same(input: &Array3<f64>, kernel: &Array3<f64>, bias: &Array1<f64>) -> Array3<f64> {
    let (m, len, _cin) = input.dim();
    let (k, _, cout) = kernel.dim();
    let pad_left = (k - 1) / 2;
    let mut out = Array3::zeros((m, len, cout));
    out += bias;
    for d in 0..k {
        // source s = t − pad_left + d must lie in [0, len)
        let t_lo = pad_left.saturating_sub(d);
        let t_hi = (len + pad_left).saturating_sub(d).min(len);
        if t_lo >= t_hi {
            continue;
        }
        let s_lo = t_lo + d - pad_left;
        let s_hi = t_hi + d - pad_left;
        let inp = collapse3(input.slice(s![.., s_lo..s_hi, ..]));
        let prod = inp.dot(&kernel.index_axis(Axis(0), d));
        let prod3 = prod
            .into_shape_with_order((m, t_hi - t_lo, cout))
            .expect("shape");
        let mut dst = out.slice_mut(s![.., t_lo..t_hi, ..]);
        dst += &prod3;
    }
    out
}

/// Backward of [`conv_same`]: accumulates kernel/bias gradients and
/// returns the input gradient.
fn conv_same_backward(
    input: &Array3<f64>,
    kernel: &Array3<f64>,
    dout: &Array3<f64>,
    dkernel: &mut Array3<f64>,
    dbias: &mut Array1<f64>,
) -> Array3<f64> {
    let (m, len, cin) = input.dim();
    let (k, _, _cout) = kernel.dim();
    let pad_left = (k - 1) / 2;
    *dbias += &dout.sum_axis(Axis(0)).sum_axis(Axis(0));
    let mut dinput = Array3::zeros((m, len, cin));
    for d in 0..k {
        let t_lo = pad_left.saturating_sub(d);
        let t_hi = (len + pad_left).saturating_sub(d).min(len);
        if t_lo >= t_hi {
            continue;
        }
        let s_lo = t_lo + d - pad_left;
        let s_hi = t_hi + d - pad_left;
        let inp = collapse3(input.slice(s![.., s_lo..s_hi, ..]));
        let dot = collapse3(dout.slice(s![.., t_lo..t_hi, ..]));
        let mut dk = dkernel.index_axis_mut(Axis(0), d);
        dk += &inp.t().dot(&dot);
        let dinp = dot.dot(&kernel.index_axis(Axis(0), d).t());
        let dinp3 = dinp
            .into_shape_with_order((m, t_hi - t_lo, cin))
            .expect("shape");
        let mut dst = dinput.slice_mut(s![.., s_lo..s_hi, ..]);
        dst += &dinp3;
    }
    dinput
}

/// Max-pool with stride = pool size; returns pooled values and the
/// in-window offset of each maximum (first occurrence on ties).
fn maxpool(input: &Array3<f64>, p: usize) -> (Array3<f64>, Array3<usize>) {
    let (m, len, c) = input.dim();
    let out_len = len / p;
    let mut out = Array3::zeros((m, out_len, c));
    let mut arg = Array3::zeros((m, out_len, c));
    for mi in 0..m {
        for t in 0..out_len {
            for ci in 0..c {
                let mut best = input[[mi, t * p, ci]];
                let mut best_d = 0;
                for d in 1..p {
                    let v = input[[mi, t * p + d, ci]];
                    if v > best {
                        best = v;
                        best_d = d;
                    }
                }
                out[[mi, t, ci]] = best;
                arg[[mi, t, ci]] = best_d;
            }
        }
    }
    (out, arg)
}

fn maxpool_backward(
    dout: &Array3<f64>,
    arg: &Array3<usize>,
    input_len: usize,
    p: usize,
) -> Array3<f64> {
    let (m, out_len, c) = dout.dim();
    let mut dinput = Array3::zeros((m, input_len, c));
    for mi in 0..m {
        for t in 0..out_len {
            for ci in 0..c {
                dinput[[mi, t * p + arg[[mi, t, ci]], ci]] += dout[[mi, t, ci]];
            }
        }
    }
    dinput
}

/// Intermediate activations of the char pipeline over M words.
struct CnnTape {
    grids: Array2<usize>,
    emb: Array3<f64>,
    pre1: Array3<f64>,
    pool1: Array3<f64>,
    arg1: Array3<usize>,
    pre2: Array3<f64>,
    arg2: Array3<usize>,
    flat: Array2<f64>,
}

fn check_word_len(config: &ModelConfig) -> Result<()> {
    if config.max_word_len < config.pooling_depth() {
        return Err(Error::WordLengthBelowPoolingDepth);
    }
    Ok(())
}

/// Run the char pipeline on M words. Grids narrower than the
/// configured padded word length are PAD-extended; wider grids error.
fn cnn_forward(params: &ModelParams, grids_in: ArrayView2<usize>, config: &ModelConfig) -> Result<CnnTape> {
    check_word_len(config)?;
    let lp = config.padded_word_len();
    let (m, l_in) = grids_in.dim();
    if l_in > lp {
        return Err(Error::DimensionMismatch(format!(
            "batch word length {l_in} exceeds configured {lp}"
        )));
    }
    let mut grids = Array2::from_elem((m, lp), PAD_INDEX);
    grids.slice_mut(s![.., 0..l_in]).assign(&grids_in);

    let e = config.char_emb_dim;
    let vocab_rows = params.char_embedding.nrows();
    let mut emb = Array3::zeros((m, lp, e));
    for mi in 0..m {
        for t in 0..lp {
            let idx = grids[[mi, t]];
            if idx >= vocab_rows {
                return Err(Error::DimensionMismatch(format!(
                    "char index {idx} outside embedding table of {vocab_rows} rows"
                )));
            }
            emb.slice_mut(s![mi, t, ..]).assign(&params.char_embedding.row(idx));
        }
    }

    let p = config.pool_size;
    let pre1 = conv_same(&emb, &params.conv1_kernel, &params.conv1_bias);
    let rel1 = pre1.mapv(|x| x.max(0.0));
    let (pool1, arg1) = maxpool(&rel1, p);
    let pre2 = conv_same(&pool1, &params.conv2_kernel, &params.conv2_bias);
    let rel2 = pre2.mapv(|x| x.max(0.0));
    let (pool2, arg2) = maxpool(&rel2, p);
    let fd = config.feature_dim();
    let flat = pool2.into_shape_with_order((m, fd)).expect("shape");
    Ok(CnnTape {
        grids,
        emb,
        pre1,
        pool1,
        arg1,
        pre2,
        arg2,
        flat,
    })
}

/// Backward of the char pipeline; accumulates into `grads`.
fn cnn_backward(params: &ModelParams, config: &ModelConfig, tape: &CnnTape, dflat: &Array2<f64>, grads: &mut ModelParams) {
    let p = config.pool_size;
    let (m, lp) = tape.grids.dim();
    let l2 = lp / p;
    let f2 = config.conv2_filters;
    let dpool2 = dflat
        .to_owned()
        .into_shape_with_order((m, l2 / p, f2))
        .expect("shape");
    let drel2 = maxpool_backward(&dpool2, &tape.arg2, l2, p);
    let mut dpre2 = drel2;
    dpre2.zip_mut_with(&tape.pre2, |d, &pre| {
        if pre <= 0.0 {
            *d = 0.0;
        }
    });
    let dpool1 = conv_same_backward(
        &tape.pool1,
        &params.conv2_kernel,
        &dpre2,
        &mut grads.conv2_kernel,
        &mut grads.conv2_bias,
    );
    let drel1 = maxpool_backward(&dpool1, &tape.arg1, lp, p);
    let mut dpre1 = drel1;
    dpre1.zip_mut_with(&tape.pre1, |d, &pre| {
        if pre <= 0.0 {
            *d = 0.0;
        }
    });
    let demb = conv_same_backward(
        &tape.emb,
        &params.conv1_kernel,
        &dpre1,
        &mut grads.conv1_kernel,
        &mut grads.conv1_bias,
    );
    for mi in 0..m {
        for t in 0..lp {
            let idx = tape.grids[[mi, t]];
            let mut row = grads.char_embedding.row_mut(idx);
            row += &demb.slice(s![mi, t, ..]);
        }
    }
}

/// Per-word character features: the char pipeline's flattened output,
/// with dropout applied in train mode.
pub fn char_word_features(
    params: &ModelParams,
    char_indices: &Array2<usize>,
    config: &ModelConfig,
    mode: Mode,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Array2<f64>> {
    let tape = cnn_forward(params, char_indices.view(), config)?;
    let mut flat = tape.flat;
    if mode == Mode::Train && config.dropout_keep < 1.0 {
        let rng = rng.ok_or_else(|| {
            Error::DimensionMismatch("train-mode dropout requires an RNG".to_string())
        })?;
        let (m, fd) = flat.dim();
        let mask =
            Array2::from_shape_vec((m, fd), bernoulli(rng, config.dropout_keep, m * fd)).expect("shape");
        flat *= &mask;
    }
    Ok(flat)
}

/// Everything the backward pass needs from one forward run.
struct Tape {
    cnn: CnnTape,
    z: Array3<f64>,
    gates_i: Vec<Array2<f64>>,
    gates_f: Vec<Array2<f64>>,
    gates_g: Vec<Array2<f64>>,
    gates_o: Vec<Array2<f64>>,
    tanh_c_new: Vec<Array2<f64>>,
    h_states: Vec<Array2<f64>>,
    c_states: Vec<Array2<f64>>,
    lens: Array1<f64>,
    readout_dropped: Array2<f64>,
    fc1_pre: Array2<f64>,
    fc1_dropped: Array2<f64>,
}

fn mask_column(batch: &EncodedBatch, t: usize) -> Array2<f64> {
    batch.word_mask.column(t).to_owned().insert_axis(Axis(1))
}

fn run_forward(
    params: &ModelParams,
    batch: &EncodedBatch,
    config: &ModelConfig,
    masks: Option<&DropoutMasks>,
) -> Result<(Array2<f64>, Tape)> {
    if batch.embedding_dim() != config.embedding_dim {
        return Err(Error::DimensionMismatch(format!(
            "batch embedding dim {} != configured {}",
            batch.embedding_dim(),
            config.embedding_dim
        )));
    }
    let n = batch.batch_size();
    let w = batch.max_words();
    let l = batch.max_word_len();
    let h = config.lstm_units;
    let fd = config.feature_dim();
    let d_in = config.lstm_input_dim();

    let grids = batch
        .char_indices
        .to_owned()
        .into_shape_with_order((n * w, l))
        .expect("shape");
    let cnn = cnn_forward(params, grids.view(), config)?;
    let mut flat = cnn.flat.clone();
    if let Some(masks) = masks {
        flat *= &masks.cnn;
    }
    let mut x_w = batch.word_vectors.clone();
    if let Some(masks) = masks {
        x_w *= &masks.words;
    }

    // z[i, t] = [cnn features | word vector]
    let mut z = Array3::zeros((n, w, d_in));
    let flat3 = flat.into_shape_with_order((n, w, fd)).expect("shape");
    z.slice_mut(s![.., .., 0..fd]).assign(&flat3);
    z.slice_mut(s![.., .., fd..d_in]).assign(&x_w);

    let mut h_states = Vec::with_capacity(w + 1);
    let mut c_states = Vec::with_capacity(w + 1);
    h_states.push(Array2::zeros((n, h)));
    c_states.push(Array2::zeros((n, h)));
    let mut gates_i = Vec::with_capacity(w);
    let mut gates_f = Vec::with_capacity(w);
    let mut gates_g = Vec::with_capacity(w);
    let mut gates_o = Vec::with_capacity(w);
    let mut tanh_c_new = Vec::with_capacity(w);

    for t in 0..w {
        let x_t = z.slice(s![.., t, ..]).to_owned();
        let h_prev = &h_states[t];
        let c_prev = &c_states[t];
        let mut pre = x_t.dot(&params.lstm_w_x.t()) + h_prev.dot(&params.lstm_w_h.t());
        pre += &params.lstm_bias;
        let gi = pre.slice(s![.., 0..h]).mapv(sigmoid);
        let gf = pre.slice(s![.., h..2 * h]).mapv(sigmoid);
        let gg = pre.slice(s![.., 2 * h..3 * h]).mapv(f64::tanh);
        let go = pre.slice(s![.., 3 * h..4 * h]).mapv(sigmoid);
        let c_new = &gf * c_prev + &gi * &gg;
        let tanh_cn = c_new.mapv(f64::tanh);
        let h_new = &go * &tanh_cn;
        // freeze state beyond each example's sequence length
        let m = mask_column(batch, t);
        let keep_prev = m.mapv(|v| 1.0 - v);
        let c_t = &c_new * &m + c_prev * &keep_prev;
        let h_t = &h_new * &m + h_prev * &keep_prev;
        gates_i.push(gi);
        gates_f.push(gf);
        gates_g.push(gg);
        gates_o.push(go);
        tanh_c_new.push(tanh_cn);
        h_states.push(h_t);
        c_states.push(c_t);
    }

    let lens = Array1::from_iter((0..n).map(|i| batch.seq_len(i).max(1) as f64));
    let readout = match config.readout {
        Readout::Last => h_states[w].clone(),
        Readout::Mean => {
            let mut acc = Array2::zeros((n, h));
            for t in 0..w {
                acc += &(&h_states[t + 1] * &mask_column(batch, t));
            }
            acc / &lens.view().to_owned().insert_axis(Axis(1))
        }
    };
    let mut readout_dropped = readout;
    if let Some(masks) = masks {
        readout_dropped *= &masks.readout;
    }

    let mut fc1_pre = readout_dropped.dot(&params.fc1_weight.t());
    fc1_pre += &params.fc1_bias;
    let fc1_act = fc1_pre.mapv(|x| x.max(0.0));
    let mut fc1_dropped = fc1_act;
    if let Some(masks) = masks {
        fc1_dropped *= &masks.fc1;
    }
    let mut logits = fc1_dropped.dot(&params.fc2_weight.t());
    logits += &params.fc2_bias;

    Ok((
        logits,
        Tape {
            cnn,
            z,
            gates_i,
            gates_f,
            gates_g,
            gates_o,
            tanh_c_new,
            h_states,
            c_states,
            lens,
            readout_dropped,
            fc1_pre,
            fc1_dropped,
        },
    ))
}

/// Class logits for a batch. Train mode applies dropout and needs an
/// RNG unless the keep rate is 1; eval mode is deterministic.
pub fn forward(
    params: &ModelParams,
    batch: &EncodedBatch,
    config: &ModelConfig,
    mode: Mode,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Array2<f64>> {
    let masks = if mode == Mode::Train && config.dropout_keep < 1.0 {
        let rng = rng.ok_or_else(|| {
            Error::DimensionMismatch("train-mode dropout requires an RNG".to_string())
        })?;
        Some(sample_masks(config, batch.batch_size(), batch.max_words(), rng))
    } else {
        None
    };
    run_forward(params, batch, config, masks.as_ref()).map(|(logits, _)| logits)
}

/// Row-wise stable softmax.
pub fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum: f64 = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}

/// Mean softmax cross-entropy over the batch.
pub fn loss(logits: &Array2<f64>, labels: &[usize]) -> Result<f64> {
    let (n, c) = logits.dim();
    if labels.len() != n {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} logit rows",
            labels.len(),
            n
        )));
    }
    let mut total = 0.0;
    for (row, &y) in logits.rows().into_iter().zip(labels) {
        if y >= c {
            return Err(Error::DimensionMismatch(format!(
                "label {y} outside {c} classes"
            )));
        }
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let logsum = row.iter().map(|&x| (x - max).exp()).sum::<f64>().ln() + max;
        total += logsum - row[y];
    }
    Ok(total / n as f64)
}

/// Loss and parameter gradients for one batch (labels required on the
/// batch). `masks` carries the dropout draws; `None` means no dropout.
pub(crate) fn loss_and_grads(
    params: &ModelParams,
    batch: &EncodedBatch,
    config: &ModelConfig,
    masks: Option<&DropoutMasks>,
) -> Result<(f64, ModelParams)> {
    let labels = batch
        .labels
        .as_ref()
        .ok_or_else(|| Error::SizeMismatch("training batch has no labels".to_string()))?;
    let (logits, tape) = run_forward(params, batch, config, masks)?;
    let loss_value = loss(&logits, labels)?;

    let n = batch.batch_size();
    let w = batch.max_words();
    let h = config.lstm_units;
    let fd = config.feature_dim();
    let d_in = config.lstm_input_dim();
    let mut grads = params.zeros_like();

    // d loss / d logits = (softmax − onehot) / n
    let mut dlogits = softmax(&logits);
    for (i, &y) in labels.iter().enumerate() {
        dlogits[[i, y]] -= 1.0;
    }
    dlogits /= n as f64;

    grads.fc2_weight += &dlogits.t().dot(&tape.fc1_dropped);
    grads.fc2_bias += &dlogits.sum_axis(Axis(0));
    let mut dfc1 = dlogits.dot(&params.fc2_weight);
    if let Some(masks) = masks {
        dfc1 *= &masks.fc1;
    }
    dfc1.zip_mut_with(&tape.fc1_pre, |d, &pre| {
        if pre <= 0.0 {
            *d = 0.0;
        }
    });
    grads.fc1_weight += &dfc1.t().dot(&tape.readout_dropped);
    grads.fc1_bias += &dfc1.sum_axis(Axis(0));
    let mut dreadout = dfc1.dot(&params.fc1_weight);
    if let Some(masks) = masks {
        dreadout *= &masks.readout;
    }

    let mut dz = Array3::zeros((n, w, d_in));
    let mut dh = match config.readout {
        Readout::Last => dreadout.clone(),
        Readout::Mean => Array2::zeros((n, h)),
    };
    let mut dc = Array2::zeros((n, h));
    let inv_lens = tape.lens.mapv(|v| 1.0 / v).insert_axis(Axis(1));
    for t in (0..w).rev() {
        if config.readout == Readout::Mean {
            dh += &(&dreadout * &(mask_column(batch, t) * &inv_lens));
        }
        let m = mask_column(batch, t);
        let keep_prev = m.mapv(|v| 1.0 - v);
        let dh_new = &dh * &m;
        let dh_carry = &dh * &keep_prev;
        let dc_in = &dc * &m;
        let dc_carry = &dc * &keep_prev;

        let gi = &tape.gates_i[t];
        let gf = &tape.gates_f[t];
        let gg = &tape.gates_g[t];
        let go = &tape.gates_o[t];
        let tanh_cn = &tape.tanh_c_new[t];
        let c_prev = &tape.c_states[t];
        let h_prev = &tape.h_states[t];

        let d_o = &dh_new * tanh_cn;
        let dc_new = dc_in + &dh_new * go * &tanh_cn.mapv(|v| 1.0 - v * v);
        let d_i = &dc_new * gg;
        let d_f = &dc_new * c_prev;
        let d_g = &dc_new * gi;

        let dg_i = d_i * gi * &gi.mapv(|v| 1.0 - v);
        let dg_f = d_f * gf * &gf.mapv(|v| 1.0 - v);
        let dg_g = d_g * &gg.mapv(|v| 1.0 - v * v);
        let dg_o = d_o * go * &go.mapv(|v| 1.0 - v);
        let dgates = concatenate(
            Axis(1),
            &[dg_i.view(), dg_f.view(), dg_g.view(), dg_o.view()],
        )
        .expect("gate widths agree");

        let x_t = tape.z.slice(s![.., t, ..]).to_owned();
        grads.lstm_w_x += &dgates.t().dot(&x_t);
        grads.lstm_w_h += &dgates.t().dot(h_prev);
        grads.lstm_bias += &dgates.sum_axis(Axis(0));
        dz.slice_mut(s![.., t, ..]).assign(&dgates.dot(&params.lstm_w_x));
        dh = dh_carry + dgates.dot(&params.lstm_w_h);
        dc = dc_carry + &dc_new * gf;
    }

    // only the CNN half of z backpropagates further (word vectors are
    // frozen pretrained inputs)
    let mut dflat = collapse3(dz.slice(s![.., .., 0..fd]));
    if let Some(masks) = masks {
        dflat *= &masks.cnn;
    }
    cnn_backward(params, config, &tape.cnn, &dflat, &mut grads);

    Ok((loss_value, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_char_vocab, make_batch, EmbeddingTable};
    use crate::lexnorm::Token;
    use crate::nn::init_model;
    use rand::SeedableRng;

    fn toks(words: &[&str]) -> Vec<Token> {
        words.iter().map(|w| Token::new(*w).unwrap()).collect()
    }

    fn toy_config() -> ModelConfig {
        ModelConfig {
            char_vocab_size: 8,
            char_emb_dim: 3,
            conv1_filters: 2,
            conv2_filters: 3,
            kernel_size: 2,
            pool_size: 2,
            lstm_units: 4,
            fc1_units: 3,
            n_classes: 2,
            embedding_dim: 3,
            max_word_len: 4,
            dropout_keep: 1.0,
            learning_rate: 1e-3,
            batch_size: 4,
            max_epochs: 5,
            seed: 7,
            readout: Readout::Last,
        }
    }

    fn toy_batch(config: &ModelConfig) -> EncodedBatch {
        let corpus = vec![toks(&["ab", "ba", "abba"]), toks(&["bb"])];
        let vocab = build_char_vocab(&corpus, config.char_vocab_size - 2).unwrap();
        let mut table = EmbeddingTable::empty(config.embedding_dim);
        table.insert("ab", vec![0.4, -0.3, 0.2]).unwrap();
        table.insert("ba", vec![-0.1, 0.5, 0.0]).unwrap();
        make_batch(
            &corpus,
            Some(&[0, 1]),
            &vocab,
            &table,
            config.max_word_len,
        )
        .unwrap()
    }

    #[test]
    fn logits_have_batch_by_class_shape() {
        let config = toy_config();
        let params = init_model(&config).unwrap();
        let corpus = vec![toks(&["ab"]), toks(&["ba", "ab"]), toks(&["abba"])];
        let vocab = build_char_vocab(&corpus, 6).unwrap();
        let table = EmbeddingTable::empty(3);
        let batch = make_batch(&corpus, None, &vocab, &table, 4).unwrap();
        let logits = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
        assert_eq!(logits.dim(), (3, 2));
    }

    #[test]
    fn eval_mode_is_deterministic_and_duplicates_match() {
        let config = toy_config();
        let params = init_model(&config).unwrap();
        let corpus = vec![toks(&["ab", "ba"]), toks(&["ab", "ba"])];
        let vocab = build_char_vocab(&corpus, 6).unwrap();
        let table = EmbeddingTable::empty(3);
        let batch = make_batch(&corpus, None, &vocab, &table, 4).unwrap();
        let a = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
        let b = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
        assert_eq!(a, b);
        assert!((a.row(0).to_owned() - a.row(1).to_owned())
            .iter()
            .all(|&d| d.abs() < 1e-12));
    }

    // Hand-built params with one channel everywhere: word "ab" with
    // embeddings a→1, b→2, kernels K1=[1, 0.5], b1=0.1, K2=[1, −1]:
    // pre1 = [1+1+.1, 2+0+.1, .1, .1] → pool [2.1, .1]
    // pre2 = [2.1−0.1, 0.1−0] → relu [2.0, 0.1] → pool [2.0]
    #[test]
    fn char_pipeline_matches_hand_arithmetic() {
        let config = ModelConfig {
            char_vocab_size: 4,
            char_emb_dim: 1,
            conv1_filters: 1,
            conv2_filters: 1,
            kernel_size: 2,
            pool_size: 2,
            lstm_units: 2,
            fc1_units: 2,
            n_classes: 2,
            embedding_dim: 1,
            max_word_len: 4,
            dropout_keep: 1.0,
            learning_rate: 1e-3,
            batch_size: 1,
            max_epochs: 1,
            seed: 0,
            readout: Readout::Last,
        };
        let mut params = init_model(&config).unwrap();
        params.char_embedding = ndarray::array![[0.0], [0.0], [1.0], [2.0]];
        params.conv1_kernel = ndarray::array![[[1.0]], [[0.5]]];
        params.conv1_bias = ndarray::array![0.1];
        params.conv2_kernel = ndarray::array![[[1.0]], [[-1.0]]];
        params.conv2_bias = ndarray::array![0.0];
        // chars 'a'→2, 'b'→3, then PAD
        let grid = ndarray::array![[2usize, 3, 0, 0]];
        let feats = char_word_features(&params, &grid, &config, Mode::Eval, None).unwrap();
        assert!((feats[[0, 0]] - 2.0).abs() < 1e-12, "{feats:?}");
    }

    #[test]
    fn word_length_below_pooling_depth_errors() {
        let mut config = toy_config();
        config.max_word_len = 3;
        let params = init_model(&toy_config()).unwrap();
        let grid = ndarray::array![[2usize, 3, 0]];
        let err = char_word_features(&params, &grid, &config, Mode::Eval, None).unwrap_err();
        assert!(matches!(err, Error::WordLengthBelowPoolingDepth));
    }

    #[test]
    fn all_pad_word_row_is_constant_function_of_parameters() {
        let config = toy_config();
        let params = init_model(&config).unwrap();
        let grid = ndarray::array![[0usize, 0, 0, 0], [0, 0, 0, 0]];
        let feats = char_word_features(&params, &grid, &config, Mode::Eval, None).unwrap();
        assert_eq!(feats.row(0), feats.row(1));
    }

    // Independent naive implementation of the whole forward pass with
    // plain per-element loops; no shared code with the vectorized path.
    #[allow(clippy::needless_range_loop)]
    fn naive_logits(params: &ModelParams, batch: &EncodedBatch, config: &ModelConfig) -> Array2<f64> {
        let n = batch.batch_size();
        let lp = config.padded_word_len();
        let (e, f1, f2) = (config.char_emb_dim, config.conv1_filters, config.conv2_filters);
        let (k, p) = (config.kernel_size, config.pool_size);
        let h = config.lstm_units;
        let fd = config.feature_dim();
        let dim = config.embedding_dim;
        let pad_left = (k - 1) / 2;
        let mut logits = Array2::zeros((n, config.n_classes));

        for i in 0..n {
            let s_len = batch.seq_len(i);
            let mut hh = vec![0.0; h];
            let mut cc = vec![0.0; h];
            let mut readout_acc = vec![0.0; h];
            for t in 0..s_len {
                // char pipeline for word t
                let mut emb = vec![vec![0.0; e]; lp];
                for pos in 0..lp {
                    let idx = if pos < batch.max_word_len() {
                        batch.char_indices[[i, t, pos]]
                    } else {
                        0
                    };
                    for ec in 0..e {
                        emb[pos][ec] = params.char_embedding[[idx, ec]];
                    }
                }
                let mut rel1 = vec![vec![0.0; f1]; lp];
                for pos in 0..lp {
                    for fc in 0..f1 {
                        let mut acc = params.conv1_bias[fc];
                        for d in 0..k {
                            let sp = pos as isize - pad_left as isize + d as isize;
                            if sp >= 0 && (sp as usize) < lp {
                                for ec in 0..e {
                                    acc += emb[sp as usize][ec] * params.conv1_kernel[[d, ec, fc]];
                                }
                            }
                        }
                        rel1[pos][fc] = acc.max(0.0);
                    }
                }
                let l2 = lp / p;
                let mut pool1 = vec![vec![0.0; f1]; l2];
                for pos in 0..l2 {
                    for fc in 0..f1 {
                        pool1[pos][fc] =
                            (0..p).map(|d| rel1[pos * p + d][fc]).fold(f64::MIN, f64::max);
                    }
                }
                let mut rel2 = vec![vec![0.0; f2]; l2];
                for pos in 0..l2 {
                    for fc in 0..f2 {
                        let mut acc = params.conv2_bias[fc];
                        for d in 0..k {
                            let sp = pos as isize - pad_left as isize + d as isize;
                            if sp >= 0 && (sp as usize) < l2 {
                                for ec in 0..f1 {
                                    acc += pool1[sp as usize][ec] * params.conv2_kernel[[d, ec, fc]];
                                }
                            }
                        }
                        rel2[pos][fc] = acc.max(0.0);
                    }
                }
                let l4 = l2 / p;
                let mut feat = vec![0.0; fd];
                for pos in 0..l4 {
                    for fc in 0..f2 {
                        feat[pos * f2 + fc] =
                            (0..p).map(|d| rel2[pos * p + d][fc]).fold(f64::MIN, f64::max);
                    }
                }
                // concat with word vector, then one LSTM step
                let mut x = feat;
                for kdim in 0..dim {
                    x.push(batch.word_vectors[[i, t, kdim]]);
                }
                let mut gates = vec![0.0; 4 * h];
                for g in 0..4 * h {
                    let mut acc = params.lstm_bias[g];
                    for (j, &xv) in x.iter().enumerate() {
                        acc += params.lstm_w_x[[g, j]] * xv;
                    }
                    for j in 0..h {
                        acc += params.lstm_w_h[[g, j]] * hh[j];
                    }
                    gates[g] = acc;
                }
                for j in 0..h {
                    let gi = sigmoid(gates[j]);
                    let gf = sigmoid(gates[h + j]);
                    let gg = gates[2 * h + j].tanh();
                    let go = sigmoid(gates[3 * h + j]);
                    cc[j] = gf * cc[j] + gi * gg;
                    hh[j] = go * cc[j].tanh();
                }
                for j in 0..h {
                    readout_acc[j] += hh[j];
                }
            }
            let read: Vec<f64> = match config.readout {
                Readout::Last => hh.clone(),
                Readout::Mean => readout_acc.iter().map(|v| v / s_len as f64).collect(),
            };
            let mut a1 = vec![0.0; config.fc1_units];
            for (j, a) in a1.iter_mut().enumerate() {
                let mut acc = params.fc1_bias[j];
                for (m, &r) in read.iter().enumerate() {
                    acc += params.fc1_weight[[j, m]] * r;
                }
                *a = acc.max(0.0);
            }
            for c in 0..config.n_classes {
                let mut acc = params.fc2_bias[c];
                for (j, &a) in a1.iter().enumerate() {
                    acc += params.fc2_weight[[c, j]] * a;
                }
                logits[[i, c]] = acc;
            }
        }
        logits
    }

    #[test]
    fn forward_matches_naive_oracle() {
        for readout in [Readout::Last, Readout::Mean] {
            let mut config = toy_config();
            config.readout = readout;
            let params = init_model(&config).unwrap();
            let batch = toy_batch(&config);
            let fast = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
            let slow = naive_logits(&params, &batch, &config);
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b} ({readout:?})");
            }
        }
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let logits = ndarray::array![[1.0, -2.0], [300.0, 299.0], [-1000.0, -1000.0]];
        let probs = softmax(&logits);
        for row in probs.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-6);
            assert!(row.iter().all(|&p| p.is_finite()));
        }
    }

    #[test]
    fn loss_uniform_logits_is_ln2() {
        let logits = ndarray::array![[0.0, 0.0]];
        assert!((loss(&logits, &[1]).unwrap() - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn loss_saturated_correct_prediction() {
        let logits = ndarray::array![[10.0, -10.0]];
        let expected = (1.0 + (-20.0f64).exp()).ln();
        assert!((loss(&logits, &[0]).unwrap() - expected).abs() < 1e-15);
        assert!(loss(&logits, &[0]).unwrap() > 0.0);
    }

    #[test]
    fn loss_is_mean_of_per_example_losses() {
        let l1 = loss(&ndarray::array![[0.3, -0.4]], &[0]).unwrap();
        let l2 = loss(&ndarray::array![[-1.0, 2.0]], &[1]).unwrap();
        let both = loss(&ndarray::array![[0.3, -0.4], [-1.0, 2.0]], &[0, 1]).unwrap();
        assert!((both - (l1 + l2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn padding_invariance_in_eval_mode() {
        let config = toy_config();
        let params = init_model(&config).unwrap();
        let batch = toy_batch(&config);
        let logits = forward(&params, &batch, &config, Mode::Eval, None).unwrap();

        // append two all-PAD word positions beyond every mask
        let n = batch.batch_size();
        let w = batch.max_words();
        let l = batch.max_word_len();
        let dim = batch.embedding_dim();
        let mut char_indices = Array3::zeros((n, w + 2, l));
        char_indices.slice_mut(s![.., 0..w, ..]).assign(&batch.char_indices);
        let mut word_vectors = Array3::zeros((n, w + 2, dim));
        word_vectors.slice_mut(s![.., 0..w, ..]).assign(&batch.word_vectors);
        let mut word_mask = Array2::zeros((n, w + 2));
        word_mask.slice_mut(s![.., 0..w]).assign(&batch.word_mask);
        let padded = EncodedBatch {
            char_indices,
            word_vectors,
            word_mask,
            labels: batch.labels.clone(),
            warnings: vec![],
        };
        let padded_logits = forward(&params, &padded, &config, Mode::Eval, None).unwrap();
        for (a, b) in logits.iter().zip(padded_logits.iter()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn train_mode_with_keep_one_equals_eval() {
        let config = toy_config(); // dropout_keep = 1.0
        let params = init_model(&config).unwrap();
        let batch = toy_batch(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let train = forward(&params, &batch, &config, Mode::Train, Some(&mut rng)).unwrap();
        let eval = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
        assert_eq!(train, eval);
    }

    #[test]
    fn train_mode_with_dropout_differs_and_needs_rng() {
        let mut config = toy_config();
        config.dropout_keep = 0.5;
        let params = init_model(&config).unwrap();
        let batch = toy_batch(&config);
        assert!(forward(&params, &batch, &config, Mode::Train, None).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let train = forward(&params, &batch, &config, Mode::Train, Some(&mut rng)).unwrap();
        let eval = forward(&params, &batch, &config, Mode::Eval, None).unwrap();
        assert_ne!(train, eval);
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        for readout in [Readout::Last, Readout::Mean] {
            let mut config = toy_config();
            config.readout = readout;
            let params = init_model(&config).unwrap();
            let batch = toy_batch(&config);
            let (_, grads) = loss_and_grads(&params, &batch, &config, None).unwrap();

            let flat_grads = grads.flatten();
            let base = params.flatten();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut offset = 0;
            for (name, view) in params.tensor_views() {
                let len = view.len();
                let samples: Vec<usize> = if len <= 12 {
                    (0..len).collect()
                } else {
                    (0..12).map(|_| rng.gen_range(0..len)).collect()
                };
                for s in samples {
                    let idx = offset + s;
                    let h = 1e-5;
                    let mut plus = base.clone();
                    plus[idx] += h;
                    let mut minus = base.clone();
                    minus[idx] -= h;
                    let mut p_plus = params.zeros_like();
                    p_plus.assign_from_flat(&plus).unwrap();
                    let mut p_minus = params.zeros_like();
                    p_minus.assign_from_flat(&minus).unwrap();
                    let labels = batch.labels.as_ref().unwrap();
                    let l_plus = loss(
                        &forward(&p_plus, &batch, &config, Mode::Eval, None).unwrap(),
                        labels,
                    )
                    .unwrap();
                    let l_minus = loss(
                        &forward(&p_minus, &batch, &config, Mode::Eval, None).unwrap(),
                        labels,
                    )
                    .unwrap();
                    let fd = (l_plus - l_minus) / (2.0 * h);
                    let analytic = flat_grads[idx];
                    let denom = (analytic.abs() + fd.abs()).max(1e-6);
                    let rel = (analytic - fd).abs() / denom;
                    assert!(
                        rel < 1e-4,
                        "{name}[{s}] ({readout:?}): analytic {analytic} vs fd {fd} (rel {rel})"
                    );
                }
                offset += len;
            }
        }
    }
}
