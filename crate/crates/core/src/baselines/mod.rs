//! SVM baselines: sparse word/char n-gram features with a linear model
//! trained by stochastic gradient descent, and the same trainer over
//! precomputed sentence vectors.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lexnorm::tokenize_tweet;
use crate::Result;

/// Row-major sparse matrix; each row holds sorted (column, value) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub n_cols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Hyperparameters of the SGD trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdHyperparams {
    pub epochs: usize,
    pub alpha: f64,
    pub l1_ratio: f64,
    pub seed: u64,
}

impl Default for SgdHyperparams {
    fn default() -> Self {
        SgdHyperparams {
            epochs: 15,
            alpha: 1e-6,
            l1_ratio: 0.15,
            seed: 5,
        }
    }
}

impl SgdHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::DimensionMismatch("epochs must be at least 1".to_string()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::Numeric(format!("alpha {} must be positive", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.l1_ratio) {
            return Err(Error::Numeric(format!(
                "l1_ratio {} outside [0, 1]",
                self.l1_ratio
            )));
        }
        Ok(())
    }
}

/// Linear decision function over a fixed feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: SgdHyperparams,
}

impl LinearModel {
    pub fn decision(&self, row: &[(usize, f64)]) -> f64 {
        row.iter().map(|&(j, v)| self.weights[j] * v).sum::<f64>() + self.bias
    }

    /// Class 1 for a positive score, class 0 otherwise.
    pub fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        usize::from(self.decision(row) > 0.0)
    }

    pub fn predict(&self, x: &SparseMatrix) -> Vec<usize> {
        x.rows.iter().map(|row| self.predict_row(row)).collect()
    }
}

/// Word 1–3-gram TF-IDF plus char 1–5-gram count features with disjoint
/// column spaces: [word-tfidf | char-count].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramFeaturizer {
    word_vocab: BTreeMap<String, usize>,
    char_vocab: BTreeMap<String, usize>,
    idf: Vec<f64>,
    pub word_ngram_range: (usize, usize),
    pub char_ngram_range: (usize, usize),
}

fn word_ngrams(text: &str, range: (usize, usize)) -> Vec<String> {
    let tokens: Vec<String> = tokenize_tweet(text)
        .into_iter()
        .map(|t| t.as_str().to_lowercase())
        .collect();
    let mut grams = Vec::new();
    for n in range.0..=range.1 {
        if n == 0 || tokens.len() < n {
            continue;
        }
        for window in tokens.windows(n) {
            grams.push(window.join(" "));
        }
    }
    grams
}

fn char_ngrams(text: &str, range: (usize, usize)) -> Vec<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut grams = Vec::new();
    for n in range.0..=range.1 {
        if n == 0 || chars.len() < n {
            continue;
        }
        for window in chars.windows(n) {
            grams.push(window.iter().collect());
        }
    }
    grams
}

/// Fit vocabularies and smoothed IDF weights on a corpus:
/// idf(t) = ln((1+N)/(1+df)) + 1.
pub fn fit_featurizer(texts: &[String]) -> Result<NgramFeaturizer> {
    if texts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let word_range = (1, 3);
    let char_range = (1, 5);
    let mut word_df: BTreeMap<String, usize> = BTreeMap::new();
    let mut char_set: BTreeMap<String, ()> = BTreeMap::new();
    for text in texts {
        let mut seen = std::collections::HashSet::new();
        for gram in word_ngrams(text, word_range) {
            if seen.insert(gram.clone()) {
                *word_df.entry(gram).or_insert(0) += 1;
            }
        }
        for gram in char_ngrams(text, char_range) {
            char_set.entry(gram).or_insert(());
        }
    }
    let n = texts.len() as f64;
    let mut word_vocab = BTreeMap::new();
    let mut idf = Vec::with_capacity(word_df.len());
    for (col, (gram, df)) in word_df.into_iter().enumerate() {
        word_vocab.insert(gram, col);
        idf.push(((1.0 + n) / (1.0 + df as f64)).ln() + 1.0);
    }
    let word_cols = word_vocab.len();
    let char_vocab = char_set
        .into_keys()
        .enumerate()
        .map(|(i, gram)| (gram, word_cols + i))
        .collect();
    Ok(NgramFeaturizer {
        word_vocab,
        char_vocab,
        idf,
        word_ngram_range: word_range,
        char_ngram_range: char_range,
    })
}

impl NgramFeaturizer {
    pub fn n_cols(&self) -> usize {
        self.word_vocab.len() + self.char_vocab.len()
    }

    pub fn word_cols(&self) -> usize {
        self.word_vocab.len()
    }
}

/// Transform texts into [word-tfidf | char-count] rows. The word block
/// of each row is L2-normalized; unseen n-grams contribute nothing.
pub fn featurize(f: &NgramFeaturizer, texts: &[String]) -> SparseMatrix {
    let mut rows = Vec::with_capacity(texts.len());
    for text in texts {
        let mut word_counts: HashMap<usize, f64> = HashMap::new();
        for gram in word_ngrams(text, f.word_ngram_range) {
            if let Some(&col) = f.word_vocab.get(&gram) {
                *word_counts.entry(col).or_insert(0.0) += 1.0;
            }
        }
        let mut row: Vec<(usize, f64)> = word_counts
            .into_iter()
            .map(|(col, count)| (col, count * f.idf[col]))
            .collect();
        let norm = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut row {
                *v /= norm;
            }
        }
        let mut char_counts: HashMap<usize, f64> = HashMap::new();
        for gram in char_ngrams(text, f.char_ngram_range) {
            if let Some(&col) = f.char_vocab.get(&gram) {
                *char_counts.entry(col).or_insert(0.0) += 1.0;
            }
        }
        row.extend(char_counts);
        row.sort_unstable_by_key(|&(col, _)| col);
        rows.push(row);
    }
    SparseMatrix {
        n_cols: f.n_cols(),
        rows,
    }
}

/// Regularized hinge objective: mean hinge loss plus
/// alpha · (l1_ratio·‖w‖₁ + (1−l1_ratio)/2·‖w‖₂²).
pub fn objective(x: &SparseMatrix, y: &[usize], model: &LinearModel) -> f64 {
    let hinge: f64 = x
        .rows
        .iter()
        .zip(y)
        .map(|(row, &label)| {
            let target = if label == 1 { 1.0 } else { -1.0 };
            (1.0 - target * model.decision(row)).max(0.0)
        })
        .sum::<f64>()
        / x.n_rows() as f64;
    let h = &model.hyperparams;
    let l1: f64 = model.weights.iter().map(|w| w.abs()).sum();
    let l2: f64 = model.weights.iter().map(|w| w * w).sum();
    hinge + h.alpha * (h.l1_ratio * l1 + (1.0 - h.l1_ratio) * 0.5 * l2)
}

/// Shared SGD core over sparse rows: hinge subgradient steps on the
/// optimal schedule η_t = 1/(alpha·(t0+t)), per-step L2 decay through a
/// weight-scale factor, and lazily applied cumulative L1 penalty.
fn sgd_train(
    rows: &[Vec<(usize, f64)>],
    n_cols: usize,
    y: &[usize],
    h: &SgdHyperparams,
) -> Result<LinearModel> {
    h.validate()?;
    if rows.len() != y.len() {
        return Err(Error::SizeMismatch(format!(
            "{} rows for {} labels",
            rows.len(),
            y.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::DimensionMismatch(format!(
            "label {bad} outside binary {{0, 1}}"
        )));
    }
    let ones = y.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::DegenerateTrainingSet);
    }

    // t0 heuristic: a "typical" weight magnitude and the hinge slope at
    // −typw give an initial step of roughly typw.
    let typw = (1.0 / h.alpha.sqrt()).sqrt();
    let eta0 = typw; // hinge slope at z = −typw is 1
    let t0 = 1.0 / (eta0 * h.alpha);
    let l2_factor = h.alpha * (1.0 - h.l1_ratio);
    let l1_factor = h.alpha * h.l1_ratio;

    let mut w = vec![0.0; n_cols];
    let mut wscale = 1.0_f64;
    let mut bias = 0.0_f64;
    // cumulative-L1 bookkeeping: u is the total penalty available so
    // far, q[j] the amount already applied to feature j
    let mut u = 0.0_f64;
    let mut q = vec![0.0; n_cols];

    let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut t = 1.0_f64;
    for _ in 0..h.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (h.alpha * (t0 + t));
            let row = &rows[i];
            let target = if y[i] == 1 { 1.0 } else { -1.0 };
            let score =
                wscale * row.iter().map(|&(j, v)| w[j] * v).sum::<f64>() + bias;

            if l2_factor > 0.0 {
                wscale *= 1.0 - eta * l2_factor;
                if wscale < 1e-9 {
                    for wj in &mut w {
                        *wj *= wscale;
                    }
                    wscale = 1.0;
                }
            }
            if target * score < 1.0 {
                let step = eta * target / wscale;
                for &(j, v) in row {
                    w[j] += step * v;
                }
                bias += eta * target;
            }
            if l1_factor > 0.0 {
                u += eta * l1_factor;
                for &(j, _) in row {
                    let z = w[j];
                    if wscale * w[j] > 0.0 {
                        w[j] = (w[j] - (u + q[j]) / wscale).max(0.0);
                    } else if wscale * w[j] < 0.0 {
                        w[j] = (w[j] + (u - q[j]) / wscale).min(0.0);
                    }
                    q[j] += wscale * (w[j] - z);
                }
            }
            t += 1.0;
        }
    }
    for wj in &mut w {
        *wj *= wscale;
    }
    Ok(LinearModel {
        weights: w,
        bias,
        hyperparams: h.clone(),
    })
}

/// Train the n-gram SVM on a sparse feature matrix.
pub fn train_linear_svm(x: &SparseMatrix, y: &[usize], h: &SgdHyperparams) -> Result<LinearModel> {
    sgd_train(&x.rows, x.n_cols, y, h)
}

/// Train the same linear model over dense sentence vectors. Every
/// component counts as touched for the lazy L1 penalty, matching the
/// dense-update semantics.
pub fn train_embedding_svm(
    vectors: &[Vec<f64>],
    y: &[usize],
    h: &SgdHyperparams,
) -> Result<LinearModel> {
    if vectors.len() != y.len() {
        return Err(Error::SizeMismatch(format!(
            "{} vectors for {} labels",
            vectors.len(),
            y.len()
        )));
    }
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in a {dim}-dimensional set",
            bad.len()
        )));
    }
    let rows: Vec<Vec<(usize, f64)>> = vectors
        .iter()
        .map(|v| v.iter().copied().enumerate().collect())
        .collect();
    sgd_train(&rows, dim, y, h)
}

/// Dense rows → sparse matrix (all components stored).
pub fn dense_to_sparse(vectors: &[Vec<f64>]) -> SparseMatrix {
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    SparseMatrix {
        n_cols: dim,
        rows: vectors
            .iter()
            .map(|v| v.iter().copied().enumerate().collect())
            .collect(),
    }
}

/// Read id-keyed sentence vectors: lines `id v1 ... v_dim`, consistent
/// dimensionality, order preserved.
pub fn read_id_vectors(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let origin = path.display().to_string();
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let id = parts.next().expect("non-empty line").to_string();
        let mut vector = Vec::new();
        for field in parts {
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(&origin, line_no, format!("bad vector component {field:?}"))
            })?;
            vector.push(v);
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::parse(
                    &origin,
                    line_no,
                    format!("vector length {} differs from dim {}", vector.len(), d),
                ))
            }
            Some(_) => {}
        }
        out.push((id, vector));
    }
    Ok(out)
}

/// Serializable dump of a trained baseline (featurizer included for the
/// n-gram variant).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModelFile {
    pub featurizer: Option<NgramFeaturizer>,
    pub model: LinearModel,
}

pub fn save_svm_model(path: &Path, file: &SvmModelFile) -> Result<()> {
    let json = serde_json::to_string(file)?;
    std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_svm_model(path: &Path) -> Result<SvmModelFile> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}
