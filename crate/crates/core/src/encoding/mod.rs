//! Token lists → model inputs: per-word character-index grids (x_c)
//! and per-word embedding vectors (x_w), plus the character vocabulary
//! and pretrained-embedding loaders they depend on.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use ndarray::{Array2, Array3};

use crate::error::Error;
use crate::lexnorm::Token;
use crate::Result;

/// Character index reserved for padding.
pub const PAD_INDEX: usize = 0;
/// Character index reserved for out-of-vocabulary characters.
pub const UNK_INDEX: usize = 1;
/// Default number of real character entries (indices 2..=257).
pub const DEFAULT_CHAR_VOCAB: usize = 256;
/// Hard cap on per-word character length (guards against URLs).
pub const MAX_WORD_LEN_CAP: usize = 32;

/// Frequency-ranked character table. Real characters occupy indices
/// 2..size+1; 0 is PAD and 1 is UNK, never assigned to characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharVocabulary {
    index_of: BTreeMap<char, usize>,
}

impl CharVocabulary {
    /// Index for a character; unseen characters map to UNK.
    pub fn index(&self, c: char) -> usize {
        self.index_of.get(&c).copied().unwrap_or(UNK_INDEX)
    }

    /// Number of real character entries (excludes PAD and UNK).
    pub fn len(&self) -> usize {
        self.index_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_of.is_empty()
    }

    /// Embedding-table size the model needs: entries + PAD + UNK.
    pub fn table_size(&self) -> usize {
        self.index_of.len() + 2
    }

    /// Serialize as UTF-8 lines `index<TAB>codepoint-hex`.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(usize, char)> =
            self.index_of.iter().map(|(&c, &i)| (i, c)).collect();
        rows.sort_unstable();
        let mut out = String::new();
        for (index, c) in rows {
            out.push_str(&format!("{index}\t{:x}\n", c as u32));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn from_text(text: &str, origin: &str) -> Result<CharVocabulary> {
        let mut index_of = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (index_s, hex) = line.split_once('\t').ok_or_else(|| {
                Error::parse(origin, line_no, "expected `index<TAB>codepoint-hex`")
            })?;
            let index: usize = index_s
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("bad index {index_s:?}")))?;
            if index < 2 {
                return Err(Error::parse(origin, line_no, "indices 0 and 1 are reserved"));
            }
            if !seen.insert(index) {
                return Err(Error::parse(origin, line_no, format!("duplicate index {index}")));
            }
            let code = u32::from_str_radix(hex, 16)
                .map_err(|_| Error::parse(origin, line_no, format!("bad code point {hex:?}")))?;
            let c = char::from_u32(code)
                .ok_or_else(|| Error::parse(origin, line_no, format!("invalid code point {code:#x}")))?;
            if index_of.insert(c, index).is_some() {
                return Err(Error::parse(origin, line_no, format!("duplicate character {c:?}")));
            }
        }
        Ok(CharVocabulary { index_of })
    }

    pub fn load(path: &Path) -> Result<CharVocabulary> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        CharVocabulary::from_text(&text, &path.display().to_string())
    }
}

/// Rank characters by corpus frequency and map the `size` most frequent
/// to indices 2..size+1 (descending frequency, ties by ascending code
/// point). Fewer distinct characters than `size` yields a smaller table.
pub fn build_char_vocab(corpus: &[Vec<Token>], size: usize) -> Result<CharVocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: HashMap<char, u64> = HashMap::new();
    for tokens in corpus {
        for token in tokens {
            for c in token.as_str().chars() {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
    }
    let mut ranked: Vec<(char, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let index_of = ranked
        .into_iter()
        .take(size)
        .enumerate()
        .map(|(i, (c, _))| (c, i + 2))
        .collect();
    Ok(CharVocabulary { index_of })
}

/// Longest word in the corpus, capped at [`MAX_WORD_LEN_CAP`] and
/// rounded up to a multiple of 4 so two stride-2 pooling layers divide it.
pub fn suggest_max_word_len(corpus: &[Vec<Token>]) -> usize {
    let longest = corpus
        .iter()
        .flat_map(|tokens| tokens.iter())
        .map(|t| t.as_str().chars().count())
        .max()
        .unwrap_or(1);
    let capped = longest.clamp(4, MAX_WORD_LEN_CAP);
    capped.div_ceil(4) * 4
}

/// Character-index grid for one token list: row per word (truncated at
/// `max_words`), column per character (truncated at `max_word_len`),
/// PAD elsewhere, UNK for characters outside the vocabulary.
pub fn encode_chars(
    tokens: &[Token],
    vocab: &CharVocabulary,
    max_word_len: usize,
    max_words: usize,
) -> Array2<usize> {
    let mut grid = Array2::from_elem((max_words, max_word_len), PAD_INDEX);
    for (w, token) in tokens.iter().take(max_words).enumerate() {
        for (j, c) in token.as_str().chars().take(max_word_len).enumerate() {
            grid[[w, j]] = vocab.index(c);
        }
    }
    grid
}

/// Pretrained word-embedding table in the textual vector format:
/// optional `count dim` header, then `token v1 ... v_dim` per line.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    oov: Vec<f64>,
}

impl EmbeddingTable {
    /// A table with no entries; every lookup yields the zero vector.
    pub fn empty(dim: usize) -> EmbeddingTable {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
            oov: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Exact-case lookup, then lowercase fallback; None when absent.
    pub fn get(&self, token: &str) -> Option<&[f64]> {
        if let Some(v) = self.vectors.get(token) {
            return Some(v);
        }
        let lower = token.to_lowercase();
        if lower != token {
            if let Some(v) = self.vectors.get(&lower) {
                return Some(v);
            }
        }
        None
    }

    /// Like [`get`](Self::get) but OOV tokens yield the zero vector.
    pub fn embed(&self, token: &str) -> &[f64] {
        self.get(token).unwrap_or(&self.oov)
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector for {token:?} has length {}, table dim is {}",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(token.to_string(), vector);
        Ok(())
    }
}

/// Parse the textual vector format. A first line of exactly two integer
/// tokens is treated as a `count dim` header. `limit` caps the number of
/// vector rows read (handy for desk-scale tests on huge tables).
pub fn parse_embedding_table(
    text: &str,
    origin: &str,
    limit: Option<usize>,
) -> Result<EmbeddingTable> {
    let mut dim: Option<usize> = None;
    let mut vectors = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().expect("non-empty line has a first field");
        let rest: Vec<&str> = parts.collect();
        if i == 0 && rest.len() == 1 && token.parse::<usize>().is_ok() {
            if let Ok(d) = rest[0].parse::<usize>() {
                dim = Some(d);
                continue;
            }
        }
        let mut vector = Vec::with_capacity(rest.len());
        for field in &rest {
            let value: f64 = field.parse().map_err(|_| {
                Error::parse(origin, line_no, format!("bad vector component {field:?}"))
            })?;
            vector.push(value);
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("vector length {} differs from dim {}", vector.len(), d),
                ))
            }
            Some(_) => {}
        }
        if vector.is_empty() {
            return Err(Error::parse(origin, line_no, "vector row with no components"));
        }
        vectors.insert(token.to_string(), vector);
        if let Some(cap) = limit {
            if vectors.len() >= cap {
                break;
            }
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(origin, 1, "empty embedding file"))?;
    Ok(EmbeddingTable {
        dim,
        oov: vec![0.0; dim],
        vectors,
    })
}

pub fn load_embedding_table(path: &Path, limit: Option<usize>) -> Result<EmbeddingTable> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_embedding_table(&text, &path.display().to_string(), limit)
}

/// Model-ready batch: character grids, word vectors, word mask and
/// optional class labels (NOT=0/OFF=1 or TIN=0/UNT=1).
#[derive(Debug, Clone)]
pub struct EncodedBatch {
    /// [batch, max_words, max_word_len], entries in [0, vocab+1].
    pub char_indices: Array3<usize>,
    /// [batch, max_words, dim]; zero rows beyond the mask and for OOV.
    pub word_vectors: Array3<f64>,
    /// [batch, max_words], 1.0 at real word positions.
    pub word_mask: Array2<f64>,
    pub labels: Option<Vec<usize>>,
    /// One entry per example that tokenized to zero tokens.
    pub warnings: Vec<String>,
}

impl EncodedBatch {
    pub fn batch_size(&self) -> usize {
        self.char_indices.shape()[0]
    }

    pub fn max_words(&self) -> usize {
        self.char_indices.shape()[1]
    }

    pub fn max_word_len(&self) -> usize {
        self.char_indices.shape()[2]
    }

    pub fn embedding_dim(&self) -> usize {
        self.word_vectors.shape()[2]
    }

    /// Number of real words in example `i`.
    pub fn seq_len(&self, i: usize) -> usize {
        self.word_mask.row(i).iter().filter(|&&m| m != 0.0).count()
    }
}

/// Encode a batch of token lists. `max_words` is the longest example in
/// the batch; examples with zero tokens become a single UNK word and a
/// warning is recorded on the batch.
pub fn make_batch(
    examples: &[Vec<Token>],
    labels: Option<&[usize]>,
    vocab: &CharVocabulary,
    table: &EmbeddingTable,
    max_word_len: usize,
) -> Result<EncodedBatch> {
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(labels) = labels {
        if labels.len() != examples.len() {
            return Err(Error::SizeMismatch(format!(
                "{} labels for {} examples",
                labels.len(),
                examples.len()
            )));
        }
    }
    let max_words = examples.iter().map(|t| t.len().max(1)).max().unwrap_or(1);
    let n = examples.len();
    let dim = table.dim();

    let mut char_indices = Array3::from_elem((n, max_words, max_word_len), PAD_INDEX);
    let mut word_vectors = Array3::zeros((n, max_words, dim));
    let mut word_mask = Array2::zeros((n, max_words));
    let mut warnings = Vec::new();

    for (i, tokens) in examples.iter().enumerate() {
        if tokens.is_empty() {
            warnings.push(format!("example {i} tokenized to zero tokens; using one UNK word"));
            char_indices[[i, 0, 0]] = UNK_INDEX;
            word_mask[[i, 0]] = 1.0;
            continue;
        }
        let grid = encode_chars(tokens, vocab, max_word_len, max_words);
        for (w, token) in tokens.iter().take(max_words).enumerate() {
            word_mask[[i, w]] = 1.0;
            for j in 0..max_word_len {
                char_indices[[i, w, j]] = grid[[w, j]];
            }
            for (k, v) in table.embed(token.as_str()).iter().enumerate() {
                word_vectors[[i, w, k]] = *v;
            }
        }
    }

    Ok(EncodedBatch {
        char_indices,
        word_vectors,
        word_mask,
        labels: labels.map(|l| l.to_vec()),
        warnings,
    })
}
