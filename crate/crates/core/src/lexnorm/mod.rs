//! Obfuscated-profanity normalization and tweet tokenization.
//!
//! Offensive words are often distorted to slip past filters ("a$$hole",
//! "a$sh0le", "a**hole"). Given a list of offensive words and a map of
//! visually-equivalent character substitutions, [`build_variant_table`]
//! enumerates the spellable variants up front; [`normalize_token`] then
//! rewrites any matching token back to its canonical form with a single
//! hash lookup.

mod expand;
mod tokenizer;

pub use expand::{ABBREVIATIONS, CONTRACTIONS};
pub use tokenizer::{tokenize_tweet, EMOTICONS};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::Error;
use crate::Result;

/// Built-in offensive word list; callers can load their own with
/// [`load_word_list`].
pub const DEFAULT_WORD_LIST: &str = include_str!("../../data/offensive_words.txt");

/// Hard cap on generated variants per base word; expansion of a word
/// stops once the cap is hit.
pub const MAX_VARIANTS_PER_WORD: usize = 50_000;

/// Default number of positions that may be substituted in one word.
pub const DEFAULT_MAX_SUBSTITUTIONS: usize = 3;

/// One tokenizer output: non-empty text without internal whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token(String);

impl Token {
    /// Build a token, rejecting empty or whitespace-containing text.
    pub fn new(text: impl Into<String>) -> Option<Token> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Token(text))
        }
    }

    pub(crate) fn raw(text: &str) -> Token {
        debug_assert!(!text.is_empty() && !text.chars().any(char::is_whitespace));
        Token(text.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Map from lowercase letter to the replacement strings that may stand
/// in for it, plus universal replacements (the '*' mask) that apply to
/// every letter. The identity substitution is implicit and never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMap {
    entries: BTreeMap<char, Vec<String>>,
    universal: Vec<String>,
}

impl SubstitutionMap {
    pub fn empty() -> Self {
        SubstitutionMap {
            entries: BTreeMap::new(),
            universal: Vec::new(),
        }
    }

    /// Build from pairs; replacement strings must be non-empty and free
    /// of whitespace. Use '*' as the letter for universal replacements.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (char, S)>,
        S: Into<String>,
    {
        let mut map = SubstitutionMap::empty();
        for (letter, alt) in pairs {
            map.insert(letter, alt.into())?;
        }
        Ok(map)
    }

    fn insert(&mut self, letter: char, alt: String) -> Result<()> {
        if alt.is_empty() || alt.chars().any(char::is_whitespace) {
            return Err(Error::Parse {
                path: "<substitutions>".into(),
                line: 0,
                message: format!("invalid replacement {alt:?} for {letter:?}"),
            });
        }
        let bucket = if letter == '*' {
            &mut self.universal
        } else {
            self.entries.entry(letter.to_ascii_lowercase()).or_default()
        };
        if !bucket.contains(&alt) {
            bucket.push(alt);
        }
        Ok(())
    }

    /// Parse the `letter: alt1,alt2` file format. Blank lines and lines
    /// starting with '#' are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut map = SubstitutionMap::empty();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (letter, alts) = line.split_once(':').ok_or_else(|| {
                Error::parse(path.display().to_string(), i + 1, "expected `letter: alts`")
            })?;
            let letter = letter.trim();
            let mut chars = letter.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::parse(
                    path.display().to_string(),
                    i + 1,
                    format!("key must be a single character, got {letter:?}"),
                ));
            };
            for alt in alts.split(',') {
                let alt = alt.trim();
                if !alt.is_empty() {
                    map.insert(c, alt.to_string())?;
                }
            }
        }
        Ok(map)
    }

    /// Non-identity replacements applicable to `letter`.
    pub fn alternatives(&self, letter: char) -> Vec<&str> {
        let mut alts: Vec<&str> = self
            .entries
            .get(&letter)
            .map(|v| v.iter().map(String::as_str).collect())
            .unwrap_or_default();
        if letter.is_alphabetic() {
            alts.extend(self.universal.iter().map(String::as_str));
        }
        alts
    }
}

impl Default for SubstitutionMap {
    /// Leet-speak defaults plus the universal '*' mask.
    fn default() -> Self {
        SubstitutionMap::from_pairs([
            ('a', "@"),
            ('a', "4"),
            ('b', "8"),
            ('e', "3"),
            ('g', "9"),
            ('i', "1"),
            ('i', "!"),
            ('l', "1"),
            ('o', "0"),
            ('s', "$"),
            ('s', "5"),
            ('t', "7"),
            ('z', "2"),
            ('*', "*"),
        ])
        .expect("default substitutions are valid")
    }
}

/// Immutable map from obfuscated variants to canonical offensive words.
#[derive(Debug, Clone)]
pub struct ObfuscationLexicon {
    variants: HashMap<String, String>,
    base_words: Vec<String>,
    max_substitutions: usize,
}

impl ObfuscationLexicon {
    pub fn base_words(&self) -> &[String] {
        &self.base_words
    }

    pub fn max_substitutions(&self) -> usize {
        self.max_substitutions
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    /// Canonical form for a variant, looked up case-insensitively.
    pub fn canonical(&self, variant: &str) -> Option<&str> {
        self.variants.get(&variant.to_lowercase()).map(String::as_str)
    }

    /// Lexicon over the built-in word list with default substitutions.
    pub fn builtin() -> Result<Self> {
        let words = parse_word_list(DEFAULT_WORD_LIST);
        build_variant_table(
            &words,
            &SubstitutionMap::default(),
            DEFAULT_MAX_SUBSTITUTIONS,
        )
    }
}

/// When two base words generate the same variant, the shorter base word
/// wins; ties break lexicographically. Identity entries always win for
/// their own key.
fn better_canonical<'a>(a: &'a str, b: &'a str) -> &'a str {
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => a.min(b),
    }
}

fn insert_variant(variants: &mut HashMap<String, String>, variant: String, canonical: &str) {
    match variants.get_mut(&variant) {
        None => {
            variants.insert(variant, canonical.to_string());
        }
        Some(existing) => {
            // An identity entry is never displaced.
            if *existing == variant {
                return;
            }
            if canonical == variant {
                *existing = canonical.to_string();
                return;
            }
            if better_canonical(existing, canonical) != existing.as_str() {
                *existing = canonical.to_string();
            }
        }
    }
}

/// Generate every variant of `word` reachable by substituting between 1
/// and `max_substitutions` letter positions, stopping at the per-word
/// cap. Variants are produced in deterministic order.
fn word_variants(word: &str, subs: &SubstitutionMap, max_substitutions: usize) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let position_alts: Vec<Vec<&str>> = chars.iter().map(|&c| subs.alternatives(c)).collect();
    let substitutable: Vec<usize> = (0..chars.len())
        .filter(|&i| !position_alts[i].is_empty())
        .collect();

    let mut out = Vec::new();
    let max_k = max_substitutions.min(substitutable.len());
    'gen: for k in 1..=max_k {
        // Iterate k-subsets of substitutable positions in lexicographic
        // order via a moving index vector.
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let positions: Vec<usize> = combo.iter().map(|&i| substitutable[i]).collect();
            // Cartesian product of alternatives at the chosen positions.
            let mut choice = vec![0usize; k];
            loop {
                let mut variant = String::with_capacity(word.len());
                let mut pos_iter = 0;
                for (i, &c) in chars.iter().enumerate() {
                    if pos_iter < k && positions[pos_iter] == i {
                        variant.push_str(position_alts[i][choice[pos_iter]]);
                        pos_iter += 1;
                    } else {
                        variant.push(c);
                    }
                }
                out.push(variant.to_lowercase());
                if out.len() >= MAX_VARIANTS_PER_WORD {
                    break 'gen;
                }
                // Advance the choice vector.
                let mut idx = k;
                loop {
                    if idx == 0 {
                        break;
                    }
                    idx -= 1;
                    choice[idx] += 1;
                    if choice[idx] < position_alts[positions[idx]].len() {
                        break;
                    }
                    choice[idx] = 0;
                    if idx == 0 {
                        idx = usize::MAX;
                        break;
                    }
                }
                if idx == usize::MAX {
                    break;
                }
            }
            // Advance the combination.
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                combo[i] += 1;
                if combo[i] <= substitutable.len() - (k - i) {
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    out
}

/// Build the variant lexicon for a set of canonical offensive words.
///
/// Every base word contributes its identity entry plus all variants from
/// substituting 1..=`max_substitutions` letter positions. Duplicate base
/// words are deduplicated silently; an empty word list is an error.
pub fn build_variant_table(
    base_words: &[String],
    subs: &SubstitutionMap,
    max_substitutions: usize,
) -> Result<ObfuscationLexicon> {
    if base_words.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    let mut words: Vec<String> = base_words.iter().map(|w| w.to_lowercase()).collect();
    words.sort();
    words.dedup();
    if words.iter().any(|w| w.is_empty()) {
        return Err(Error::EmptyLexicon);
    }

    let mut variants = HashMap::new();
    for word in &words {
        insert_variant(&mut variants, word.clone(), word);
        for variant in word_variants(word, subs, max_substitutions) {
            insert_variant(&mut variants, variant, word);
        }
    }
    Ok(ObfuscationLexicon {
        variants,
        base_words: words,
        max_substitutions,
    })
}

/// Rewrite a token to its canonical form when its case-folded text is a
/// known variant; otherwise return it unchanged.
pub fn normalize_token(token: Token, lexicon: &ObfuscationLexicon) -> Token {
    match lexicon.canonical(token.as_str()) {
        Some(canonical) => Token::raw(canonical),
        None => token,
    }
}

/// Tokenize, optionally expand contractions/abbreviations, then
/// normalize each token against the lexicon.
pub fn normalize_text(
    text: &str,
    lexicon: &ObfuscationLexicon,
    expand_contractions: bool,
    expand_abbreviations: bool,
) -> Vec<Token> {
    let mut out = Vec::new();
    for token in tokenize_tweet(text) {
        let mut parts = vec![token.into_string()];
        if expand_contractions {
            parts = parts
                .iter()
                .flat_map(|p| expand::expand_token(CONTRACTIONS, p))
                .collect();
        }
        if expand_abbreviations {
            parts = parts
                .iter()
                .flat_map(|p| expand::expand_token(ABBREVIATIONS, p))
                .collect();
        }
        for part in parts {
            out.push(normalize_token(Token::raw(&part), lexicon));
        }
    }
    out
}

/// Words of the built-in offensive-word list.
pub fn builtin_word_list() -> Vec<String> {
    parse_word_list(DEFAULT_WORD_LIST)
}

fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        })
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Load an offensive-word list: one lowercase word per line, '#'
/// comments allowed.
pub fn load_word_list(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(parse_word_list(&text))
}
