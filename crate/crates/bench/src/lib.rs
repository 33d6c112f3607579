//! Shared fixtures for the criterion benches in `benches/`.

use offlang_core::lexnorm::{normalize_text, ObfuscationLexicon, Token};

/// Deterministic short texts shaped like the tweets the pipeline sees:
/// mentions, hashtags, URLs, emoticons and obfuscated profanity.
pub fn sample_texts(n: usize) -> Vec<String> {
    let templates = [
        "@user you are a total a$hole and a cl0wn #angry",
        "what a lovely day in the park http://example.com :)",
        "this is the w0rst sh1t i have ever seen!!!",
        "RT @friend: go home #now you mug",
        "honestly it all went sideways w/ no warning",
        "such a great game yesterday <3 #win",
    ];
    (0..n)
        .map(|i| format!("{} round {i}", templates[i % templates.len()]))
        .collect()
}

/// Tokenized, lexicon-normalized forms of the sample texts.
pub fn sample_token_lists(texts: &[String], lexicon: &ObfuscationLexicon) -> Vec<Vec<Token>> {
    texts
        .iter()
        .map(|t| normalize_text(t, lexicon, false, false))
        .collect()
}
