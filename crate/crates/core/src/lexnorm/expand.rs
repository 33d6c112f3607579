//! Contraction and social-media abbreviation tables.
//!
//! Both expansions are off by default in the pipeline; they did not help
//! the final model and exist as opt-in switches.

/// Contractions, keyed lowercase.
pub const CONTRACTIONS: &[(&str, &str)] = &[
    ("i'm", "i am"),
    ("i've", "i have"),
    ("i'll", "i will"),
    ("i'd", "i would"),
    ("you're", "you are"),
    ("you've", "you have"),
    ("you'll", "you will"),
    ("you'd", "you would"),
    ("he's", "he is"),
    ("she's", "she is"),
    ("it's", "it is"),
    ("we're", "we are"),
    ("we've", "we have"),
    ("we'll", "we will"),
    ("they're", "they are"),
    ("they've", "they have"),
    ("they'll", "they will"),
    ("isn't", "is not"),
    ("aren't", "are not"),
    ("wasn't", "was not"),
    ("weren't", "were not"),
    ("don't", "do not"),
    ("doesn't", "does not"),
    ("didn't", "did not"),
    ("can't", "can not"),
    ("couldn't", "could not"),
    ("won't", "will not"),
    ("wouldn't", "would not"),
    ("shouldn't", "should not"),
    ("haven't", "have not"),
    ("hasn't", "has not"),
    ("hadn't", "had not"),
    ("let's", "let us"),
    ("that's", "that is"),
    ("what's", "what is"),
    ("who's", "who is"),
    ("there's", "there is"),
    ("here's", "here is"),
    ("ain't", "is not"),
    ("y'all", "you all"),
];

/// Common social-media abbreviations, keyed lowercase.
pub const ABBREVIATIONS: &[(&str, &str)] = &[
    ("w/", "with"),
    ("w/o", "without"),
    ("b/c", "because"),
    ("u", "you"),
    ("ur", "your"),
    ("r", "are"),
    ("pls", "please"),
    ("plz", "please"),
    ("thx", "thanks"),
    ("idk", "i do not know"),
    ("imo", "in my opinion"),
    ("btw", "by the way"),
    ("omg", "oh my god"),
    ("gr8", "great"),
    ("m8", "mate"),
    ("l8r", "later"),
    ("rn", "right now"),
    ("tbh", "to be honest"),
];

fn lookup(table: &[(&'static str, &'static str)], key: &str) -> Option<&'static str> {
    let key = key.to_lowercase();
    table.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
}

/// Expand one token against a table. A hit yields the expansion split
/// into words, with the leading capital restored when the original
/// token started uppercase; a miss yields the token unchanged.
pub fn expand_token(table: &[(&'static str, &'static str)], token: &str) -> Vec<String> {
    match lookup(table, token) {
        None => vec![token.to_string()],
        Some(expansion) => {
            let capitalize = token.chars().next().is_some_and(char::is_uppercase);
            expansion
                .split(' ')
                .enumerate()
                .map(|(i, word)| {
                    if i == 0 && capitalize {
                        let mut chars = word.chars();
                        match chars.next() {
                            Some(first) => {
                                first.to_uppercase().collect::<String>() + chars.as_str()
                            }
                            None => String::new(),
                        }
                    } else {
                        word.to_string()
                    }
                })
                .collect()
        }
    }
}
