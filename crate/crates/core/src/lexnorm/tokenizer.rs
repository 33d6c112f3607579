//! Tweet tokenizer.
//!
//! Splits on whitespace, then detaches @-mentions, #-hashtags, URLs,
//! emoticons from [`EMOTICONS`] and leading/terminal punctuation runs as
//! separate tokens. Interior punctuation is left alone, so "you're",
//! "a$$hole" and "well-known" survive as single tokens. No
//! non-whitespace character is ever dropped.

use super::Token;

/// Fixed emoticon table. Detached at chunk boundaries during
/// tokenization; anything not listed here is treated as ordinary
/// punctuation.
pub const EMOTICONS: &[&str] = &[
    ":-)", ":)", ":-(", ":(", ";-)", ";)", ":-D", ":D", ";D", ":-P", ":P", ":-p", ":p", ":-O",
    ":O", ":-o", ":o", ":-|", ":|", ":-/", ":/", ":-\\", ":\\", ":-*", ":*", ":'(", ":'-(",
    ":')", "D:", "D-:", ":S", ":-S", ":s", ":-s", ":3", ":-3", "<3", "</3", "=)", "=(", "=D",
    "=/", "=\\", "=]", "=[", ":]", ":[", ">:(", ">:)", "xD", "XD", "xd", "^_^", "-_-", "o_O",
    "O_o", "T_T", ";_;",
];

/// Characters that stay glued inside a word: alphanumerics plus
/// apostrophe (contractions), slash (abbreviations like "w/", URLs) and
/// underscore (handles, hashtags).
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '/' | '_')
}

fn is_punct_char(c: char) -> bool {
    !c.is_whitespace() && !is_word_char(c)
}

fn has_url_prefix(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://") || s.starts_with("www.")
}

fn is_mention_start(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('@') | Some('#'))
        && chars.next().is_some_and(|c| c.is_alphanumeric() || c == '_')
}

/// Length in bytes of the @-mention or #-hashtag at the start of `s`.
fn mention_len(s: &str) -> usize {
    let head = s.chars().next().map(char::len_utf8).unwrap_or(0);
    head + s[head..]
        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
        .unwrap_or(s.len() - head)
}

/// Longest emoticon that `s` starts with, if any.
fn emoticon_prefix(s: &str) -> Option<&'static str> {
    EMOTICONS
        .iter()
        .filter(|e| s.starts_with(**e))
        .max_by_key(|e| e.len())
        .copied()
}

/// Longest emoticon that `s` ends with, if any.
fn emoticon_suffix(s: &str) -> Option<&'static str> {
    EMOTICONS
        .iter()
        .filter(|e| s.ends_with(**e))
        .max_by_key(|e| e.len())
        .copied()
}

/// An emoticon match only counts at a word boundary; otherwise "xD"
/// would be carved out of "relaxDays".
fn prefix_boundary_ok(emo: &str, rest: &str) -> bool {
    emo.chars().last().is_some_and(is_punct_char)
        || rest.is_empty()
        || rest.chars().next().is_some_and(is_punct_char)
}

fn suffix_boundary_ok(emo: &str, before: &str) -> bool {
    emo.chars().next().is_some_and(is_punct_char)
        || before.is_empty()
        || before.chars().last().is_some_and(is_punct_char)
}

/// Split a pure-punctuation run into emoticons and residual runs.
fn segment_punct_run(run: &str, out: &mut Vec<Token>) {
    let mut residual_start = 0;
    let mut pos = 0;
    while pos < run.len() {
        if let Some(emo) = emoticon_prefix(&run[pos..]) {
            if residual_start < pos {
                out.push(Token::raw(&run[residual_start..pos]));
            }
            out.push(Token::raw(emo));
            pos += emo.len();
            residual_start = pos;
        } else {
            pos += run[pos..].chars().next().map(char::len_utf8).unwrap_or(1);
        }
    }
    if residual_start < run.len() {
        out.push(Token::raw(&run[residual_start..]));
    }
}

/// Leading punctuation run of `s`, stopping before any embedded
/// mention/hashtag start.
fn leading_punct_len(s: &str) -> usize {
    let mut len = 0;
    for (i, c) in s.char_indices() {
        if !is_punct_char(c) || (len > 0 && is_mention_start(&s[i..])) {
            break;
        }
        len = i + c.len_utf8();
    }
    len
}

fn trailing_punct_len(s: &str) -> usize {
    let mut len = 0;
    for c in s.chars().rev() {
        if !is_punct_char(c) {
            break;
        }
        len += c.len_utf8();
    }
    len
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<Token>) {
    let mut rest = chunk;

    // Peel URLs, emoticons, mentions/hashtags and punctuation runs off
    // the front until a word starts.
    loop {
        if rest.is_empty() {
            return;
        }
        if has_url_prefix(rest) {
            out.push(Token::raw(rest));
            return;
        }
        if let Some(emo) = emoticon_prefix(rest) {
            if prefix_boundary_ok(emo, &rest[emo.len()..]) {
                out.push(Token::raw(emo));
                rest = &rest[emo.len()..];
                continue;
            }
        }
        if is_mention_start(rest) {
            let len = mention_len(rest);
            out.push(Token::raw(&rest[..len]));
            rest = &rest[len..];
            continue;
        }
        let punct = leading_punct_len(rest);
        if punct > 0 {
            segment_punct_run(&rest[..punct], out);
            rest = &rest[punct..];
            continue;
        }
        break;
    }

    // Peel emoticons and punctuation runs off the back; whatever
    // remains in the middle is a single word token.
    let mut tail: Vec<Token> = Vec::new();
    loop {
        if rest.is_empty() {
            break;
        }
        if let Some(emo) = emoticon_suffix(rest) {
            let cut = rest.len() - emo.len();
            if suffix_boundary_ok(emo, &rest[..cut]) {
                tail.push(Token::raw(emo));
                rest = &rest[..cut];
                continue;
            }
        }
        let punct = trailing_punct_len(rest);
        if punct > 0 {
            let cut = rest.len() - punct;
            let mut segments = Vec::new();
            segment_punct_run(&rest[cut..], &mut segments);
            segments.reverse();
            tail.extend(segments);
            rest = &rest[..cut];
            continue;
        }
        break;
    }
    if !rest.is_empty() {
        out.push(Token::raw(rest));
    }
    tail.reverse();
    out.extend(tail);
}

/// Tokenize a tweet. Empty or all-whitespace input yields an empty list.
pub fn tokenize_tweet(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn toks(text: &str) -> Vec<String> {
        tokenize_tweet(text)
            .into_iter()
            .map(|t| t.as_str().to_string())
            .collect()
    }

    #[test]
    fn mention_word_and_terminal_punct() {
        assert_eq!(toks("@user you're sick!"), ["@user", "you're", "sick", "!"]);
    }

    #[test]
    fn empty_and_whitespace_input() {
        assert_eq!(toks(""), Vec::<String>::new());
        assert_eq!(toks("  \t\n "), Vec::<String>::new());
    }

    #[test]
    fn hashtag_and_url_stay_whole() {
        assert_eq!(
            toks("go home #now http://x.co"),
            ["go", "home", "#now", "http://x.co"]
        );
        assert_eq!(toks("see www.example.com"), ["see", "www.example.com"]);
    }

    #[test]
    fn leading_punct_run_detached() {
        assert_eq!(toks("...wow"), ["...", "wow"]);
        assert_eq!(toks("(ok)"), ["(", "ok", ")"]);
    }

    #[test]
    fn emoticons_detached() {
        assert_eq!(toks("love you <3"), ["love", "you", "<3"]);
        assert_eq!(toks("fun:)"), ["fun", ":)"]);
        assert_eq!(toks("ok!:)"), ["ok", "!", ":)"]);
        assert_eq!(toks("great:D"), ["great", ":D"]);
        assert_eq!(toks("xD"), ["xD"]);
    }

    #[test]
    fn emoticon_not_carved_out_of_words() {
        assert_eq!(toks("relaxD"), ["relaxD"]);
        assert_eq!(toks("xDays"), ["xDays"]);
    }

    #[test]
    fn interior_punct_kept() {
        assert_eq!(toks("a$$hole"), ["a$$hole"]);
        assert_eq!(toks("well-known"), ["well-known"]);
        assert_eq!(toks("w/"), ["w/"]);
    }

    #[test]
    fn punct_then_mention() {
        assert_eq!(toks(",@user"), [",", "@user"]);
        assert_eq!(toks("!!#tag"), ["!!", "#tag"]);
    }

    #[test]
    fn mention_with_trailing_apostrophe_s() {
        assert_eq!(toks("@user's"), ["@user", "'s"]);
    }

    fn char_multiset(s: &str) -> HashMap<char, usize> {
        let mut m = HashMap::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            *m.entry(c).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn conservation_of_non_whitespace_chars() {
        let cases = [
            "@user you're sick!",
            "go home #now http://x.co",
            "...wow!!! :) <3 a$$hole",
            "héllo wörld… 😀!!",
            "a*b (c) [d] {e} ~f~",
        ];
        for text in cases {
            let joined: String = toks(text).join(" ");
            assert_eq!(
                char_multiset(text),
                char_multiset(&joined),
                "lost characters in {text:?}"
            );
        }
    }

    #[test]
    fn tokens_are_nonempty_and_whitespace_free() {
        for token in tokenize_tweet("so... much!! punctuation:-) @x #y http://z.q") {
            assert!(!token.as_str().is_empty());
            assert!(!token.as_str().chars().any(char::is_whitespace));
        }
    }
}
