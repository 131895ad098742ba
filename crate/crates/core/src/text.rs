//! Token splitting shared by the norm extractor and the embedder.
//!
//! A token is a maximal run of alphanumeric characters; everything else
//! (whitespace, punctuation, quotes, hyphens) separates tokens.

/// A token borrowed from its source text, with its byte span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

pub fn tokens(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Token { text: &text[s..i], start: s, end: i });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &text[s..], start: s, end: text.len() });
    }
    out
}

/// Lowercased tokens of `sentence`.
pub fn tokenize(sentence: &str) -> Vec<String> {
    tokens(sentence).into_iter().map(|t| t.text.to_lowercase()).collect()
}
