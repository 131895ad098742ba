//! Sentence segmentation for contract bodies.
//!
//! Boundaries are `.`, `!`, `?` and `;` followed by whitespace (closing
//! quotes and brackets stay with the sentence), blank lines, and line breaks
//! that introduce a list item. A period does not end a sentence when the
//! word before it is a known abbreviation or a single-letter initial, or
//! when the next word starts in lowercase (`as specified in Exhibit III.
//! shall be directed`). List markers such as `-`, `1.`, `(a)` or `iv)` at the
//! start of a sentence are not part of it.

use std::sync::OnceLock;

use regex::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub text: &'a str,
    /// Byte range into the segmented text.
    pub span: (usize, usize),
}

const ABBREVIATIONS: &[&str] = &[
    "art", "arts", "cf", "co", "corp", "dept", "dr", "e.g", "esq", "et al", "fig", "i.e", "inc", "jr",
    "ltd", "mr", "mrs", "ms", "no", "nos", "p", "para", "pp", "sec", "sect", "sr", "st", "u.k", "u.s",
    "u.s.a", "v", "viz", "vol", "vs", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
];

fn list_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?:[-*\x{2022}]|\(?(?:\d{1,3}|[A-Za-z]|[ivxlcdm]{1,6}|[IVXLCDM]{1,6})[.)]|\d{1,3}(?:\.\d{1,3})+\.?)[ \t]+")
            .expect("valid list marker pattern")
    })
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}')
}

fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    if word.chars().count() == 1 && word.chars().all(|c| c.is_uppercase()) {
        return true;
    }
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Byte offset just past the list marker starting at `pos`, if any.
fn skip_list_marker(text: &str, pos: usize) -> Option<usize> {
    list_marker().find(&text[pos..]).map(|m| pos + m.end())
}

fn skip_whitespace(text: &str, mut pos: usize) -> usize {
    while let Some(c) = text[pos..].chars().next() {
        if !c.is_whitespace() {
            break;
        }
        pos += c.len_utf8();
    }
    pos
}

fn trim_end_at(text: &str, start: usize, end: usize) -> usize {
    start + text[start..end].trim_end().len()
}

/// Whether the period at byte `dot` ends the sentence, given that the
/// sentence (with closing characters) would end at `end`.
fn period_ends_sentence(text: &str, sentence_start: usize, dot: usize, end: usize) -> bool {
    let before = &text[sentence_start..dot];
    let word = before.rsplit(char::is_whitespace).next().unwrap_or("");
    if !word.is_empty() && is_abbreviation(word) {
        return false;
    }
    let next = skip_whitespace(text, end);
    match text[next..].chars().next() {
        Some(c) => !c.is_lowercase(),
        None => true,
    }
}

pub fn segment_sentences(text: &str) -> Vec<Sentence<'_>> {
    let mut out = Vec::new();
    let mut pos = 0;
    let len = text.len();

    'sentences: while pos < len {
        pos = skip_whitespace(text, pos);
        if pos >= len {
            break;
        }
        if let Some(after) = skip_list_marker(text, pos) {
            pos = skip_whitespace(text, after);
            if pos >= len {
                break;
            }
        }
        let start = pos;
        let mut cursor = start;
        while let Some(c) = text[cursor..].chars().next() {
            let next = cursor + c.len_utf8();
            match c {
                '.' | '!' | '?' | ';' => {
                    let mut end = next;
                    while let Some(cc) = text[end..].chars().next().filter(|&cc| is_closing(cc)) {
                        end += cc.len_utf8();
                    }
                    let followed_by_space = text[end..].chars().next().is_none_or(char::is_whitespace);
                    let is_boundary = followed_by_space
                        && (c != '.' || period_ends_sentence(text, start, cursor, end));
                    if is_boundary {
                        out.push(Sentence { text: &text[start..end], span: (start, end) });
                        pos = end;
                        continue 'sentences;
                    }
                }
                '\n' => {
                    let mut peek = next;
                    while let Some(cc) = text[peek..].chars().next().filter(|&cc| cc == ' ' || cc == '\t' || cc == '\r') {
                        peek += cc.len_utf8();
                    }
                    let paragraph = text[peek..].starts_with('\n');
                    if paragraph || skip_list_marker(text, peek).is_some() {
                        let end = trim_end_at(text, start, cursor);
                        out.push(Sentence { text: &text[start..end], span: (start, end) });
                        pos = peek;
                        continue 'sentences;
                    }
                }
                _ => {}
            }
            cursor = next;
        }
        let end = trim_end_at(text, start, len);
        if end > start {
            out.push(Sentence { text: &text[start..end], span: (start, end) });
        }
        break;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<&str> {
        segment_sentences(s).into_iter().map(|s| s.text).collect()
    }

    #[test]
    fn splits_simple_sentences() {
        assert_eq!(texts("A shall pay. B may not sell."), ["A shall pay.", "B may not sell."]);
        assert!(texts("").is_empty());
        assert!(texts("   \n\t ").is_empty());
    }

    #[test]
    fn exhibit_reference_does_not_split() {
        let clause = "All inquiries that Seller receives on a worldwide basis relative to Buyer's air \
                      chamber \"Products\" as specified in Exhibit III. shall be directed to Buyer.";
        assert_eq!(texts(clause), [clause]);
    }

    #[test]
    fn abbreviations_and_numbers_are_guarded() {
        let t = "Acme Inc. shall deliver 2.5 tons to J. Smith by Sept. 3. Buyer may inspect them.";
        assert_eq!(
            texts(t),
            ["Acme Inc. shall deliver 2.5 tons to J. Smith by Sept. 3.", "Buyer may inspect them."]
        );
    }

    #[test]
    fn semicolons_and_quotes() {
        assert_eq!(
            texts("Seller shall ship; Buyer shall pay. He said \"stop.\" Then left"),
            ["Seller shall ship;", "Buyer shall pay.", "He said \"stop.\"", "Then left"]
        );
    }

    #[test]
    fn list_items_and_paragraphs() {
        let t = "The parties agree that:\n(a) Seller shall ship the goods\n(b) Buyer shall pay\n\n2. Term\n\nThis Agreement will expire in 2020.";
        assert_eq!(
            texts(t),
            [
                "The parties agree that:",
                "Seller shall ship the goods",
                "Buyer shall pay",
                "Term",
                "This Agreement will expire in 2020."
            ]
        );
    }

    #[test]
    fn bullets() {
        let t = "Terms:\n- The buyer shall pay\n* The seller may audit\n\u{2022} Nobody shall sing.";
        assert_eq!(texts(t), ["Terms:", "The buyer shall pay", "The seller may audit", "Nobody shall sing."]);
        assert_eq!(texts("Fees - if any - shall be paid."), ["Fees - if any - shall be paid."]);
    }

    #[test]
    fn spans_are_ordered_and_match_text() {
        let t = "1. First one.  Second?\n\nThird; fourth!";
        let sentences = segment_sentences(t);
        let mut last = 0;
        for s in &sentences {
            assert!(s.span.0 >= last);
            assert_eq!(&t[s.span.0..s.span.1], s.text);
            last = s.span.1;
        }
        assert_eq!(sentences.len(), 4);
    }
}
