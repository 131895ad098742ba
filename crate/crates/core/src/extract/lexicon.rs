use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::corpus::DeonticMeaning;
use crate::text::tokenize;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("lexicon has no phrase for {0}")]
    MissingMeaning(DeonticMeaning),
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub phrase: Vec<String>,
    pub meaning: DeonticMeaning,
}

/// Modal phrases and negators used to spot norm sentences.
///
/// Entries are kept sorted by phrase length (longest first, stable), so a
/// scan that takes the first matching entry at a position always prefers
/// `shall not` over `shall`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalLexicon {
    entries: Vec<LexiconEntry>,
    negators: BTreeSet<String>,
}

const DEFAULT_PHRASES: &[(&str, DeonticMeaning)] = &[
    ("shall", DeonticMeaning::Obligation),
    ("must", DeonticMeaning::Obligation),
    ("will", DeonticMeaning::Obligation),
    ("ought", DeonticMeaning::Obligation),
    ("ought to", DeonticMeaning::Obligation),
    ("is required to", DeonticMeaning::Obligation),
    ("may", DeonticMeaning::Permission),
    ("can", DeonticMeaning::Permission),
    ("is entitled to", DeonticMeaning::Permission),
    ("shall not", DeonticMeaning::Prohibition),
    ("must not", DeonticMeaning::Prohibition),
    ("may not", DeonticMeaning::Prohibition),
    ("will not", DeonticMeaning::Prohibition),
    ("cannot", DeonticMeaning::Prohibition),
    ("is prohibited from", DeonticMeaning::Prohibition),
];

const DEFAULT_NEGATORS: &[&str] = &["not", "never", "no"];

impl Default for ModalLexicon {
    fn default() -> Self {
        let entries = DEFAULT_PHRASES
            .iter()
            .map(|&(p, meaning)| LexiconEntry { phrase: tokenize(p), meaning })
            .collect();
        let negators = DEFAULT_NEGATORS.iter().map(|s| s.to_string()).collect();
        Self::new(entries, negators).expect("default lexicon covers every meaning")
    }
}

impl ModalLexicon {
    pub fn new(mut entries: Vec<LexiconEntry>, negators: BTreeSet<String>) -> Result<Self, LexiconError> {
        for meaning in DeonticMeaning::ALL {
            if !entries.iter().any(|e| e.meaning == meaning) {
                return Err(LexiconError::MissingMeaning(meaning));
            }
        }
        entries.sort_by_key(|e| std::cmp::Reverse(e.phrase.len()));
        Ok(Self { entries, negators })
    }

    /// Reads `phrase<TAB>meaning` lines. `meaning` is `obligation`,
    /// `permission`, `prohibition` or `negator`; `#` starts a comment line.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut negators = BTreeSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let malformed = |reason: String| LexiconError::Malformed { line: i + 1, reason };
            let (phrase, meaning) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected phrase<TAB>meaning".into()))?;
            let phrase = tokenize(phrase);
            if phrase.is_empty() {
                return Err(malformed("empty phrase".into()));
            }
            if meaning.trim().eq_ignore_ascii_case("negator") {
                if phrase.len() != 1 {
                    return Err(malformed("negators must be single tokens".into()));
                }
                negators.extend(phrase);
            } else {
                let meaning = meaning.parse::<DeonticMeaning>().map_err(malformed)?;
                entries.push(LexiconEntry { phrase, meaning });
            }
        }
        Self::new(entries, negators)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn negators(&self) -> impl Iterator<Item = &str> {
        self.negators.iter().map(String::as_str)
    }
}
