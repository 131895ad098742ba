//! Word vectors in the plain-text interchange format.
//!
//! Each line holds a token followed by `dim` real numbers separated by
//! spaces. An optional first line `count dim` declares the shape.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::EmbeddingError;

#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorStore {
    dim: usize,
    vocab: HashMap<String, Vec<f64>>,
    lowercase: bool,
    duplicates: usize,
}

impl WordVectorStore {
    /// Builds a store from `(token, vector)` entries. Later duplicates win.
    pub fn from_entries<I>(dim: usize, lowercase: bool, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut store = Self { dim, vocab: HashMap::new(), lowercase, duplicates: 0 };
        for (i, (token, vector)) in entries.into_iter().enumerate() {
            if vector.len() != dim {
                return Err(EmbeddingError::DimensionMismatch { line: i + 1, expected: dim, found: vector.len() });
            }
            store.insert(token, vector);
        }
        if store.vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        Ok(store)
    }

    fn insert(&mut self, token: String, vector: Vec<f64>) {
        let token = if self.lowercase { token.to_lowercase() } else { token };
        if self.vocab.insert(token, vector).is_some() {
            self.duplicates += 1;
        }
    }

    /// Parses the text format. With `lowercase`, tokens are lowercased on
    /// load and on lookup.
    pub fn from_reader<R: BufRead>(reader: R, lowercase: bool) -> Result<Self, EmbeddingError> {
        let mut dim: Option<usize> = None;
        let mut store = Self { dim: 0, vocab: HashMap::new(), lowercase, duplicates: 0 };
        let mut first = true;

        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let mut parts = line.split_whitespace();
            let Some(token) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();

            if first {
                first = false;
                if rest.len() == 1 {
                    if let (Ok(_), Ok(d)) = (token.parse::<usize>(), rest[0].parse::<usize>()) {
                        if d == 0 {
                            return Err(EmbeddingError::MalformedNumber { line: line_no });
                        }
                        dim = Some(d);
                        continue;
                    }
                }
            }

            let expected = *dim.get_or_insert(rest.len());
            if rest.len() != expected || expected == 0 {
                return Err(EmbeddingError::DimensionMismatch { line: line_no, expected, found: rest.len() });
            }
            let vector = rest
                .iter()
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or(EmbeddingError::MalformedNumber { line: line_no })?;
            store.insert(token.to_string(), vector);
        }

        if store.vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        store.dim = dim.unwrap_or(0);
        if store.duplicates > 0 {
            warn!("{} duplicate tokens in word vectors; the last occurrence was kept", store.duplicates);
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self, EmbeddingError> {
        Self::from_reader(BufReader::new(File::open(path)?), true)
    }

    /// Writes the store with a `count dim` header, tokens in sorted order.
    pub fn write_text<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        writeln!(w, "{} {}", self.vocab.len(), self.dim)?;
        let mut tokens: Vec<&String> = self.vocab.keys().collect();
        tokens.sort();
        for token in tokens {
            write!(w, "{token}")?;
            for x in &self.vocab[token] {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        self.write_text(File::create(path)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    /// Number of tokens that appeared more than once in the source.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        if self.lowercase {
            self.vocab.get(&token.to_lowercase()).map(Vec::as_slice)
        } else {
            self.vocab.get(token).map(Vec::as_slice)
        }
    }
}
