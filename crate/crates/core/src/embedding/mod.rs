//! Sentence embeddings as averaged word vectors, and pair features.
//!
//! A sentence embedding is the mean of the vectors of its retained tokens.
//! Pairs of embeddings become either the concatenation `[e1 ‖ e2]` (length
//! `2d`) or the offset `e1 − e2` (length `d`).

mod cache;
mod store;

pub use cache::{read_pair_cache, write_pair_cache, CachedFeature};
pub use store::WordVectorStore;

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::text::tokenize;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("word vector file has no entries")]
    EmptyVocabulary,
    #[error("line {line}: malformed number")]
    MalformedNumber { line: usize },
    #[error("no embeddable tokens in {0:?}")]
    NoEmbeddableTokens(String),
    #[error("embedding dimensions differ: {0} vs {1}")]
    PairDimensionMismatch(usize, usize),
    #[error("conflict offset needs at least one pair")]
    EmptyPairSet,
    #[error("subsampling probability {0} is outside [0, 1)")]
    InvalidSubsampleProb(f64),
    #[error("malformed cache record on line {line}: {reason}")]
    MalformedCache { line: usize, reason: String },
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
}

/// What to do with tokens that have no vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownPolicy {
    /// Ignore the token entirely; it does not count in the denominator.
    #[default]
    Skip,
    /// Treat the token as a zero vector that still counts in the denominator.
    ZeroVector,
}

impl FromStr for UnknownPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip" => Ok(UnknownPolicy::Skip),
            "zero" | "zero-vector" => Ok(UnknownPolicy::ZeroVector),
            other => Err(format!("unknown token policy {other:?} (expected skip or zero-vector)")),
        }
    }
}

impl fmt::Display for UnknownPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnknownPolicy::Skip => "skip",
            UnknownPolicy::ZeroVector => "zero-vector",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedOptions {
    pub unknown: UnknownPolicy,
    /// Per-token deletion probability in `[0, 1)`. Zero disables subsampling.
    pub subsample_prob: f64,
    pub seed: u64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        Self { unknown: UnknownPolicy::Skip, subsample_prob: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEmbedding {
    pub vector: Vec<f64>,
    /// Number of tokens averaged, after unknown-token handling and subsampling.
    pub token_count: usize,
}

impl SentenceEmbedding {
    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Concat,
    Offset,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Concat => "concat",
            FeatureMode::Offset => "offset",
        }
    }

    /// Feature length for sentence embeddings of dimension `dim`.
    pub fn feature_len(self, dim: usize) -> usize {
        match self {
            FeatureMode::Concat => 2 * dim,
            FeatureMode::Offset => dim,
        }
    }
}

impl FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "concat" => Ok(FeatureMode::Concat),
            "offset" => Ok(FeatureMode::Offset),
            other => Err(format!("unknown feature mode {other:?} (expected concat or offset)")),
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFeature {
    pub vector: Vec<f64>,
    pub mode: FeatureMode,
}

impl PairFeature {
    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }
}

/// Embeds with the default "skip" unknown-token policy.
pub fn embed_sentence(
    store: &WordVectorStore,
    sentence: &str,
    subsample_prob: f64,
    seed: u64,
) -> Result<SentenceEmbedding, EmbeddingError> {
    embed_sentence_with(store, sentence, &EmbedOptions { unknown: UnknownPolicy::Skip, subsample_prob, seed })
}

/// Mean of the token vectors of `sentence`.
///
/// Subsampling draws one `next_f64` per retained token, in sentence order,
/// from `SplitMix64::new(seed)`; a token is deleted when its draw is below
/// `subsample_prob`, unless it is the only token left.
pub fn embed_sentence_with(
    store: &WordVectorStore,
    sentence: &str,
    options: &EmbedOptions,
) -> Result<SentenceEmbedding, EmbeddingError> {
    let p = options.subsample_prob;
    if !(0.0..1.0).contains(&p) {
        return Err(EmbeddingError::InvalidSubsampleProb(p));
    }

    let retained: Vec<Option<&[f64]>> = tokenize(sentence)
        .iter()
        .filter_map(|t| match (store.get(t), options.unknown) {
            (Some(v), _) => Some(Some(v)),
            (None, UnknownPolicy::ZeroVector) => Some(None),
            (None, UnknownPolicy::Skip) => None,
        })
        .collect();
    if retained.is_empty() {
        return Err(EmbeddingError::NoEmbeddableTokens(sentence.to_string()));
    }

    let keep: Vec<bool> = if p > 0.0 {
        let mut rng = SplitMix64::new(options.seed);
        let mut remaining = retained.len();
        retained
            .iter()
            .map(|_| {
                let delete = rng.next_f64() < p && remaining > 1;
                if delete {
                    remaining -= 1;
                }
                !delete
            })
            .collect()
    } else {
        vec![true; retained.len()]
    };

    let mut sum = vec![0.0; store.dim()];
    let mut count = 0;
    for (v, _) in retained.iter().zip(&keep).filter(|(_, &k)| k) {
        if let Some(v) = v {
            for (s, x) in sum.iter_mut().zip(v.iter()) {
                *s += x;
            }
        }
        count += 1;
    }
    let n = count as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Ok(SentenceEmbedding { vector: sum, token_count: count })
}

fn check_dims(e1: &SentenceEmbedding, e2: &SentenceEmbedding) -> Result<(), EmbeddingError> {
    if e1.dim() != e2.dim() {
        return Err(EmbeddingError::PairDimensionMismatch(e1.dim(), e2.dim()));
    }
    Ok(())
}

pub fn pair_concat(e1: &SentenceEmbedding, e2: &SentenceEmbedding) -> Result<PairFeature, EmbeddingError> {
    check_dims(e1, e2)?;
    let mut vector = Vec::with_capacity(2 * e1.dim());
    vector.extend_from_slice(&e1.vector);
    vector.extend_from_slice(&e2.vector);
    Ok(PairFeature { vector, mode: FeatureMode::Concat })
}

pub fn pair_offset(e1: &SentenceEmbedding, e2: &SentenceEmbedding) -> Result<PairFeature, EmbeddingError> {
    check_dims(e1, e2)?;
    let vector = e1.vector.iter().zip(&e2.vector).map(|(a, b)| a - b).collect();
    Ok(PairFeature { vector, mode: FeatureMode::Offset })
}

pub fn pair_feature(
    e1: &SentenceEmbedding,
    e2: &SentenceEmbedding,
    mode: FeatureMode,
) -> Result<PairFeature, EmbeddingError> {
    match mode {
        FeatureMode::Concat => pair_concat(e1, e2),
        FeatureMode::Offset => pair_offset(e1, e2),
    }
}

/// Mean of `v1 − v2` over conflicting pairs.
///
/// A diagnostic aggregate; the classifier works on per-pair offsets.
pub fn conflict_offset(pairs: &[(SentenceEmbedding, SentenceEmbedding)]) -> Result<Vec<f64>, EmbeddingError> {
    let (first, _) = pairs.first().ok_or(EmbeddingError::EmptyPairSet)?;
    let dim = first.dim();
    let mut sum = vec![0.0; dim];
    for (a, b) in pairs {
        check_dims(a, first)?;
        check_dims(b, first)?;
        for ((s, x), y) in sum.iter_mut().zip(&a.vector).zip(&b.vector) {
            *s += x - y;
        }
    }
    let n = pairs.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}
