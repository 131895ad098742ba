//! Norm extraction: sentence segmentation, deontic modality detection and
//! candidate pair generation.
//!
//! A sentence counts as a norm when it contains a modal phrase from the
//! lexicon. Modal presence is a proxy; sentences that merely mention a modal
//! verb are extracted too.

mod lexicon;
mod segment;

pub use lexicon::{LexiconEntry, LexiconError, ModalLexicon};
pub use segment::{segment_sentences, Sentence};

use crate::corpus::{ConflictLabel, Contract, DeonticMeaning, Norm, NormPair, Provenance};
use crate::text::tokens;

/// How far after a modal phrase a negator still flips it to a prohibition.
const NEGATION_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModalMatch {
    pub meaning: DeonticMeaning,
    /// Byte range of the modal phrase in the sentence, including a flipping negator.
    pub span: (usize, usize),
}

/// Finds the leftmost modal phrase of `sentence`.
///
/// An obligation or permission phrase followed by a negator within two
/// tokens becomes a prohibition (`shall never`, `will assume no`). `may`
/// directly followed by a number is read as the month and skipped.
pub fn detect_modality(sentence: &str, lexicon: &ModalLexicon) -> Option<ModalMatch> {
    let toks = tokens(sentence);
    let lower: Vec<String> = toks.iter().map(|t| t.text.to_lowercase()).collect();

    for i in 0..lower.len() {
        for entry in lexicon.entries() {
            let n = entry.phrase.len();
            if i + n > lower.len() || lower[i..i + n] != entry.phrase[..] {
                continue;
            }
            if entry.phrase == ["may"] && lower.get(i + 1).is_some_and(|t| t.chars().all(|c| c.is_ascii_digit())) {
                continue;
            }
            let start = toks[i].start;
            let mut end = toks[i + n - 1].end;
            let mut meaning = entry.meaning;
            if meaning != DeonticMeaning::Prohibition {
                let window = (i + n)..(i + n + NEGATION_WINDOW).min(lower.len());
                if let Some(j) = window.into_iter().find(|&j| lexicon.is_negator(&lower[j])) {
                    meaning = DeonticMeaning::Prohibition;
                    end = toks[j].end;
                }
            }
            return Some(ModalMatch { meaning, span: (start, end) });
        }
    }
    None
}

/// One norm per sentence of the contract body that carries a modal phrase.
///
/// Norm ids are `<contract id>-n<ordinal>` with a zero-padded ordinal, so
/// they sort in document order.
pub fn extract_norms(contract: &Contract, lexicon: &ModalLexicon) -> Vec<Norm> {
    segment_sentences(&contract.body)
        .into_iter()
        .filter_map(|s| detect_modality(s.text, lexicon).map(|m| (s, m)))
        .enumerate()
        .map(|(i, (s, m))| Norm {
            id: format!("{}-n{:04}", contract.id, i + 1),
            contract_id: contract.id.clone(),
            text: s.text.to_string(),
            span: s.span,
            modality: Some(m.meaning),
            modal_span: Some(m.span),
            party: None,
            action: None,
            condition: None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScope {
    AllPairs,
    SameContract,
}

/// An unlabeled candidate pair of norms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePair {
    pub id: String,
    pub norm1_id: String,
    pub norm2_id: String,
    pub norm1_text: String,
    pub norm2_text: String,
}

impl CandidatePair {
    pub fn labeled(self, label: ConflictLabel) -> NormPair {
        NormPair::new(self.id, self.norm1_text, self.norm2_text, label, Provenance::Generated)
    }
}

/// Unordered pairs of distinct norms, ordered by (first id, second id).
pub fn generate_pairs(norms: &[Norm], scope: PairScope) -> Vec<CandidatePair> {
    let mut sorted: Vec<&Norm> = norms.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if scope == PairScope::SameContract && a.contract_id != b.contract_id {
                continue;
            }
            out.push(CandidatePair {
                id: format!("{}|{}", a.id, b.id),
                norm1_id: a.id.clone(),
                norm2_id: b.id.clone(),
                norm1_text: a.text.clone(),
                norm2_text: b.text.clone(),
            });
        }
    }
    out
}
