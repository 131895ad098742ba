//! Deterministic synthetic corpus and word vectors.
//!
//! Conflicting pairs are built from templates per conflict type; non-conflict
//! pairs join two unrelated clauses. Each pair's sides are swapped with
//! probability one half, since a pair of norms has no inherent order.
//! Word vectors are derived from a hash of the token, so every run, on every
//! machine, sees the same vectors for the same seed.

use crate::corpus::{ConflictLabel, Dataset, NormPair, Provenance};
use crate::embedding::{EmbeddingError, WordVectorStore};
use crate::rng::{mix, SplitMix64};
use crate::text::tokenize;

/// Class counts of the reference corpus, in canonical label order.
pub const REFERENCE_COUNTS: [usize; 5] = [11_329, 97, 61, 30, 40];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticConfig {
    /// Pairs per class, in [`ConflictLabel::ALL`] order.
    pub counts: [usize; 5],
    pub seed: u64,
    pub swap_sides: bool,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self { counts: REFERENCE_COUNTS, seed: 42, swap_sides: true }
    }
}

const PARTIES: &[&str] = &[
    "The Seller",
    "The Buyer",
    "The Supplier",
    "The Contractor",
    "The Licensee",
    "The Licensor",
    "The Customer",
    "The Distributor",
    "The Lessee",
    "The Landlord",
    "The Company",
    "The Consultant",
];

/// (verb, past participle, object)
const ACTIONS: &[(&str, &str, &str)] = &[
    ("deliver", "delivered", "the goods"),
    ("pay", "paid", "the invoiced amount"),
    ("submit", "submitted", "the monthly report"),
    ("maintain", "maintained", "the insurance policy"),
    ("provide", "provided", "technical support"),
    ("return", "returned", "the confidential materials"),
    ("inspect", "inspected", "the premises"),
    ("disclose", "disclosed", "the source code"),
    ("assign", "assigned", "this agreement"),
    ("repair", "repaired", "the defective equipment"),
    ("publish", "published", "the test results"),
    ("store", "stored", "the customer records"),
    ("renew", "renewed", "the license"),
    ("audit", "audited", "the accounts"),
    ("ship", "shipped", "the replacement parts"),
    ("install", "installed", "the software"),
    ("amend", "amended", "the specifications"),
    ("redirect", "redirected", "the purchase orders"),
    ("sublease", "subleased", "the warehouse"),
    ("archive", "archived", "the project files"),
];

const TIMINGS: &[&str] = &[
    "during the term",
    "at its own expense",
    "upon request",
    "after acceptance",
    "on a quarterly basis",
    "before the closing date",
    "without delay",
    "at the end of each year",
];

/// Modals for ordinary clauses, mostly affirmative.
const BASE_MODALS: &[&str] = &["shall", "shall", "must", "will", "agrees to", "may", "shall", "must not"];

/// (affirmative, contradicting) modal phrases for modality conflicts.
const MODAL_SWAPS: &[(&str, &str)] = &[
    ("shall", "shall not"),
    ("shall", "may not"),
    ("must", "must not"),
    ("may", "shall not"),
    ("will", "is prohibited to"),
    ("is required to", "may not"),
    ("shall", "is not permitted to"),
];

const CONDITIONS: &[&str] = &[
    "Only if previously agreed,",
    "Unless otherwise agreed in writing,",
    "Subject to prior written approval,",
    "Provided that the fees have been paid,",
    "Only upon written request,",
    "If the other party so consents,",
];

const NUMBERS: &[&str] = &["five", "ten", "fifteen", "thirty", "forty", "sixty", "ninety", "hundred"];

const PLACES: &[&str] = &["Boston", "Chicago", "Denver", "Houston", "Seattle", "Atlanta"];

fn pick<'a, T>(rng: &mut SplitMix64, items: &'a [T]) -> &'a T {
    &items[rng.next_below(items.len())]
}

/// Two distinct entries.
fn pick_two<'a, T>(rng: &mut SplitMix64, items: &'a [T]) -> (&'a T, &'a T) {
    let i = rng.next_below(items.len());
    let j = (i + 1 + rng.next_below(items.len() - 1)) % items.len();
    (&items[i], &items[j])
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn upper_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn clause(party: &str, modal: &str, verb: &str, object: &str, tail: &str) -> String {
    if tail.is_empty() {
        format!("{party} {modal} {verb} {object}.")
    } else {
        format!("{party} {modal} {verb} {object} {tail}.")
    }
}

fn base_clause(rng: &mut SplitMix64) -> String {
    let party = pick(rng, PARTIES);
    let modal = pick(rng, BASE_MODALS);
    let (verb, _, object) = pick(rng, ACTIONS);
    clause(party, modal, verb, object, pick(rng, TIMINGS))
}

/// Same action under contradicting modals, in active or passive voice.
fn modality_pair(rng: &mut SplitMix64) -> (String, String) {
    let party = pick(rng, PARTIES);
    let (verb, pp, object) = pick(rng, ACTIONS);
    let (yes, no) = pick(rng, MODAL_SWAPS);
    let tail = pick(rng, TIMINGS);
    if rng.next_below(2) == 0 {
        (clause(party, yes, verb, object, tail), clause(party, no, verb, object, tail))
    } else {
        let by = format!("by {} {tail}", lower_first(party));
        (clause(&upper_first(object), yes, "be", pp, &by), clause(&upper_first(object), no, "be", pp, &by))
    }
}

fn structure_pair(rng: &mut SplitMix64) -> (String, String) {
    let party = pick(rng, PARTIES);
    let (verb, _, object) = pick(rng, ACTIONS);
    let tail = pick(rng, TIMINGS);
    let first = clause(party, pick(rng, &["shall", "must", "will"]), verb, object, tail);
    let second = match rng.next_below(4) {
        0 => format!("{party} is exempt from any duty to {verb} {object}."),
        1 => format!("{party} is under no obligation to {verb} {object}."),
        2 => format!("Nothing in this agreement requires {} to {verb} {object}.", lower_first(party)),
        _ => format!("No request to {verb} {object} shall be binding on {}.", lower_first(party)),
    };
    (first, second)
}

fn object_pair(rng: &mut SplitMix64) -> (String, String) {
    let party = pick(rng, PARTIES);
    let modal = pick(rng, &["shall", "must", "will", "agrees to"]);
    let (verb, _, object) = pick(rng, ACTIONS);
    let (a, b) = match rng.next_below(3) {
        0 => {
            let (x, y) = pick_two(rng, NUMBERS);
            (format!("within {x} days"), format!("within {y} days"))
        }
        1 => {
            let (x, y) = pick_two(rng, NUMBERS);
            (format!("in batches of {x} units"), format!("in batches of {y} units"))
        }
        _ => {
            let (x, y) = pick_two(rng, PLACES);
            (format!("at the {x} facility"), format!("at the {y} facility"))
        }
    };
    (clause(party, modal, verb, object, &a), clause(party, modal, verb, object, &b))
}

fn conditional_pair(rng: &mut SplitMix64) -> (String, String) {
    let party = pick(rng, PARTIES);
    let modal = pick(rng, &["shall", "must", "may", "will"]);
    let (verb, _, object) = pick(rng, ACTIONS);
    let tail = pick(rng, TIMINGS);
    let plain = clause(party, modal, verb, object, tail);
    let conditional = format!("{} {}", pick(rng, CONDITIONS), lower_first(&plain));
    (plain, conditional)
}

fn non_conflict_pair(rng: &mut SplitMix64) -> (String, String) {
    loop {
        let (a, b) = (base_clause(rng), base_clause(rng));
        if a != b {
            return (a, b);
        }
    }
}

/// Generates a labelled corpus with the configured class counts.
///
/// Ids are `syn-<short label>-<n>`; pairs appear class by class in
/// canonical order.
pub fn generate_corpus(config: &SyntheticConfig) -> Dataset {
    let mut rng = SplitMix64::new(config.seed);
    let mut pairs = Vec::with_capacity(config.counts.iter().sum());
    for (label, &count) in ConflictLabel::ALL.iter().zip(&config.counts) {
        for n in 0..count {
            let (mut a, mut b) = match label {
                ConflictLabel::NonConflict => non_conflict_pair(&mut rng),
                ConflictLabel::DeonticModality => modality_pair(&mut rng),
                ConflictLabel::DeonticStructure => structure_pair(&mut rng),
                ConflictLabel::DeonticObject => object_pair(&mut rng),
                ConflictLabel::ObjectConditional => conditional_pair(&mut rng),
            };
            if config.swap_sides && rng.next_below(2) == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            let id = format!("syn-{}-{n:05}", label.short().to_lowercase());
            pairs.push(NormPair::new(id, a, b, *label, Provenance::Generated));
        }
    }
    Dataset::new("synthetic", pairs).expect("generated ids are unique")
}

/// FNV-1a over the token bytes.
fn token_hash(token: &str) -> u64 {
    token.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// The vector of `token`: `dim` draws uniform in `[-1, 1)` from a generator
/// seeded with the token hash mixed with `seed`.
pub fn token_vector(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(mix(token_hash(token) ^ seed));
    (0..dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

/// A store covering every token of `texts`.
pub fn synthetic_vectors<'a, I>(texts: I, dim: usize, seed: u64) -> Result<WordVectorStore, EmbeddingError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut vocab: Vec<String> = texts.into_iter().flat_map(tokenize).collect();
    vocab.sort();
    vocab.dedup();
    let entries = vocab.into_iter().map(|t| {
        let v = token_vector(&t, dim, seed);
        (t, v)
    });
    WordVectorStore::from_entries(dim, true, entries)
}

/// Vectors for every token in `dataset`.
pub fn vectors_for_dataset(dataset: &Dataset, dim: usize, seed: u64) -> Result<WordVectorStore, EmbeddingError> {
    synthetic_vectors(dataset.pairs.iter().flat_map(|p| [p.norm1_text.as_str(), p.norm2_text.as_str()]), dim, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::dataset_stats;

    #[test]
    fn reference_counts_and_proportions() {
        let d = generate_corpus(&SyntheticConfig::default());
        let s = dataset_stats(&d);
        for (label, &n) in ConflictLabel::ALL.iter().zip(&REFERENCE_COUNTS) {
            assert_eq!(s.count(*label), n);
        }
        for (l, published) in ConflictLabel::CONFLICTS.iter().zip([42.0, 27.0, 13.0, 18.0]) {
            assert!((s.fraction(*l) * 100.0 - published).abs() < 1.0);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let small = SyntheticConfig { counts: [20, 5, 5, 5, 5], seed: 7, swap_sides: true };
        assert_eq!(generate_corpus(&small), generate_corpus(&small));
        assert_ne!(generate_corpus(&small), generate_corpus(&SyntheticConfig { seed: 8, ..small.clone() }));
    }

    #[test]
    fn templates_have_their_markers() {
        let cfg = SyntheticConfig { counts: [0, 0, 0, 0, 30], seed: 1, swap_sides: false };
        for p in generate_corpus(&cfg).pairs {
            assert!(CONDITIONS.iter().any(|c| p.norm2_text.starts_with(c)), "{}", p.norm2_text);
            assert!(p.norm2_text.ends_with(&lower_first(&p.norm1_text)));
        }
    }

    #[test]
    fn vectors_cover_the_corpus_and_are_stable() {
        let cfg = SyntheticConfig { counts: [30, 10, 10, 10, 10], ..SyntheticConfig::default() };
        let d = generate_corpus(&cfg);
        let store = vectors_for_dataset(&d, 16, 3).unwrap();
        for p in &d.pairs {
            for t in tokenize(&p.norm1_text).iter().chain(&tokenize(&p.norm2_text)) {
                assert_eq!(store.get(t).unwrap(), token_vector(t, 16, 3).as_slice());
            }
        }
        assert!(token_vector("shall", 16, 3).iter().all(|x| (-1.0..1.0).contains(x)));
        assert_ne!(token_vector("shall", 16, 3), token_vector("shall", 16, 4));
    }
}
