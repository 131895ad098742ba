//! Detection and classification of normative conflicts between contract clauses.
//!
//! The pipeline reads contracts, extracts norm sentences by their deontic
//! modal phrases, embeds sentences as averaged word vectors, turns pairs of
//! embeddings into concatenation or offset features and trains a
//! Crammer-Singer multiclass linear SVM over the conflict typology:
//!
//! * `deontic-modality`: same action, different deontic meaning;
//! * `deontic-structure`: different deontic meaning expressed through a
//!   different sentence structure;
//! * `deontic-object`: same deontic meaning, conflicting action details;
//! * `object-conditional`: a condition in one norm conflicts with the
//!   action of the other.
//!
//! Pairs that do not conflict carry the `non-conflict` label.

pub mod classifier;
pub mod corpus;
pub mod embedding;
pub mod evaluation;
pub mod extract;
pub mod rng;
pub mod text;

pub use classifier::{LinearModel, Prediction, TrainConfig};
pub use corpus::{ConflictLabel, Contract, Dataset, DeonticMeaning, Norm, NormPair, Provenance};
pub use embedding::{FeatureMode, PairFeature, SentenceEmbedding, WordVectorStore};
pub use rng::SplitMix64;
