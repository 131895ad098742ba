//! Experimental protocol: stratified train/test split, balanced k-fold
//! cross-validation with best-fold selection, test metrics and the
//! four-cell experiment grid.

mod grid;
mod metrics;
mod protocol;
pub mod synthetic;

pub use grid::{
    featurize, run_experiment, run_experiment_grid, CellReport, Featurized, GridReport, FOLD_STREAM, SPLIT_STREAM,
};
pub use metrics::{compute_metrics, confusion, Averaging, ClassMetrics, ConfusionMatrix, Metrics};
pub use protocol::{
    best_index, cross_validate, evaluate_model, make_folds, split_train_test, CrossValidation, Example, Folds,
    Labeled, Split,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{ClassifierError, TrainConfig};
use crate::corpus::{ConflictLabel, CorpusError};
use crate::embedding::{EmbeddingError, FeatureMode};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("no predictions to score")]
    EmptyPredictions,
    #[error("label {0} is not among the evaluated classes")]
    UnknownClass(ConflictLabel),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Which labels take part in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    /// Five classes: the four conflict types plus non-conflict.
    #[serde(rename = "typec+non")]
    TypeCPlusNon,
    /// The four conflict types only.
    #[serde(rename = "typec")]
    TypeC,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::TypeCPlusNon, Task::TypeC];

    pub fn classes(self) -> &'static [ConflictLabel] {
        match self {
            Task::TypeCPlusNon => &ConflictLabel::ALL,
            Task::TypeC => &ConflictLabel::CONFLICTS,
        }
    }

    pub fn includes(self, label: ConflictLabel) -> bool {
        self == Task::TypeCPlusNon || label.is_conflict()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::TypeCPlusNon => "typec+non",
            Task::TypeC => "typec",
        }
    }

    /// Row label used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Task::TypeCPlusNon => "TypeC+Non",
            Task::TypeC => "TypeC",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "typec+non" | "typec-plus-non" | "typecplusnon" => Ok(Task::TypeCPlusNon),
            "typec" | "typec-only" => Ok(Task::TypeC),
            other => Err(format!("unknown task {other:?} (expected typec+non or typec)")),
        }
    }
}

/// How many non-conflict pairs enter the folds of the five-class task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeSampling {
    /// As many non-conflicts as conflicts, fold by fold.
    #[default]
    MatchConflicts,
    Fixed(usize),
}

impl fmt::Display for NegativeSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegativeSampling::MatchConflicts => f.write_str("match-conflicts"),
            NegativeSampling::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for NegativeSampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "match-conflicts" {
            return Ok(NegativeSampling::MatchConflicts);
        }
        s.parse()
            .map(NegativeSampling::Fixed)
            .map_err(|_| format!("invalid negative sample size {s:?} (expected an integer or match-conflicts)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub feature_mode: FeatureMode,
    pub k: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub negatives: NegativeSampling,
    pub averaging: Averaging,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: Task::TypeCPlusNon,
            feature_mode: FeatureMode::Concat,
            k: 10,
            test_fraction: 0.2,
            seed: 42,
            negatives: NegativeSampling::MatchConflicts,
            averaging: Averaging::Macro,
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.k < 2 {
            return Err(EvalError::InvalidConfig(format!("k = {}; at least 2 folds are needed", self.k)));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(EvalError::InvalidConfig(format!("test fraction {} outside (0, 1)", self.test_fraction)));
        }
        self.train.validate()?;
        Ok(())
    }
}
