//! Single experiments and the {TypeC+Non, TypeC} × {Offset, Concat} grid.

use std::collections::HashMap;
use std::fmt::Write as _;

use log::{info, warn};
use serde::Serialize;

use super::metrics::{confusion, Averaging, ConfusionMatrix, Metrics};
use super::protocol::{cross_validate, evaluate_model, make_folds, split_train_test, Example, Split};
use super::{EvalError, ExperimentConfig, NegativeSampling, Task};
use crate::classifier::TrainConfig;
use crate::corpus::{ConflictLabel, Dataset, NormPair};
use crate::embedding::{embed_sentence_with, pair_feature, EmbedOptions, EmbeddingError, FeatureMode, SentenceEmbedding, WordVectorStore};
use crate::rng::derive_seed;

/// Stream tags passed to [`derive_seed`] for the train/test split and the folds.
pub const SPLIT_STREAM: u64 = 1;
pub const FOLD_STREAM: u64 = 2;

/// Featurized pairs plus the ids of pairs that could not be embedded.
#[derive(Debug, Clone, PartialEq)]
pub struct Featurized {
    pub examples: Vec<Example>,
    pub skipped: Vec<String>,
}

type Embedded<'a> = (&'a NormPair, SentenceEmbedding, SentenceEmbedding);

/// Embeds both sides of every pair, each distinct sentence once. Pairs with
/// a side that has no known token are skipped.
fn embed_pairs<'a>(
    dataset: &'a Dataset,
    store: &WordVectorStore,
    options: &EmbedOptions,
) -> Result<(Vec<Embedded<'a>>, Vec<String>), EvalError> {
    let mut cache: HashMap<&str, Option<SentenceEmbedding>> = HashMap::new();
    let mut embed = |text: &'a str| -> Result<Option<SentenceEmbedding>, EvalError> {
        if let Some(e) = cache.get(text) {
            return Ok(e.clone());
        }
        let e = match embed_sentence_with(store, text, options) {
            Ok(e) => Some(e),
            Err(EmbeddingError::NoEmbeddableTokens(_)) => None,
            Err(other) => return Err(other.into()),
        };
        cache.insert(text, e.clone());
        Ok(e)
    };
    let mut out = Vec::with_capacity(dataset.len());
    let mut skipped = Vec::new();
    for pair in &dataset.pairs {
        match (embed(&pair.norm1_text)?, embed(&pair.norm2_text)?) {
            (Some(a), Some(b)) => out.push((pair, a, b)),
            _ => skipped.push(pair.id.clone()),
        }
    }
    if !skipped.is_empty() {
        warn!("{} pair(s) have a norm without known tokens and were skipped", skipped.len());
    }
    Ok((out, skipped))
}

fn to_examples(embedded: &[Embedded<'_>], mode: FeatureMode) -> Result<Vec<Example>, EvalError> {
    embedded
        .iter()
        .map(|(pair, a, b)| {
            Ok(Example { id: pair.id.clone(), feature: pair_feature(a, b, mode)?, label: pair.label })
        })
        .collect()
}

pub fn featurize(
    dataset: &Dataset,
    store: &WordVectorStore,
    mode: FeatureMode,
    options: &EmbedOptions,
) -> Result<Featurized, EvalError> {
    let (embedded, skipped) = embed_pairs(dataset, store, options)?;
    Ok(Featurized { examples: to_examples(&embedded, mode)?, skipped })
}

/// Outcome of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub task: Task,
    pub feature_mode: FeatureMode,
    pub classes: Vec<ConflictLabel>,
    pub train_size: usize,
    pub test_size: usize,
    /// Training pairs left out of the folds by balancing.
    pub unused: usize,
    pub fold_metrics: Vec<Metrics>,
    pub best_fold: usize,
    pub test: Metrics,
    pub confusion: ConfusionMatrix,
}

impl CellReport {
    pub fn title(&self) -> String {
        let mode = match self.feature_mode {
            FeatureMode::Concat => "Concat",
            FeatureMode::Offset => "Offset",
        };
        format!("{} ({mode})", self.task.title())
    }
}

/// Split, balanced folds, cross-validation and test scoring for one task and
/// feature mode. `examples` must already carry features of `config.feature_mode`;
/// pairs outside the task are dropped.
pub fn run_experiment(examples: &[Example], config: &ExperimentConfig) -> Result<CellReport, EvalError> {
    config.validate()?;
    let selected: Vec<Example> = examples.iter().filter(|e| config.task.includes(e.label)).cloned().collect();
    if selected.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    if let Some(e) = selected.iter().find(|e| e.feature.mode != config.feature_mode) {
        return Err(EvalError::InvalidConfig(format!(
            "pair {} has {} features but the experiment uses {}",
            e.id, e.feature.mode, config.feature_mode
        )));
    }

    let split = split_train_test(&selected, config.test_fraction, derive_seed(config.seed, SPLIT_STREAM))?;
    let train = Split::select(&selected, &split.train);
    let test = Split::select(&selected, &split.test);
    let folds = make_folds(&train, config.task, config.k, config.negatives, derive_seed(config.seed, FOLD_STREAM))?;

    let classes = config.task.classes().to_vec();
    let train_config = TrainConfig { seed: config.seed, classes: Some(classes.clone()), ..config.train.clone() };
    let cv = cross_validate(&train, &folds, &classes, &train_config, config.averaging)?;

    let (test_metrics, y_pred) = evaluate_model(&cv.model, &test, config.averaging)?;
    let y_true: Vec<ConflictLabel> = test.iter().map(|e| e.label).collect();
    let cm = confusion(&y_true, &y_pred, &classes)?;
    info!(
        "{} {}: best fold {} of {}, test F {:.4}",
        config.task, config.feature_mode, cv.best_fold, config.k, test_metrics.f1
    );

    Ok(CellReport {
        task: config.task,
        feature_mode: config.feature_mode,
        classes,
        train_size: train.len(),
        test_size: test.len(),
        unused: folds.unused.len(),
        fold_metrics: cv.fold_metrics,
        best_fold: cv.best_fold,
        test: test_metrics,
        confusion: cm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub dataset: String,
    pub seed: u64,
    pub k: usize,
    pub test_fraction: f64,
    pub averaging: Averaging,
    pub negatives: NegativeSampling,
    pub pairs: usize,
    pub skipped_pairs: Vec<String>,
    pub cells: Vec<CellReport>,
}

impl GridReport {
    pub fn cell(&self, task: Task, mode: FeatureMode) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.task == task && c.feature_mode == mode)
    }

    /// The summary table: one row per cell with test A, P, R and F.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:<20} {:>6} {:>6} {:>6} {:>6}", "Experiment", "A", "P", "R", "F").unwrap();
        for c in &self.cells {
            let m = &c.test;
            writeln!(
                out,
                "{:<20} {:>6.3} {:>6.3} {:>6.3} {:>6.3}",
                c.title(),
                m.accuracy,
                m.precision,
                m.recall,
                m.f1
            )
            .unwrap();
        }
        out
    }

    /// Header, summary table, then per-cell fold scores and confusion grids.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dataset: {} ({} pairs, {} skipped)", self.dataset, self.pairs, self.skipped_pairs.len()).unwrap();
        writeln!(
            out,
            "seed: {}  k: {}  test fraction: {}  averaging: {}  negatives: {}",
            self.seed, self.k, self.test_fraction, self.averaging, self.negatives
        )
        .unwrap();
        out.push('\n');
        out.push_str(&self.render_table());
        for c in &self.cells {
            writeln!(out, "\n== {} ==", c.title()).unwrap();
            writeln!(out, "train {}  test {}  unused {}  best fold {}", c.train_size, c.test_size, c.unused, c.best_fold)
                .unwrap();
            let folds: Vec<String> = c.fold_metrics.iter().map(|m| format!("{:.3}", m.f1)).collect();
            writeln!(out, "fold F: {}", folds.join(" ")).unwrap();
            out.push_str(&c.confusion.to_string());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every requested task in both feature modes, Offset before Concat,
/// five-class task first. Sentences are embedded once for all cells.
pub fn run_experiment_grid(
    dataset: &Dataset,
    store: &WordVectorStore,
    base: &ExperimentConfig,
    tasks: &[Task],
    embed: &EmbedOptions,
) -> Result<GridReport, EvalError> {
    base.validate()?;
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let (embedded, skipped) = embed_pairs(dataset, store, embed)?;
    let mut cells = Vec::new();
    for task in Task::ALL.into_iter().filter(|t| tasks.contains(t)) {
        for mode in [FeatureMode::Offset, FeatureMode::Concat] {
            let examples = to_examples(&embedded, mode)?;
            let config = ExperimentConfig { task, feature_mode: mode, ..base.clone() };
            cells.push(run_experiment(&examples, &config)?);
        }
    }
    Ok(GridReport {
        dataset: dataset.name.clone(),
        seed: base.seed,
        k: base.k,
        test_fraction: base.test_fraction,
        averaging: base.averaging,
        negatives: base.negatives,
        pairs: dataset.len(),
        skipped_pairs: skipped,
        cells,
    })
}
