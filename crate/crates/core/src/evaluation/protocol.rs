//! Train/test split, balanced folds and cross-validation.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{compute_metrics, Averaging, Metrics};
use super::{EvalError, NegativeSampling, Task};
use crate::classifier::{predict, train, LinearModel, TrainConfig};
use crate::corpus::{ConflictLabel, NormPair};
use crate::embedding::PairFeature;
use crate::rng::SplitMix64;

/// Anything that carries a conflict label.
pub trait Labeled {
    fn label(&self) -> ConflictLabel;
}

impl Labeled for ConflictLabel {
    fn label(&self) -> ConflictLabel {
        *self
    }
}

impl Labeled for NormPair {
    fn label(&self) -> ConflictLabel {
        self.label
    }
}

/// A featurized pair ready for the classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: String,
    pub feature: PairFeature,
    pub label: ConflictLabel,
}

impl Labeled for Example {
    fn label(&self) -> ConflictLabel {
        self.label
    }
}

/// Indices into the split input, each list in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Classes with fewer than two members; they were kept in `train`.
    pub too_small: Vec<ConflictLabel>,
}

impl Split {
    pub fn select<T: Clone>(items: &[T], indices: &[usize]) -> Vec<T> {
        indices.iter().map(|&i| items[i].clone()).collect()
    }
}

fn members_by_class<T: Labeled>(items: &[T], indices: impl Iterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); ConflictLabel::ALL.len()];
    for i in indices {
        groups[items[i].label().index()].push(i);
    }
    groups
}

/// Stratified split. Each class with `n ≥ 2` members sends
/// `clamp(round(n · test_fraction), 1, n − 1)` of them, chosen by a seeded
/// shuffle, to the test side.
pub fn split_train_test<T: Labeled>(items: &[T], test_fraction: f64, seed: u64) -> Result<Split, EvalError> {
    if items.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::InvalidConfig(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut in_test = vec![false; items.len()];
    let mut too_small = Vec::new();
    for (class, mut members) in members_by_class(items, 0..items.len()).into_iter().enumerate() {
        let n = members.len();
        if n == 0 {
            continue;
        }
        if n < 2 {
            let label = ConflictLabel::ALL[class];
            warn!("class {label} has {n} member(s); cannot stratify, keeping it in train");
            too_small.push(label);
            continue;
        }
        let take = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        rng.shuffle(&mut members);
        for &i in &members[..take] {
            in_test[i] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..items.len()).partition(|&i| in_test[i]);
    Ok(Split { train, test, too_small })
}

/// Fold assignment over the indices of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Folds {
    pub folds: Vec<Vec<usize>>,
    /// Indices left out by balancing (or by the task), ascending.
    pub unused: Vec<usize>,
}

impl Folds {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// All indices except fold `f`, ascending.
    pub fn training_indices(&self, f: usize) -> Vec<usize> {
        let mut idx: Vec<usize> =
            self.folds.iter().enumerate().filter(|&(g, _)| g != f).flat_map(|(_, v)| v.iter().copied()).collect();
        idx.sort_unstable();
        idx
    }

    pub fn selected(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.folds.iter().flatten().copied().collect();
        idx.sort_unstable();
        idx
    }
}

/// Conflict indices stratified by type: each class shuffled, classes in
/// canonical order.
fn stratified_conflicts<T: Labeled>(items: &[T], rng: &mut SplitMix64) -> Vec<usize> {
    let mut groups = members_by_class(items, 0..items.len());
    let mut out = Vec::new();
    for (class, members) in groups.iter_mut().enumerate() {
        if ConflictLabel::ALL[class].is_conflict() {
            rng.shuffle(members);
            out.extend_from_slice(members);
        }
    }
    out
}

/// Builds `k` folds.
///
/// `TypeC`: conflicts are dealt round-robin from the stratified order, so
/// every fold gets each type in proportion; non-conflicts are unused.
///
/// `TypeCPlusNon` with [`NegativeSampling::MatchConflicts`]: non-conflicts
/// are downsampled (seeded, without replacement) to the number of conflicts
/// and every fold receives exactly as many non-conflicts as conflicts. When
/// non-conflicts are the minority, conflicts are downsampled instead. With
/// [`NegativeSampling::Fixed`], that many non-conflicts are dealt round-robin.
pub fn make_folds<T: Labeled>(
    items: &[T],
    task: Task,
    k: usize,
    negatives: NegativeSampling,
    seed: u64,
) -> Result<Folds, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidConfig(format!("k = {k}; at least 2 folds are needed")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut conflicts = stratified_conflicts(items, &mut rng);
    let mut negatives_pool: Vec<usize> = (0..items.len()).filter(|&i| !items[i].label().is_conflict()).collect();
    let mut folds = vec![Vec::new(); k];

    match task {
        Task::TypeC => {
            if conflicts.len() < k {
                return Err(EvalError::InsufficientData(format!("{} conflicts for {k} folds", conflicts.len())));
            }
            for (p, &i) in conflicts.iter().enumerate() {
                folds[p % k].push(i);
            }
        }
        Task::TypeCPlusNon => {
            if conflicts.len() < k || negatives_pool.len() < k {
                return Err(EvalError::InsufficientData(format!(
                    "{} conflicts and {} non-conflicts for {k} folds",
                    conflicts.len(),
                    negatives_pool.len()
                )));
            }
            rng.shuffle(&mut negatives_pool);
            match negatives {
                NegativeSampling::MatchConflicts => {
                    if negatives_pool.len() < conflicts.len() {
                        let mut keep = conflicts.clone();
                        rng.shuffle(&mut keep);
                        keep.truncate(negatives_pool.len());
                        let keep: std::collections::HashSet<usize> = keep.into_iter().collect();
                        conflicts.retain(|i| keep.contains(i));
                    }
                    for (p, &i) in conflicts.iter().enumerate() {
                        folds[p % k].push(i);
                    }
                    for (p, &i) in negatives_pool[..conflicts.len()].iter().enumerate() {
                        folds[p % k].push(i);
                    }
                }
                NegativeSampling::Fixed(n) => {
                    if n < k {
                        return Err(EvalError::InvalidConfig(format!("{n} negatives for {k} folds")));
                    }
                    for (p, &i) in conflicts.iter().enumerate() {
                        folds[p % k].push(i);
                    }
                    for (p, &i) in negatives_pool.iter().take(n).enumerate() {
                        folds[p % k].push(i);
                    }
                }
            }
        }
    }

    for fold in &mut folds {
        fold.sort_unstable();
    }
    let mut used = vec![false; items.len()];
    folds.iter().flatten().for_each(|&i| used[i] = true);
    let unused = (0..items.len()).filter(|&i| !used[i]).collect();
    Ok(Folds { folds, unused })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub fold_metrics: Vec<Metrics>,
    pub best_fold: usize,
    /// The model trained on every fold except `best_fold`.
    pub model: LinearModel,
}

/// Index of the highest score; ties go to the lowest index.
pub fn best_index(scores: &[f64]) -> usize {
    crate::classifier::argmax(scores)
}

pub fn evaluate_model(
    model: &LinearModel,
    examples: &[Example],
    averaging: Averaging,
) -> Result<(Metrics, Vec<ConflictLabel>), EvalError> {
    let y_pred = examples
        .iter()
        .map(|e| predict(model, &e.feature).map(|p| p.label))
        .collect::<Result<Vec<_>, _>>()?;
    let y_true: Vec<ConflictLabel> = examples.iter().map(|e| e.label).collect();
    Ok((compute_metrics(&y_true, &y_pred, &model.classes, averaging)?, y_pred))
}

/// Trains on `k − 1` folds and validates on the remaining one, for every
/// fold. Fold `f` trains with seed `config.seed ^ f`. Folds run in parallel;
/// results do not depend on the schedule.
pub fn cross_validate(
    examples: &[Example],
    folds: &Folds,
    classes: &[ConflictLabel],
    config: &TrainConfig,
    averaging: Averaging,
) -> Result<CrossValidation, EvalError> {
    let results: Vec<(Metrics, LinearModel)> = (0..folds.k())
        .into_par_iter()
        .map(|f| {
            let train_idx = folds.training_indices(f);
            let features: Vec<PairFeature> = train_idx.iter().map(|&i| examples[i].feature.clone()).collect();
            let labels: Vec<ConflictLabel> = train_idx.iter().map(|&i| examples[i].label).collect();
            let fold_config =
                TrainConfig { seed: config.seed ^ f as u64, classes: Some(classes.to_vec()), ..config.clone() };
            let model = train(&features, &labels, &fold_config)?;
            let validation = Split::select(examples, &folds.folds[f]);
            let (metrics, _) = evaluate_model(&model, &validation, averaging)?;
            Ok((metrics, model))
        })
        .collect::<Result<_, EvalError>>()?;

    let scores: Vec<f64> = results.iter().map(|(m, _)| m.f1).collect();
    let best_fold = best_index(&scores);
    let (fold_metrics, mut models): (Vec<Metrics>, Vec<LinearModel>) = results.into_iter().unzip();
    let model = models.swap_remove(best_fold);
    Ok(CrossValidation { fold_metrics, best_fold, model })
}
