//! Crammer-Singer multiclass linear SVM.
//!
//! Each class `k` has a weight row `w_k` and an unregularized bias `b_k`;
//! the decision score is `s_k(x) = w_k·x + b_k`. Training minimizes
//!
//! ```text
//! J(W) = ½ Σ_k ‖w_k‖² + C Σ_i ℓ(m_i)^p
//! m_i  = s_{y_i}(x_i) − max_{r≠y_i} s_r(x_i)
//! ℓ(m) = max(0, 1 − m)
//! ```
//!
//! with `p = 2` for the squared hinge (default) and `p = 1` for the hinge.

mod io;
mod train;

pub use io::{load_model, read_model, save_model, write_model, MODEL_FORMAT_VERSION};
pub use train::{train, train_with_report, Loss, TrainConfig, TrainReport};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::ConflictLabel;
use crate::embedding::{FeatureMode, PairFeature};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training data has fewer than two distinct classes")]
    DegenerateData,
    #[error("feature length {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature mode {found} does not match model mode {expected}")]
    ModeMismatch { expected: FeatureMode, found: FeatureMode },
    #[error("{features} features but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("label {0} is not one of the model classes")]
    UnknownClass(ConflictLabel),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed model file: {0}")]
    MalformedModel(String),
    #[error("unsupported model format version {found:?}")]
    VersionMismatch { found: String },
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ClassifierError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub classes: Vec<ConflictLabel>,
    /// Row-major `classes.len() × dim`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub feature_mode: FeatureMode,
    /// Expected feature length (twice the embedding size for concatenation).
    pub dim: usize,
}

impl LinearModel {
    pub fn zeros(classes: Vec<ConflictLabel>, dim: usize, feature_mode: FeatureMode) -> Self {
        let k = classes.len();
        Self { classes, weights: vec![0.0; k * dim], biases: vec![0.0; k], feature_mode, dim }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.dim..(k + 1) * self.dim]
    }

    pub fn class_index(&self, label: ConflictLabel) -> Option<usize> {
        self.classes.iter().position(|&c| c == label)
    }

    fn check_feature(&self, feature: &PairFeature) -> Result<()> {
        if feature.mode != self.feature_mode {
            return Err(ClassifierError::ModeMismatch { expected: self.feature_mode, found: feature.mode });
        }
        if feature.len() != self.dim {
            return Err(ClassifierError::DimensionMismatch { expected: self.dim, found: feature.len() });
        }
        Ok(())
    }

    pub(crate) fn scores_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, s) in out.iter_mut().enumerate() {
            *s = dot(self.row(k), x) + self.biases[k];
        }
    }

    pub fn scores(&self, feature: &PairFeature) -> Result<Vec<f64>> {
        self.check_feature(feature)?;
        let mut out = vec![0.0; self.num_classes()];
        self.scores_into(&feature.vector, &mut out);
        Ok(out)
    }

    /// Regularization term `½ Σ_k ‖w_k‖²`.
    pub fn half_norm_sq(&self) -> f64 {
        0.5 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Softmax with max subtraction. Uncalibrated: a monotone normalization of
/// the decision scores, not a probability estimate.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: ConflictLabel,
    pub scores: Vec<f64>,
    pub confidence: Vec<f64>,
}

pub fn predict(model: &LinearModel, feature: &PairFeature) -> Result<Prediction> {
    let scores = model.scores(feature)?;
    let label = model.classes[argmax(&scores)];
    let confidence = softmax(&scores);
    Ok(Prediction { label, scores, confidence })
}

/// Validated training inputs: feature slices plus class indices.
pub(crate) struct Problem<'a> {
    pub xs: Vec<&'a [f64]>,
    pub ys: Vec<usize>,
}

pub(crate) fn problem<'a>(
    model: &LinearModel,
    features: &'a [PairFeature],
    labels: &[ConflictLabel],
) -> Result<Problem<'a>> {
    if features.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch { features: features.len(), labels: labels.len() });
    }
    let mut xs = Vec::with_capacity(features.len());
    let mut ys = Vec::with_capacity(labels.len());
    for (f, &l) in features.iter().zip(labels) {
        model.check_feature(f)?;
        xs.push(f.vector.as_slice());
        ys.push(model.class_index(l).ok_or(ClassifierError::UnknownClass(l))?);
    }
    Ok(Problem { xs, ys })
}

/// Margin of a score vector for true class `y`, and the best wrong class.
pub(crate) fn margin(scores: &[f64], y: usize) -> (f64, usize) {
    let mut best = usize::MAX;
    for r in 0..scores.len() {
        if r != y && (best == usize::MAX || scores[r] > scores[best]) {
            best = r;
        }
    }
    (scores[y] - scores[best], best)
}

pub(crate) fn objective_of(model: &LinearModel, p: &Problem<'_>, config: &TrainConfig) -> f64 {
    let mut scores = vec![0.0; model.num_classes()];
    let mut loss = 0.0;
    for (x, &y) in p.xs.iter().zip(&p.ys) {
        model.scores_into(x, &mut scores);
        let (m, _) = margin(&scores, y);
        let l = (1.0 - m).max(0.0);
        loss += match config.loss {
            Loss::SquaredHinge => l * l,
            Loss::Hinge => l,
        };
    }
    model.half_norm_sq() + config.c * loss
}

/// `J(W)` for `model` on the given data.
pub fn objective(
    model: &LinearModel,
    features: &[PairFeature],
    labels: &[ConflictLabel],
    config: &TrainConfig,
) -> Result<f64> {
    let p = problem(model, features, labels)?;
    Ok(objective_of(model, &p, config))
}

/// Gradient of `J` with the same layout as the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Analytic (sub)gradient of `J`. Exact wherever the best wrong class is
/// unique and, for the plain hinge, no margin equals one.
pub fn gradient(
    model: &LinearModel,
    features: &[PairFeature],
    labels: &[ConflictLabel],
    config: &TrainConfig,
) -> Result<Gradient> {
    let p = problem(model, features, labels)?;
    let dim = model.dim;
    let mut g = Gradient { weights: model.weights.clone(), biases: vec![0.0; model.num_classes()] };
    let mut scores = vec![0.0; model.num_classes()];
    for (x, &y) in p.xs.iter().zip(&p.ys) {
        model.scores_into(x, &mut scores);
        let (m, r) = margin(&scores, y);
        let l = 1.0 - m;
        if l <= 0.0 {
            continue;
        }
        let coef = match config.loss {
            Loss::SquaredHinge => 2.0 * config.c * l,
            Loss::Hinge => config.c,
        };
        for (j, xj) in x.iter().enumerate() {
            g.weights[y * dim + j] -= coef * xj;
            g.weights[r * dim + j] += coef * xj;
        }
        g.biases[y] -= coef;
        g.biases[r] += coef;
    }
    Ok(g)
}
