//! Primal stochastic subgradient training.
//!
//! Each epoch visits the samples in an order shuffled by the seeded
//! generator. A visit to sample `i` at global step `t` (1-based) applies
//!
//! ```text
//! η_t = scale · η₀ / (1 + λ t)
//! W  ← W (1 − η_t / n)                      (share of the L2 term)
//! if ℓ_i > 0:  w_{y_i} += η_t g x_i,  b_{y_i} += η_t g
//!              w_{r_i} −= η_t g x_i,  b_{r_i} −= η_t g
//! ```
//!
//! where `r_i` is the best wrong class and `g = 2Cℓ_i` (squared hinge) or
//! `g = C` (hinge). `J` is evaluated after every epoch; an epoch that raises
//! `J` is undone and `scale` is halved, so the recorded objective never
//! increases. Training stops after `max_epochs`, when an accepted epoch
//! improves `J` by less than `tolerance` relative to its previous value,
//! or when `scale` underflows `1e-12`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{margin, objective_of, problem, ClassifierError, LinearModel, Result};
use crate::corpus::ConflictLabel;
use crate::embedding::PairFeature;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    #[default]
    SquaredHinge,
    Hinge,
}

impl Loss {
    pub fn as_str(self) -> &'static str {
        match self {
            Loss::SquaredHinge => "squared-hinge",
            Loss::Hinge => "hinge",
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Loss {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "squared-hinge" => Ok(Loss::SquaredHinge),
            "hinge" => Ok(Loss::Hinge),
            other => Err(format!("unknown loss {other:?} (expected squared-hinge or hinge)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub loss: Loss,
    pub max_epochs: usize,
    pub tolerance: f64,
    /// Initial step size η₀.
    pub eta0: f64,
    /// Step decay λ in `η₀ / (1 + λ t)`.
    pub decay: f64,
    pub seed: u64,
    /// Model classes in order. `None` uses the labels present, in canonical order.
    pub classes: Option<Vec<ConflictLabel>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            loss: Loss::SquaredHinge,
            max_epochs: 1000,
            tolerance: 1e-4,
            eta0: 0.1,
            decay: 1e-3,
            seed: 42,
            classes: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ClassifierError::InvalidConfig(msg.to_string()));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("C must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return bad("eta0 must be positive");
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return bad("decay must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    /// `J` before training followed by `J` at the end of every epoch.
    pub objective_history: Vec<f64>,
    pub epochs: usize,
    pub rejected_epochs: usize,
    pub converged: bool,
}

pub fn train(features: &[PairFeature], labels: &[ConflictLabel], config: &TrainConfig) -> Result<LinearModel> {
    train_with_report(features, labels, config).map(|(m, _)| m)
}

pub fn train_with_report(
    features: &[PairFeature],
    labels: &[ConflictLabel],
    config: &TrainConfig,
) -> Result<(LinearModel, TrainReport)> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch { features: features.len(), labels: labels.len() });
    }
    let mut present: Vec<ConflictLabel> = labels.to_vec();
    present.sort();
    present.dedup();
    if present.len() < 2 {
        return Err(ClassifierError::DegenerateData);
    }
    let classes = match &config.classes {
        Some(c) => {
            let mut seen = c.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != c.len() {
                return Err(ClassifierError::InvalidConfig("duplicate classes".into()));
            }
            c.clone()
        }
        None => present,
    };
    let first = &features[0];
    let mut model = LinearModel::zeros(classes, first.len(), first.mode);
    let p = problem(&model, features, labels)?;

    let n = p.xs.len();
    let n_f = n as f64;
    let dim = model.dim;
    let mut rng = SplitMix64::new(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut scores = vec![0.0; model.num_classes()];

    let mut current = objective_of(&model, &p, config);
    let mut history = vec![current];
    let mut scale = 1.0;
    let mut step: u64 = 0;
    let mut rejected = 0;
    let mut converged = false;
    let mut epochs = 0;

    while epochs < config.max_epochs {
        epochs += 1;
        let saved = (model.weights.clone(), model.biases.clone(), step);
        rng.shuffle(&mut order);

        for &i in &order {
            step += 1;
            let eta = scale * config.eta0 / (1.0 + config.decay * step as f64);
            let shrink = 1.0 - eta / n_f;
            model.weights.iter_mut().for_each(|w| *w *= shrink);

            let x = p.xs[i];
            let y = p.ys[i];
            model.scores_into(x, &mut scores);
            let (m, r) = margin(&scores, y);
            let l = 1.0 - m;
            if l <= 0.0 {
                continue;
            }
            let g = match config.loss {
                Loss::SquaredHinge => 2.0 * config.c * l,
                Loss::Hinge => config.c,
            };
            let step_size = eta * g;
            for (j, xj) in x.iter().enumerate() {
                model.weights[y * dim + j] += step_size * xj;
                model.weights[r * dim + j] -= step_size * xj;
            }
            model.biases[y] += step_size;
            model.biases[r] -= step_size;
        }

        let next = objective_of(&model, &p, config);
        if !(next <= current) {
            model.weights = saved.0;
            model.biases = saved.1;
            step = saved.2;
            scale *= 0.5;
            rejected += 1;
            history.push(current);
            if scale < 1e-12 {
                converged = true;
                break;
            }
            continue;
        }
        let improvement = current - next;
        let relative = if current > 0.0 { improvement / current } else { 0.0 };
        current = next;
        history.push(current);
        if relative < config.tolerance {
            converged = true;
            break;
        }
    }

    let report = TrainReport { objective_history: history, epochs, rejected_epochs: rejected, converged };
    Ok((model, report))
}
