use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::ConflictLabel;

/// How per-class precision, recall and F are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Unweighted mean over all classes, including classes absent from the data.
    #[default]
    Macro,
    /// Mean weighted by true-class support.
    Weighted,
}

impl FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "macro" => Ok(Averaging::Macro),
            "weighted" => Ok(Averaging::Weighted),
            other => Err(format!("unknown averaging {other:?} (expected macro or weighted)")),
        }
    }
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Macro => "macro",
            Averaging::Weighted => "weighted",
        })
    }
}

/// Counts indexed `[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<ConflictLabel>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn support(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    pub fn predicted(&self, class: usize) -> usize {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1)
            .max(4);
        write!(f, "{:<10}", "true\\pred")?;
        for c in &self.classes {
            write!(f, " {:>width$}", c.short())?;
        }
        writeln!(f)?;
        for (c, row) in self.classes.iter().zip(&self.counts) {
            write!(f, "{:<10}", c.short())?;
            for n in row {
                write!(f, " {n:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn class_indices(
    y_true: &[ConflictLabel],
    y_pred: &[ConflictLabel],
    classes: &[ConflictLabel],
) -> Result<Vec<(usize, usize)>, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch { truth: y_true.len(), predicted: y_pred.len() });
    }
    if y_true.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    let index = |l: ConflictLabel| classes.iter().position(|&c| c == l).ok_or(EvalError::UnknownClass(l));
    y_true.iter().zip(y_pred).map(|(&t, &p)| Ok((index(t)?, index(p)?))).collect()
}

pub fn confusion(
    y_true: &[ConflictLabel],
    y_pred: &[ConflictLabel],
    classes: &[ConflictLabel],
) -> Result<ConfusionMatrix, EvalError> {
    let pairs = class_indices(y_true, y_pred, classes)?;
    let k = classes.len();
    let mut counts = vec![vec![0; k]; k];
    for (t, p) in pairs {
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { classes: classes.to_vec(), counts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: ConflictLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_confusion(cm: &ConfusionMatrix, averaging: Averaging) -> Self {
        let total = cm.total();
        let per_class: Vec<ClassMetrics> = cm
            .classes
            .iter()
            .enumerate()
            .map(|(i, &label)| {
                let tp = cm.counts[i][i];
                let precision = ratio(tp, cm.predicted(i));
                let recall = ratio(tp, cm.support(i));
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics { label, precision, recall, f1, support: cm.support(i) }
            })
            .collect();

        let average = |value: fn(&ClassMetrics) -> f64| -> f64 {
            match averaging {
                Averaging::Macro => per_class.iter().map(value).sum::<f64>() / per_class.len() as f64,
                Averaging::Weighted => {
                    per_class.iter().map(|c| value(c) * c.support as f64).sum::<f64>() / total as f64
                }
            }
        };
        Metrics {
            accuracy: ratio(cm.trace(), total),
            precision: average(|c| c.precision),
            recall: average(|c| c.recall),
            f1: average(|c| c.f1),
            averaging,
            per_class,
        }
    }
}

pub fn compute_metrics(
    y_true: &[ConflictLabel],
    y_pred: &[ConflictLabel],
    classes: &[ConflictLabel],
    averaging: Averaging,
) -> Result<Metrics, EvalError> {
    let cm = confusion(y_true, y_pred, classes)?;
    Ok(Metrics::from_confusion(&cm, averaging))
}
