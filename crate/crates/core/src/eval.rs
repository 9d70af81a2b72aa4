//! Leave-one-out evaluation, confusion matrices, metrics and the final refit.

use crate::dataset::{Scaler, TableKind, Task, TaskDataset};
use crate::error::{Error, Result};
use crate::models::{
    predict_proba, train_gbdt, train_logreg, stratified_split, GbdtConfig, LogRegConfig, Model, ModelKind,
};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;

pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// A probability at or above `threshold` predicts class 1.
    pub fn from_predictions<T: Real>(probs: &[T], labels: &[u8], threshold: f64) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (p, y) in probs.iter().zip(labels) {
            match (p.as_f64() >= threshold, *y == 1) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fp += 1,
                (false, true) => cm.fn_ += 1,
                (false, false) => cm.tn += 1,
            }
        }
        cm
    }
}

/// Percentages; `None` where a denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

pub fn metrics_from_confusion(cm: &ConfusionMatrix) -> Metrics {
    let precision = pct(cm.tp, cm.tp + cm.fp);
    let recall = pct(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(_), Some(_)) if cm.tp > 0 => pct(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_),
        _ => None,
    };
    Metrics { accuracy: pct(cm.tp + cm.tn, cm.total()), precision, recall, f1 }
}

/// One-decimal rounding, half away from zero.
pub fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// Mann–Whitney AUC in percent, ties counted one half.
pub fn roc_auc<T: Real>(probs: &[T], labels: &[u8]) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(Error::MalformedInput(format!("{} scores but {} labels", probs.len(), labels.len())));
    }
    let n_pos = labels.iter().filter(|v| **v == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClassInput);
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[a].partial_cmp(&probs[b]).expect("finite scores"));
    // Twice the rank sum keeps tied average ranks integral.
    let mut rank_sum_x2 = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && probs[order[j + 1]] == probs[order[i]] {
            j += 1;
        }
        let avg_x2 = (i + 1) + (j + 1);
        rank_sum_x2 += avg_x2 * order[i..=j].iter().filter(|&&k| labels[k] == 1).count();
        i = j + 1;
    }
    let u_x2 = rank_sum_x2 - n_pos * (n_pos + 1);
    Ok(100.0 * (u_x2 as f64 / 2.0) / (n_pos * n_neg) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub logreg: LogRegConfig,
    pub gbdt: GbdtConfig,
    /// Refit imputation and scaling inside every training fold.
    pub fold_safe_scaling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePrediction {
    pub subject_id: String,
    pub label: u8,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub table: TableKind,
    pub model: ModelKind,
    pub per_sample: Vec<SamplePrediction>,
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub roc_auc: f64,
    /// Per-fold early-stopping rounds (boosted trees only).
    pub best_iterations: Vec<usize>,
    pub mean_best_iteration: Option<f64>,
}

pub const METRICS_HEADER: [&str; 9] =
    ["task", "dataset", "model", "accuracy", "precision", "recall", "f1", "roc_auc", "mean_best_iteration"];

impl EvalReport {
    pub fn metrics(&self) -> Metrics {
        Metrics { accuracy: self.accuracy, precision: self.precision, recall: self.recall, f1: self.f1 }
    }

    /// Row matching `METRICS_HEADER`, metrics at one decimal.
    pub fn csv_row(&self) -> Vec<String> {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{:.1}", round1(x)));
        vec![
            self.task.to_string(),
            self.table.to_string(),
            self.model.to_string(),
            fmt(self.accuracy),
            fmt(self.precision),
            fmt(self.recall),
            fmt(self.f1),
            fmt(Some(self.roc_auc)),
            self.mean_best_iteration.map_or_else(|| "NA".to_string(), |v| v.to_string()),
        ]
    }
}

pub fn write_metrics_csv<W: Write>(reports: &[EvalReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for r in reports {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Seed of a fold's inner validation split, tied to the held-out subject so that row
/// order does not matter.
pub fn fold_seed(seed: u64, subject_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(subject_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn train_fold<T: Real>(
    x: &[Vec<T>],
    y: &[u8],
    kind: ModelKind,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(Model<T>, Option<usize>)> {
    match kind {
        ModelKind::LogReg => Ok((Model::LogReg(train_logreg(x, y, &cfg.logreg)?), None)),
        ModelKind::Gbdt => {
            let (tr, va) = stratified_split(y, cfg.gbdt.inner_val_fraction, seed);
            let pick = |idx: &[usize]| -> (Vec<Vec<T>>, Vec<u8>) {
                (idx.iter().map(|&i| x[i].clone()).collect(), idx.iter().map(|&i| y[i]).collect())
            };
            let (xt, yt) = pick(&tr);
            let (xv, yv) = pick(&va);
            let validation = (!xv.is_empty()).then_some((xv.as_slice(), yv.as_slice()));
            let model = train_gbdt(&xt, &yt, &cfg.gbdt, validation)?;
            let best = model.best_iteration;
            Ok((Model::Gbdt(model), Some(best)))
        }
    }
}

/// Leave-one-out over the dataset's rows, taken in subject-id order.
pub fn loo_cv<T: Real>(ds: &TaskDataset<T>, kind: ModelKind, cfg: &TrainConfig) -> Result<EvalReport> {
    let n = ds.n_samples();
    if n < 4 {
        return Err(Error::TooFewSamples(format!("LOO needs at least 4 rows, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ds.subject_ids[a].cmp(&ds.subject_ids[b]));
    let y: Vec<u8> = order.iter().map(|&i| ds.y[i]).collect();
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::SingleClassInput);
    }
    let folds: Vec<(f64, Option<usize>)> = (0..n)
        .into_par_iter()
        .map(|held| {
            let train_idx: Vec<usize> = (0..n).filter(|&k| k != held).map(|k| order[k]).collect();
            let test_idx = order[held];
            let (xt, xh) = if cfg.fold_safe_scaling {
                let rows: Vec<&[Option<T>]> = train_idx.iter().map(|&i| ds.raw[i].as_slice()).collect();
                let scaler = Scaler::fit(&rows)?;
                (train_idx.iter().map(|&i| scaler.transform(&ds.raw[i])).collect::<Vec<_>>(), scaler.transform(&ds.raw[test_idx]))
            } else {
                (train_idx.iter().map(|&i| ds.x[i].clone()).collect(), ds.x[test_idx].clone())
            };
            let yt: Vec<u8> = train_idx.iter().map(|&i| ds.y[i]).collect();
            let seed = fold_seed(cfg.gbdt.seed, &ds.subject_ids[test_idx]);
            let (model, best) = train_fold(&xt, &yt, kind, cfg, seed)?;
            let p = predict_proba(&model, &[xh])?[0];
            Ok((p.as_f64(), best))
        })
        .collect::<Result<_>>()?;
    let probs: Vec<f64> = folds.iter().map(|f| f.0).collect();
    let best_iterations: Vec<usize> = folds.iter().filter_map(|f| f.1).collect();
    let confusion = ConfusionMatrix::from_predictions(&probs, &y, THRESHOLD);
    let metrics = metrics_from_confusion(&confusion);
    let mean_best_iteration = (!best_iterations.is_empty())
        .then(|| best_iterations.iter().sum::<usize>() as f64 / best_iterations.len() as f64);
    Ok(EvalReport {
        task: ds.task,
        table: ds.table,
        model: kind,
        per_sample: order
            .iter()
            .zip(&probs)
            .map(|(&i, &p)| SamplePrediction { subject_id: ds.subject_ids[i].clone(), label: ds.y[i], probability: p })
            .collect(),
        confusion,
        accuracy: metrics.accuracy,
        precision: metrics.precision,
        recall: metrics.recall,
        f1: metrics.f1,
        roc_auc: roc_auc(&probs, &y)?,
        best_iterations,
        mean_best_iteration,
    })
}

/// Round count for the final model: mean best iteration rounded half up, at least 1.
pub fn final_rounds(mean_best_iteration: f64) -> usize {
    ((mean_best_iteration + 0.5).floor() as usize).max(1)
}

/// Fits one model on every row, used only for explanation. Boosted trees train for
/// exactly `final_rounds(mean_best_iteration)` rounds without early stopping.
pub fn final_fit<T: Real>(
    ds: &TaskDataset<T>,
    kind: ModelKind,
    cfg: &TrainConfig,
    mean_best_iteration: Option<f64>,
) -> Result<Model<T>> {
    match kind {
        ModelKind::LogReg => Ok(Model::LogReg(train_logreg(&ds.x, &ds.y, &cfg.logreg)?)),
        ModelKind::Gbdt => {
            let rounds = final_rounds(mean_best_iteration.unwrap_or(cfg.gbdt.max_rounds as f64));
            let gcfg = GbdtConfig { max_rounds: rounds, ..cfg.gbdt };
            Ok(Model::Gbdt(train_gbdt(&ds.x, &ds.y, &gcfg, None)?))
        }
    }
}
