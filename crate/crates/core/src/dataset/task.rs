use super::table::FeatureTable;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::AgeGroup;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

/// The five binary age-group comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    YYvsEY,
    EYvsEF,
    EFvsEE,
    YYvsEE,
    EYvsEE,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::YYvsEY, Task::EYvsEF, Task::EFvsEE, Task::YYvsEE, Task::EYvsEE];

    pub fn groups(self) -> (AgeGroup, AgeGroup) {
        use AgeGroup::*;
        match self {
            Task::YYvsEY => (YY, EY),
            Task::EYvsEF => (EY, EF),
            Task::EFvsEE => (EF, EE),
            Task::YYvsEE => (YY, EE),
            Task::EYvsEE => (EY, EE),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::YYvsEY => "YYvsEY",
            Task::EYvsEF => "EYvsEF",
            Task::EFvsEE => "EFvsEE",
            Task::YYvsEE => "YYvsEE",
            Task::EYvsEE => "EYvsEE",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown task {s:?}")))
    }
}

/// Median imputation followed by min–max scaling, fitted on a set of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler<T> {
    pub medians: Vec<T>,
    /// Per-feature `(min, max)` after imputation.
    pub norm_params: Vec<(T, T)>,
}

fn median<T: Real>(mut v: Vec<T>) -> Option<T> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite feature values"));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0) })
}

impl<T: Real> Scaler<T> {
    /// A column with no observed values imputes to zero.
    pub fn fit(rows: &[&[Option<T>]]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: r.len() });
        }
        let mut medians = Vec::with_capacity(d);
        let mut norm_params = Vec::with_capacity(d);
        for j in 0..d {
            let observed: Vec<T> = rows.iter().filter_map(|r| r[j]).collect();
            let med = median(observed).unwrap_or(T::zero());
            let (lo, hi) = rows
                .iter()
                .map(|r| r[j].unwrap_or(med))
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
            medians.push(med);
            norm_params.push(if rows.is_empty() { (T::zero(), T::zero()) } else { (lo, hi) });
        }
        Ok(Scaler { medians, norm_params })
    }

    /// Values outside the fitted range map outside `[0, 1]`; constant columns map
    /// to 0.
    pub fn transform(&self, row: &[Option<T>]) -> Vec<T> {
        row.iter()
            .zip(&self.medians)
            .zip(&self.norm_params)
            .map(|((v, med), &(lo, hi))| {
                let v = v.unwrap_or(*med);
                if hi > lo {
                    (v - lo) / (hi - lo)
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    pub fn denormalize(&self, j: usize, z: T) -> T {
        let (lo, hi) = self.norm_params[j];
        lo + z * (hi - lo)
    }
}

/// Normalized binary dataset for one task. Label 1 is the older group.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset<T> {
    pub task: Task,
    pub table: super::TableKind,
    pub feature_names: Vec<String>,
    pub subject_ids: Vec<String>,
    /// Rows before imputation and scaling.
    pub raw: Vec<Vec<Option<T>>>,
    pub x: Vec<Vec<T>>,
    pub y: Vec<u8>,
    pub scaler: Scaler<T>,
    pub positive_class: AgeGroup,
    pub negative_class: AgeGroup,
}

impl<T: Real> TaskDataset<T> {
    pub fn n_samples(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn norm_params(&self) -> &[(T, T)] {
        &self.scaler.norm_params
    }

    /// `subject_id,label,<features>` with normalized values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["subject_id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for ((id, y), row) in self.subject_ids.iter().zip(&self.y).zip(&self.x) {
            let mut rec = vec![id.clone(), y.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "task": self.task.as_str(),
            "table": self.table.as_str(),
            "positive_class": self.positive_class.as_str(),
            "negative_class": self.negative_class.as_str(),
            "feature_names": self.feature_names,
            "norm_params": self.scaler.norm_params.iter().map(|(a, b)| [a.as_f64(), b.as_f64()]).collect::<Vec<_>>(),
            "medians": self.scaler.medians.iter().map(|v| v.as_f64()).collect::<Vec<_>>(),
            "n_samples": self.n_samples(),
        })
    }
}

pub fn make_task<T: Real>(table: &FeatureTable<T>, task: Task) -> Result<TaskDataset<T>> {
    make_task_for_groups(table, task.groups().0, task.groups().1).map(|mut d| {
        d.task = task;
        d
    })
}

/// Selects the rows of two groups, imputes and scales them on those rows.
pub fn make_task_for_groups<T: Real>(
    table: &FeatureTable<T>,
    younger: AgeGroup,
    older: AgeGroup,
) -> Result<TaskDataset<T>> {
    let task = Task::ALL
        .into_iter()
        .find(|t| t.groups() == (younger, older))
        .ok_or_else(|| Error::UnknownGroup(format!("{younger}vs{older}")))?;
    let mut rows: Vec<_> = table.rows.iter().filter(|r| r.group == younger || r.group == older).collect();
    rows.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    let n_old = rows.iter().filter(|r| r.group == older).count();
    let n_young = rows.len() - n_old;
    if n_old == 0 || n_young == 0 {
        return Err(Error::SingleClassInput);
    }
    if n_old < 2 || n_young < 2 {
        return Err(Error::TooFewSamples(format!("{task}: {n_young} {younger} and {n_old} {older} rows")));
    }
    let raw: Vec<Vec<Option<T>>> = rows.iter().map(|r| r.values.clone()).collect();
    let refs: Vec<&[Option<T>]> = raw.iter().map(|r| r.as_slice()).collect();
    let scaler = Scaler::fit(&refs)?;
    let x = raw.iter().map(|r| scaler.transform(r)).collect();
    Ok(TaskDataset {
        task,
        table: table.kind,
        feature_names: table.feature_names.clone(),
        subject_ids: rows.iter().map(|r| r.subject_id.clone()).collect(),
        raw,
        x,
        y: rows.iter().map(|r| u8::from(r.group == older)).collect(),
        scaler,
        positive_class: older,
        negative_class: younger,
    })
}
