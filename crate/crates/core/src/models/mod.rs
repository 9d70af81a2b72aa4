//! Logistic regression and gradient-boosted trees for binary labels.

mod gbdt;
mod logreg;
mod saved;

pub use gbdt::{log_loss, stratified_split, train_gbdt, GbdtConfig, GbdtModel, Node, Tree};
pub use logreg::{logreg_objective, train_logreg, LogRegConfig, LogRegModel};
pub use saved::{load_model, save_model, SavedModel, MODEL_VERSION};

use crate::error::{Error, Result};
use crate::scalar::{sigmoid, Real};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    LogReg,
    Gbdt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::LogReg, ModelKind::Gbdt];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::LogReg => "logreg",
            ModelKind::Gbdt => "gbdt",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logreg" => Ok(ModelKind::LogReg),
            "gbdt" => Ok(ModelKind::Gbdt),
            other => Err(Error::ConfigInvalid(format!("unknown model {other:?}"))),
        }
    }
}

/// A raw (log-odds) score written as `offset + Σ parts`, where each part reads only
/// the features it lists.
pub trait AdditiveModel<T: Real>: Sync {
    fn n_features(&self) -> usize;
    fn offset(&self) -> T;
    fn n_parts(&self) -> usize;
    fn part_features(&self, k: usize) -> Vec<usize>;
    fn part_value(&self, k: usize, x: &[T]) -> T;

    fn raw_score(&self, x: &[T]) -> T {
        (0..self.n_parts()).fold(self.offset(), |acc, k| acc + self.part_value(k, x))
    }
}

fn check_dims<T>(x: &[Vec<T>], expected: usize) -> Result<()> {
    match x.iter().find(|r| r.len() != expected) {
        Some(r) => Err(Error::DimensionMismatch { expected, got: r.len() }),
        None => Ok(()),
    }
}

/// Class-1 probabilities.
pub fn predict_proba<T: Real, M: AdditiveModel<T> + ?Sized>(model: &M, x: &[Vec<T>]) -> Result<Vec<T>> {
    check_dims(x, model.n_features())?;
    Ok(x.iter().map(|r| sigmoid(model.raw_score(r))).collect())
}

pub(crate) fn check_training_data<T: Real>(x: &[Vec<T>], y: &[u8]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::MalformedInput(format!("{} rows but {} labels", x.len(), y.len())));
    }
    if let Some(v) = y.iter().find(|v| **v > 1) {
        return Err(Error::MalformedInput(format!("label {v} is not binary")));
    }
    let d = x.first().map_or(0, |r| r.len());
    check_dims(x, d)?;
    let pos = y.iter().filter(|v| **v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClassInput);
    }
    Ok(d)
}

/// Either trained model behind one interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[serde(bound = "T: Real")]
pub enum Model<T> {
    LogReg(LogRegModel<T>),
    Gbdt(GbdtModel<T>),
}

impl<T: Real> Model<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::LogReg(_) => ModelKind::LogReg,
            Model::Gbdt(_) => ModelKind::Gbdt,
        }
    }
}

impl<T: Real> AdditiveModel<T> for Model<T> {
    fn n_features(&self) -> usize {
        match self {
            Model::LogReg(m) => m.n_features(),
            Model::Gbdt(m) => m.n_features(),
        }
    }
    fn offset(&self) -> T {
        match self {
            Model::LogReg(m) => m.offset(),
            Model::Gbdt(m) => m.offset(),
        }
    }
    fn n_parts(&self) -> usize {
        match self {
            Model::LogReg(m) => m.n_parts(),
            Model::Gbdt(m) => m.n_parts(),
        }
    }
    fn part_features(&self, k: usize) -> Vec<usize> {
        match self {
            Model::LogReg(m) => m.part_features(k),
            Model::Gbdt(m) => m.part_features(k),
        }
    }
    fn part_value(&self, k: usize, x: &[T]) -> T {
        match self {
            Model::LogReg(m) => m.part_value(k, x),
            Model::Gbdt(m) => m.part_value(k, x),
        }
    }
}
