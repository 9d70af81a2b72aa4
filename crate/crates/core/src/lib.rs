//! Smart-pen handwriting and tremor indicators, age-group classification with
//! leave-one-out evaluation, and Shapley explanations.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod explain;
pub mod features;
pub mod gesture;
pub mod models;
pub mod pipeline;
pub mod scalar;
pub mod signal;
pub mod synth;
pub mod tremor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Recording = signal::PenRecording<f64>;
pub type Features = features::FeatureVector<f64>;
pub type Table = dataset::FeatureTable<f64>;
pub type Dataset = dataset::TaskDataset<f64>;
pub type LogReg = models::LogRegModel<f64>;
pub type Gbdt = models::GbdtModel<f64>;
pub type AnyModel = models::Model<f64>;
pub type Shap = explain::ShapValues<f64>;
