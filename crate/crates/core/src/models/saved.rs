use super::Model;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct SavedModel<T> {
    pub version: u32,
    pub feature_names: Vec<String>,
    pub model: Model<T>,
}

pub fn save_model<T: Real, W: Write>(model: &Model<T>, feature_names: &[String], out: W) -> Result<()> {
    let saved = SavedModel { version: MODEL_VERSION, feature_names: feature_names.to_vec(), model: model.clone() };
    serde_json::to_writer_pretty(out, &saved)?;
    Ok(())
}

pub fn load_model<T: Real, R: Read>(input: R) -> Result<SavedModel<T>> {
    let value: serde_json::Value = serde_json::from_reader(input)?;
    let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != MODEL_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    Ok(serde_json::from_value(value)?)
}
