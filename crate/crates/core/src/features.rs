//! The 14 indicators of one recording.

use crate::error::{Error, Result};
use crate::gesture::{
    estimate_tilt, force_indicators, smoothness_indicator, temporal_indicators, tilt_stats, GestureParams,
};
use crate::scalar::Real;
use crate::signal::{segment_strokes, PenRecording, SegmentParams};
use crate::tremor::{tremor_features, TremorParams};
use serde::{Deserialize, Serialize};

pub const N_FEATURES: usize = 14;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "OnSheet", "InAir", "AirSheetR", "Tilt_Mean", "Tilt_CV", "Tilt_Var", "Force", "NCF", "NCA", "F_modal",
    "RMS", "ApEn", "RR", "DET",
];

/// Indicator values in `FEATURE_NAMES` order; `None` marks a value that could not
/// be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub values: [Option<T>; N_FEATURES],
}

impl<T: Real> FeatureVector<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        FEATURE_NAMES.iter().position(|n| *n == name).and_then(|i| self.values[i])
    }

    pub fn missing(&self) -> Vec<&'static str> {
        FEATURE_NAMES
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| *n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FeatureParams {
    pub segment: SegmentParams,
    pub gesture: GestureParams,
    pub tremor: TremorParams,
}

/// Extraction result plus the errors that left some indicators missing.
#[derive(Debug, Clone)]
pub struct Extraction<T> {
    pub features: FeatureVector<T>,
    pub warnings: Vec<String>,
}

/// Computes all indicators. Segmentation, timing, force and smoothness failures
/// are fatal; tilt and tremor failures leave their columns missing.
pub fn extract_features<T: Real>(rec: &PenRecording<T>, params: &FeatureParams) -> Result<Extraction<T>> {
    let seg = segment_strokes(rec, &params.segment)?;
    let temporal = temporal_indicators::<T>(&seg)?;
    let (force, ncf) = force_indicators(rec, &seg, T::lit(params.gesture.force_prominence))?;
    let nca = smoothness_indicator(rec, &seg, T::lit(params.gesture.accel_prominence))?;
    let mut warnings = Vec::new();

    let tilt = tilt_stats(&estimate_tilt(rec, &seg, params.gesture.tilt_alpha));
    let (tilt_mean, tilt_cv, tilt_var) = match tilt {
        Ok(s) => {
            if s.cv.is_none() {
                warnings.push(Error::DegenerateTilt.to_string());
            }
            (Some(s.mean), s.cv, Some(s.var))
        }
        Err(e) => {
            warnings.push(e.to_string());
            (None, None, None)
        }
    };
    let tremor = match tremor_features(rec, &seg, &params.tremor) {
        Ok(t) => [Some(t.f_modal), Some(t.rms), Some(t.apen), Some(t.rr), Some(t.det)],
        Err(e @ (Error::TooShortForTremor { .. }
        | Error::TooShortForRqa { .. }
        | Error::AllZeroSpectra
        | Error::SiftDiverged { .. })) => {
            warnings.push(e.to_string());
            [None; 5]
        }
        Err(e) => return Err(e),
    };
    let values = [
        Some(temporal.on_sheet),
        Some(temporal.in_air),
        Some(temporal.air_sheet_ratio),
        tilt_mean,
        tilt_cv,
        tilt_var,
        Some(force),
        Some(ncf),
        Some(nca),
        tremor[0],
        tremor[1],
        tremor[2],
        tremor[3],
        tremor[4],
    ];
    Ok(Extraction { features: FeatureVector { values }, warnings })
}
