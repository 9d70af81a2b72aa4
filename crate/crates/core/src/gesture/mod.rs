//! Gesture-side indicators: on-sheet and in-air timing, pen tilt, writing force and
//! smoothness.

mod extrema;
mod force;
mod temporal;
mod tilt;

pub use extrema::{count_turning_points, extrema_count};
pub use force::{force_indicators, smoothness_indicator};
pub use temporal::{temporal_indicators, TemporalIndicators};
pub use tilt::{estimate_tilt, tilt_stats, tilt_trajectory, TiltSeries, TiltStats};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{PenRecording, StrokeSegmentation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GestureParams {
    /// Weight of the gyro-propagated estimate in the complementary filter.
    pub tilt_alpha: f64,
    /// Minimum swing (N) for a force extremum.
    pub force_prominence: f64,
    /// Minimum swing (m/s²) for an acceleration-magnitude extremum.
    pub accel_prominence: f64,
}

impl Default for GestureParams {
    fn default() -> Self {
        GestureParams {
            tilt_alpha: 0.98,
            force_prominence: 0.05,
            accel_prominence: 0.2,
        }
    }
}

/// The nine gesture indicators of one recording. `tilt_cv` is `None` when the mean
/// tilt is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureFeatures<T> {
    pub on_sheet: T,
    pub in_air: T,
    pub air_sheet_ratio: T,
    pub tilt_mean: T,
    pub tilt_cv: Option<T>,
    pub tilt_var: T,
    pub force: T,
    pub ncf: T,
    pub nca: T,
}

pub fn gesture_features<T: Real>(
    rec: &PenRecording<T>,
    seg: &StrokeSegmentation,
    params: &GestureParams,
) -> Result<GestureFeatures<T>> {
    let temporal = temporal_indicators::<T>(seg)?;
    let tilt = estimate_tilt(rec, seg, params.tilt_alpha);
    let stats = tilt_stats(&tilt)?;
    let (force, ncf) = force_indicators(rec, seg, T::lit(params.force_prominence))?;
    let nca = smoothness_indicator(rec, seg, T::lit(params.accel_prominence))?;
    Ok(GestureFeatures {
        on_sheet: temporal.on_sheet,
        in_air: temporal.in_air,
        air_sheet_ratio: temporal.air_sheet_ratio,
        tilt_mean: stats.mean,
        tilt_cv: stats.cv,
        tilt_var: stats.var,
        force,
        ncf,
        nca,
    })
}

fn require_strokes(seg: &StrokeSegmentation) -> Result<()> {
    if seg.strokes.is_empty() {
        Err(Error::EmptyWriting)
    } else {
        Ok(())
    }
}
