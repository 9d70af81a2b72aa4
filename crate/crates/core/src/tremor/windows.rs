use crate::error::{Error, Result};
use crate::scalar::{mean, Real};
use crate::signal::{PenRecording, StrokeSegmentation};
use serde::{Deserialize, Serialize};

pub const WINDOW_LEN: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceChannel {
    MagnitudeDetrended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TremorWindows<T> {
    pub windows: Vec<Vec<T>>,
    pub source_channel: SourceChannel,
    pub window_len: usize,
}

/// Cuts the pause-free acceleration magnitude into consecutive, non-overlapping
/// windows and removes each window's mean. The remainder is dropped.
pub fn make_windows<T: Real>(
    rec: &PenRecording<T>,
    seg: &StrokeSegmentation,
    window_len: usize,
) -> Result<TremorWindows<T>> {
    let mask = seg.non_pause_mask();
    let magnitude: Vec<T> = rec
        .accel_magnitude()
        .into_iter()
        .zip(mask)
        .filter_map(|(v, keep)| keep.then_some(v))
        .collect();
    windows_from_series(&magnitude, window_len)
}

pub fn windows_from_series<T: Real>(series: &[T], window_len: usize) -> Result<TremorWindows<T>> {
    if window_len == 0 || series.len() < window_len {
        return Err(Error::TooShortForTremor { samples: series.len(), required: window_len });
    }
    let windows = series
        .chunks_exact(window_len)
        .map(|chunk| {
            let m = mean(chunk).unwrap_or(T::zero());
            chunk.iter().map(|&v| v - m).collect()
        })
        .collect();
    Ok(TremorWindows { windows, source_channel: SourceChannel::MagnitudeDetrended, window_len })
}
