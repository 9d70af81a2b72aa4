use super::extrema::extrema_count;
use super::require_strokes;
use crate::error::Result;
use crate::scalar::Real;
use crate::signal::{PenRecording, StrokeSegmentation};

/// Mean in-stroke force and the mean number of force extrema per stroke (NCF).
pub fn force_indicators<T: Real>(
    rec: &PenRecording<T>,
    seg: &StrokeSegmentation,
    prominence: T,
) -> Result<(T, T)> {
    require_strokes(seg)?;
    let force = rec.force();
    let mut sum = T::zero();
    let mut n = 0usize;
    let mut extrema = 0usize;
    for s in &seg.strokes {
        let stroke = &force[s.range()];
        sum += stroke.iter().copied().sum::<T>();
        n += stroke.len();
        extrema += extrema_count(stroke, prominence);
    }
    let strokes = T::from_usize_exact(seg.strokes.len());
    Ok((sum / T::from_usize_exact(n), T::from_usize_exact(extrema) / strokes))
}

/// Mean number of extrema of the acceleration magnitude per stroke (NCA).
pub fn smoothness_indicator<T: Real>(
    rec: &PenRecording<T>,
    seg: &StrokeSegmentation,
    prominence: T,
) -> Result<T> {
    require_strokes(seg)?;
    let mag = rec.accel_magnitude();
    let extrema: usize = seg
        .strokes
        .iter()
        .map(|s| extrema_count(&mag[s.range()], prominence))
        .sum();
    Ok(T::from_usize_exact(extrema) / T::from_usize_exact(seg.strokes.len()))
}
