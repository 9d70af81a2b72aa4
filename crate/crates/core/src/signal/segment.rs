use super::recording::PenRecording;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Half-open sample interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentParams {
    /// Force above which a stroke starts (N).
    pub force_threshold: f64,
    /// A stroke ends once force drops below `hysteresis * force_threshold`.
    pub hysteresis: f64,
    /// Shorter runs are treated as chatter and merged into the surrounding gap (s).
    pub min_stroke: f64,
    /// Gaps longer than this are pauses (s).
    pub pause_cutoff: f64,
}

impl Default for SegmentParams {
    fn default() -> Self {
        SegmentParams {
            force_threshold: 0.05,
            hysteresis: 0.8,
            min_stroke: 0.04,
            pause_cutoff: 2.0,
        }
    }
}

/// Partition of a recording into strokes, in-air gaps and pauses.
///
/// `leading` and `trailing` hold the non-writing tracts before the first and after the
/// last stroke; they belong to neither gaps nor pauses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeSegmentation {
    pub strokes: Vec<Interval>,
    pub in_air: Vec<Interval>,
    pub pauses: Vec<Interval>,
    pub leading: Interval,
    pub trailing: Interval,
    pub pause_cutoff: f64,
    pub sample_rate: f64,
    pub n_samples: usize,
}

impl StrokeSegmentation {
    pub fn duration(&self, iv: &Interval) -> f64 {
        iv.len() as f64 / self.sample_rate
    }

    /// `true` for samples outside every pause interval.
    pub fn non_pause_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.n_samples];
        for p in &self.pauses {
            mask[p.range()].iter_mut().for_each(|m| *m = false);
        }
        mask
    }

    /// Total on-sheet time in seconds.
    pub fn on_sheet_total(&self) -> f64 {
        self.strokes.iter().map(|s| self.duration(s)).sum()
    }
}

pub fn segment_strokes<T: Real>(rec: &PenRecording<T>, params: &SegmentParams) -> Result<StrokeSegmentation> {
    segment_force(rec.force(), rec.meta().sample_rate, params)
}

/// Segments a force trace sampled at `sample_rate`.
pub fn segment_force<T: Real>(
    force: &[T],
    sample_rate: f64,
    params: &SegmentParams,
) -> Result<StrokeSegmentation> {
    let enter = T::lit(params.force_threshold);
    let exit = T::lit(params.force_threshold * params.hysteresis);
    let min_len = (params.min_stroke * sample_rate - 1e-9).ceil().max(1.0) as usize;

    let mut strokes = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &f) in force.iter().enumerate() {
        match open {
            None if f > enter => open = Some(i),
            Some(s) if f < exit => {
                if i - s >= min_len {
                    strokes.push(Interval::new(s, i));
                }
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        if force.len() - s >= min_len {
            strokes.push(Interval::new(s, force.len()));
        }
    }
    if strokes.is_empty() {
        return Err(Error::EmptyWriting);
    }

    let cutoff_samples = params.pause_cutoff * sample_rate;
    let mut in_air = Vec::new();
    let mut pauses = Vec::new();
    for w in strokes.windows(2) {
        let gap = Interval::new(w[0].end, w[1].start);
        // Compare in samples so an exact 2.0 s gap is not a pause.
        if gap.len() as f64 > cutoff_samples + 1e-9 {
            pauses.push(gap);
        } else {
            in_air.push(gap);
        }
    }
    Ok(StrokeSegmentation {
        leading: Interval::new(0, strokes[0].start),
        trailing: Interval::new(strokes[strokes.len() - 1].end, force.len()),
        strokes,
        in_air,
        pauses,
        pause_cutoff: params.pause_cutoff,
        sample_rate,
        n_samples: force.len(),
    })
}
