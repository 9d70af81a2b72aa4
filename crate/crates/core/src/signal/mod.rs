//! Raw pen recordings: loading, validation, uniform resampling and force-based
//! stroke segmentation.

mod recording;
mod resample;
mod segment;

pub use recording::{
    load_recording, write_recording_csv, write_recording_json, AgeGroup, PenRecording,
    RecordingFormat, RecordingMeta, WritingTask, CSV_HEADER, MIN_SAMPLES,
};
pub use resample::resample_uniform;
pub use segment::{segment_force, segment_strokes, Interval, SegmentParams, StrokeSegmentation};
