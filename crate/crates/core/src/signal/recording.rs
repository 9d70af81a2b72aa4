use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

/// Minimum recording length: 5 s of writing at 50 Hz.
pub const MIN_SAMPLES: usize = 250;

pub const CSV_HEADER: [&str; 8] = ["t", "ax", "ay", "az", "gx", "gy", "gz", "f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WritingTask {
    Text,
    List,
}

impl WritingTask {
    pub const ALL: [WritingTask; 2] = [WritingTask::Text, WritingTask::List];

    pub fn as_str(self) -> &'static str {
        match self {
            WritingTask::Text => "Text",
            WritingTask::List => "List",
        }
    }
}

impl fmt::Display for WritingTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WritingTask {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Text" | "text" => Ok(WritingTask::Text),
            "List" | "list" => Ok(WritingTask::List),
            other => Err(Error::MalformedInput(format!("unknown task {other:?}"))),
        }
    }
}

/// Age groups, ordered from youngest to oldest: YY 20–39, EY 40–59, EF 60–69, EE 70+.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgeGroup {
    YY,
    EY,
    EF,
    EE,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 4] = [AgeGroup::YY, AgeGroup::EY, AgeGroup::EF, AgeGroup::EE];

    pub fn as_str(self) -> &'static str {
        match self {
            AgeGroup::YY => "YY",
            AgeGroup::EY => "EY",
            AgeGroup::EF => "EF",
            AgeGroup::EE => "EE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgeGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "YY" => Ok(AgeGroup::YY),
            "EY" => Ok(AgeGroup::EY),
            "EF" => Ok(AgeGroup::EF),
            "EE" => Ok(AgeGroup::EE),
            other => Err(Error::UnknownGroup(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    #[serde(default)]
    pub subject_id: String,
    #[serde(default)]
    pub task: Option<WritingTask>,
    #[serde(default)]
    pub age_group: Option<AgeGroup>,
    pub sample_rate: f64,
}

impl RecordingMeta {
    pub fn anonymous(sample_rate: f64) -> Self {
        RecordingMeta {
            subject_id: String::new(),
            task: None,
            age_group: None,
            sample_rate,
        }
    }
}

/// Validated multichannel pen recording.
///
/// Acceleration is in m/s², angular rate in deg/s, force in newtons, time in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PenRecording<T> {
    meta: RecordingMeta,
    time: Vec<T>,
    accel: [Vec<T>; 3],
    gyro: [Vec<T>; 3],
    force: Vec<T>,
}

impl<T: Real> PenRecording<T> {
    /// Builds a recording, checking every channel invariant. Timestamps are kept as given.
    pub fn new(
        meta: RecordingMeta,
        time: Vec<T>,
        accel: [Vec<T>; 3],
        gyro: [Vec<T>; 3],
        force: Vec<T>,
    ) -> Result<Self> {
        let n = time.len();
        let lens = accel.iter().chain(gyro.iter()).map(Vec::len).chain([force.len()]);
        for (k, len) in lens.enumerate() {
            if len != n {
                return Err(Error::MalformedInput(format!(
                    "channel {} has {len} samples, time has {n}",
                    CSV_HEADER[k + 1]
                )));
            }
        }
        if n < MIN_SAMPLES {
            return Err(Error::TooShort { samples: n, required: MIN_SAMPLES });
        }
        let all = std::iter::once(&time)
            .chain(accel.iter())
            .chain(gyro.iter())
            .chain(std::iter::once(&force));
        for (k, ch) in all.enumerate() {
            if let Some(i) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::MalformedInput(format!(
                    "non-finite value in channel {} at sample {i}",
                    CSV_HEADER[k]
                )));
            }
        }
        if let Some(i) = time.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotonicTime { index: i + 1 });
        }
        if let Some(i) = force.iter().position(|&f| f < T::zero()) {
            return Err(Error::NegativeForce { index: i, value: force[i].as_f64() });
        }
        if !(meta.sample_rate > 0.0 && meta.sample_rate.is_finite()) {
            return Err(Error::MalformedInput(format!("sample rate {}", meta.sample_rate)));
        }
        Ok(PenRecording { meta, time, accel, gyro, force })
    }

    pub fn meta(&self) -> &RecordingMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut RecordingMeta {
        &mut self.meta
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        T::lit(self.meta.sample_rate)
    }

    pub fn time(&self) -> &[T] {
        &self.time
    }

    pub fn accel(&self) -> &[Vec<T>; 3] {
        &self.accel
    }

    pub fn gyro(&self) -> &[Vec<T>; 3] {
        &self.gyro
    }

    pub fn force(&self) -> &[T] {
        &self.force
    }

    /// Last timestamp minus first.
    pub fn duration(&self) -> T {
        self.time[self.len() - 1] - self.time[0]
    }

    /// Euclidean norm of the three acceleration channels per sample.
    pub fn accel_magnitude(&self) -> Vec<T> {
        (0..self.len())
            .map(|i| {
                let [x, y, z] = [self.accel[0][i], self.accel[1][i], self.accel[2][i]];
                (x * x + y * y + z * z).sqrt()
            })
            .collect()
    }

    /// Channels in CSV column order.
    pub fn channels(&self) -> [&[T]; 8] {
        [
            &self.time,
            &self.accel[0],
            &self.accel[1],
            &self.accel[2],
            &self.gyro[0],
            &self.gyro[1],
            &self.gyro[2],
            &self.force,
        ]
    }

    /// Copy of the recording with the force channel replaced.
    pub fn with_force(&self, force: Vec<T>) -> Result<Self> {
        PenRecording::new(
            self.meta.clone(),
            self.time.clone(),
            self.accel.clone(),
            self.gyro.clone(),
            force,
        )
    }

    fn from_columns(meta: RecordingMeta, mut cols: Vec<Vec<T>>) -> Result<Self> {
        debug_assert_eq!(cols.len(), 8);
        if let Some(&t0) = cols[0].first() {
            for t in cols[0].iter_mut() {
                *t -= t0;
            }
        }
        let force = cols.pop().unwrap_or_default();
        let gz = cols.pop().unwrap_or_default();
        let gy = cols.pop().unwrap_or_default();
        let gx = cols.pop().unwrap_or_default();
        let az = cols.pop().unwrap_or_default();
        let ay = cols.pop().unwrap_or_default();
        let ax = cols.pop().unwrap_or_default();
        let time = cols.pop().unwrap_or_default();
        PenRecording::new(meta, time, [ax, ay, az], [gx, gy, gz], force)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordingFormat {
    Csv,
    Json,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct JsonRecording {
    meta: RecordingMeta,
    channels: JsonChannels,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct JsonChannels {
    t: Vec<f64>,
    ax: Vec<f64>,
    ay: Vec<f64>,
    az: Vec<f64>,
    gx: Vec<f64>,
    gy: Vec<f64>,
    gz: Vec<f64>,
    f: Vec<f64>,
}

/// Parses a recording and validates it. Timestamps are rebased to start at zero.
///
/// CSV input carries no metadata: subject, task and group are left empty and the
/// sample rate is estimated from the median sampling interval.
pub fn load_recording<T: Real, R: Read>(source: R, format: RecordingFormat) -> Result<PenRecording<T>> {
    match format {
        RecordingFormat::Csv => load_csv(source),
        RecordingFormat::Json => {
            let raw: JsonRecording = serde_json::from_reader(source)
                .map_err(|e| Error::MalformedInput(e.to_string()))?;
            let c = raw.channels;
            let cols = [c.t, c.ax, c.ay, c.az, c.gx, c.gy, c.gz, c.f]
                .into_iter()
                .map(|v| v.into_iter().map(T::lit).collect())
                .collect();
            PenRecording::from_columns(raw.meta, cols)
        }
    }
}

fn load_csv<T: Real, R: Read>(source: R) -> Result<PenRecording<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::MalformedInput("empty input".into()))?
        .map_err(|e| Error::MalformedInput(e.to_string()))?;
    if header.len() != CSV_HEADER.len() || header.iter().zip(CSV_HEADER).any(|(a, b)| a.trim() != b) {
        return Err(Error::MalformedInput(format!(
            "expected header {:?}, got {:?}",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut cols: Vec<Vec<T>> = vec![Vec::new(); 8];
    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::MalformedInput(e.to_string()))?;
        if rec.len() != 8 {
            return Err(Error::MalformedInput(format!(
                "row {} has {} columns, expected 8",
                row + 1,
                rec.len()
            )));
        }
        for (col, cell) in cols.iter_mut().zip(rec.iter()) {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::MalformedInput(format!("non-numeric cell {cell:?} in row {}", row + 1))
            })?;
            col.push(T::lit(v));
        }
    }
    let rate = estimate_rate(&cols[0])?;
    PenRecording::from_columns(RecordingMeta::anonymous(rate), cols)
}

fn estimate_rate<T: Real>(time: &[T]) -> Result<f64> {
    let mut dts: Vec<f64> = time.windows(2).map(|w| (w[1] - w[0]).as_f64()).collect();
    if dts.is_empty() {
        return Err(Error::TooShort { samples: time.len(), required: MIN_SAMPLES });
    }
    dts.sort_by(f64::total_cmp);
    let median = dts[dts.len() / 2];
    if median > 0.0 {
        Ok(1.0 / median)
    } else {
        // Left for validation to report as NonMonotonicTime.
        Ok(1.0)
    }
}

/// Writes the recording CSV format (`t,ax,ay,az,gx,gy,gz,f`, LF line endings).
pub fn write_recording_csv<T: Real, W: Write>(rec: &PenRecording<T>, mut out: W) -> Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    let ch = rec.channels();
    let mut line = String::new();
    for i in 0..rec.len() {
        line.clear();
        for (k, c) in ch.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&c[i].to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_recording_json<T: Real, W: Write>(rec: &PenRecording<T>, out: W) -> Result<()> {
    let conv = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    let json = JsonRecording {
        meta: rec.meta.clone(),
        channels: JsonChannels {
            t: conv(&rec.time),
            ax: conv(&rec.accel[0]),
            ay: conv(&rec.accel[1]),
            az: conv(&rec.accel[2]),
            gx: conv(&rec.gyro[0]),
            gy: conv(&rec.gyro[1]),
            gz: conv(&rec.gyro[2]),
            f: conv(&rec.force),
        },
    };
    serde_json::to_writer(out, &json)?;
    Ok(())
}
