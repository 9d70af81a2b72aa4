use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("timestamps not strictly increasing at sample {index}")]
    NonMonotonicTime { index: usize },
    #[error("recording too short: {samples} samples, need at least {required}")]
    TooShort { samples: usize, required: usize },
    #[error("negative force {value} at sample {index}")]
    NegativeForce { index: usize, value: f64 },
    #[error("no strokes found in recording")]
    EmptyWriting,
    #[error("tilt mean is zero; coefficient of variation undefined")]
    DegenerateTilt,
    #[error("too few non-pause samples for tremor analysis: {samples} < {required}")]
    TooShortForTremor { samples: usize, required: usize },
    #[error("series too short for recurrence analysis: {len} < {required}")]
    TooShortForRqa { len: usize, required: usize },
    #[error("sifting did not converge within {iterations} iterations")]
    SiftDiverged { iterations: usize },
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("all spectra have zero power")]
    AllZeroSpectra,
    #[error("subject {subject} lacks task {task}")]
    MissingTask { subject: String, task: String },
    #[error("unknown age group {0:?}")]
    UnknownGroup(String),
    #[error("duplicate subject {0:?}")]
    DuplicateSubject(String),
    #[error("only one class present")]
    SingleClassInput,
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exact Shapley enumeration supports at most {max} features, got {got}")]
    TooManyFeaturesForExact { max: usize, got: usize },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable variant name used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "MalformedInput",
            Error::NonMonotonicTime { .. } => "NonMonotonicTime",
            Error::TooShort { .. } => "TooShort",
            Error::NegativeForce { .. } => "NegativeForce",
            Error::EmptyWriting => "EmptyWriting",
            Error::DegenerateTilt => "DegenerateTilt",
            Error::TooShortForTremor { .. } => "TooShortForTremor",
            Error::TooShortForRqa { .. } => "TooShortForRqa",
            Error::SiftDiverged { .. } => "SiftDiverged",
            Error::InvalidSignal(_) => "InvalidSignal",
            Error::AllZeroSpectra => "AllZeroSpectra",
            Error::MissingTask { .. } => "MissingTask",
            Error::UnknownGroup(_) => "UnknownGroup",
            Error::DuplicateSubject(_) => "DuplicateSubject",
            Error::SingleClassInput => "SingleClassInput",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooManyFeaturesForExact { .. } => "TooManyFeaturesForExact",
            Error::ConfigInvalid(_) => "ConfigInvalid",
            Error::MissingArtifact(_) => "MissingArtifact",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
