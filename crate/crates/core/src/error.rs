use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed Y4M header: {0}")]
    MalformedHeader(String),
    #[error("truncated frame {frame}: expected {expected} bytes, got {got}")]
    TruncatedFrame {
        frame: usize,
        expected: usize,
        got: usize,
    },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("stream length {len} is not a multiple of the frame size {frame_size}")]
    SizeMismatch { len: usize, frame_size: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("frame too small: {0}")]
    FrameTooSmall(String),
    #[error("too few frames: need at least {needed}, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("too few rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("non-finite loss at epoch {epoch}: {loss}")]
    NonFiniteLoss { epoch: usize, loss: f64 },
    #[error("unsupported model version {found} (supported: {supported})")]
    VersionMismatch { found: u64, supported: u64 },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("zero variance input")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("too few entries: {0}")]
    TooFewEntries(String),
    #[error("feature name mismatch: expected [{expected}], found [{found}]")]
    FeatureNameMismatch { expected: String, found: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    /// Another error tagged with the file (and line) it came from.
    #[error("{location}: {inner}")]
    At { location: String, inner: Box<Error> },
    #[error("{path}: {cause}")]
    Io { path: String, cause: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at(location: impl std::fmt::Display, source: Error) -> Error {
        Error::At {
            location: location.to_string(),
            inner: Box::new(source),
        }
    }
}
