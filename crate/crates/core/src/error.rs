use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{msg} at line {line}")]
    Text { line: usize, msg: String },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated input: {0}")]
    Truncated(&'static str),

    #[error("declared event count {declared} does not match payload ({actual} records)")]
    CountMismatch { declared: u64, actual: u64 },

    #[error("malformed binary field: {0}")]
    Malformed(&'static str),

    #[error("frame dimensions overflow: {0}")]
    DimensionOverflow(String),

    #[error("count {0} does not fit in 32 bits")]
    CountOutOfRange(u64),

    #[error("invalid sensor geometry {width}x{height}")]
    InvalidGeometry { width: u32, height: u32 },

    #[error("event ({x}, {y}) outside {width}x{height} sensor")]
    CoordinateOutOfRange { x: u32, y: u32, width: u32, height: u32 },

    #[error("slice count must be at least 1")]
    ZeroSlices,

    #[error("T exceeds event count ({slices} slices for {events} events)")]
    SlicesExceedEvents { slices: usize, events: usize },

    #[error("slice plan does not match stream: {0}")]
    PlanMismatch(String),

    #[error("invalid multi-scale spec: {0}")]
    InvalidMsti(String),

    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("min density is zero; drop plan undefined")]
    ZeroMinDensity,

    #[error("config: {0}")]
    Config(String),

    #[error("output collision: {} produced by more than one input", .0.display())]
    OutputCollision(PathBuf),

    #[error("{op}: {source}")]
    Op {
        op: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn text(line: usize, msg: impl Into<String>) -> Self {
        Error::Text {
            line,
            msg: msg.into(),
        }
    }

    /// Wraps the error with the name of the augmentation op that raised it.
    pub fn in_op(self, op: &'static str) -> Self {
        Error::Op {
            op,
            source: Box::new(self),
        }
    }
}
