use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by metric evaluation and annotation I/O.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("frame {frame}: track id {track_id} appears more than once")]
    DuplicateTrack { frame: u64, track_id: u64 },

    #[error("duplicate trajectory id {0} in one track set")]
    DuplicateTrajectory(u64),

    #[error("trajectory {0} has no states")]
    EmptyTrajectory(u64),

    #[error("ground-truth pose {0} has no bounding box")]
    MissingBbox(String),

    #[error("ground-truth pose {pose} has a degenerate bounding box ({w} x {h})")]
    DegenerateBbox { pose: String, w: f64, h: f64 },

    #[error(
        "cost matrix entry ({row}, {col}) is {value}; entries must be finite and non-negative"
    )]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("cost matrix has {rows} x {cols} shape but {len} entries")]
    CostShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("brute-force assignment refused for a {rows} x {cols} matrix (limit {limit})")]
    BruteForceTooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("frame {frame}: prediction {index} has no confidence score")]
    MissingScore { frame: u64, index: usize },

    #[error("frame {frame}: pose {index} has no track id")]
    MissingTrackId { frame: u64, index: usize },

    #[error("frame ids must be strictly increasing (scene {scene}: {prev} then {next})")]
    FrameOrder { scene: String, prev: u64, next: u64 },

    #[error("camera views disagree on frame ids: {0}")]
    FrameMismatch(String),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid camera layout: {0}")]
    Layout(String),

    #[error("unknown joint name `{0}`")]
    UnknownJoint(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

impl EvalError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.into(),
            source,
        }
    }
}
