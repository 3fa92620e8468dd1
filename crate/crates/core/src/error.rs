use thiserror::Error;

use crate::nn_index::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid workspace: {0}")]
    InvalidWorkspace(String),

    #[error("invalid planner parameters: {0}")]
    InvalidParams(String),

    #[error("target {index} at ({x}, {y}) is in collision")]
    TargetInCollision { index: usize, x: f64, y: f64 },

    #[error("targets {first} and {second} coincide")]
    DuplicateTargets { first: usize, second: usize },

    #[error("need at least {required} targets, got {actual}")]
    TooFewTargets { required: usize, actual: usize },

    #[error("node {0} is already indexed")]
    DuplicateNode(NodeId),

    #[error("spatial index is empty")]
    EmptyIndex,

    #[error("matrix entry ({0}, {1}) is not finite")]
    InfiniteEntry(usize, usize),

    #[error("matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(usize, usize),

    #[error("matrix must be square with matching row lengths")]
    MalformedMatrix,

    #[error("exact solver supports 2..={max} targets, got {actual}")]
    SolverSize { max: usize, actual: usize },

    #[error("sequence is not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("no tour with all edges plannable: {0}")]
    NoPlannableTour(String),

    #[error("path between start and goal not found in {0} iterations")]
    PathNotFound(usize),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("map generation failed: {0}")]
    MapGeneration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by malformed inputs rather than by the planners.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfiguration(_)
                | Error::InvalidPolygon(_)
                | Error::InvalidWorkspace(_)
                | Error::InvalidParams(_)
                | Error::TargetInCollision { .. }
                | Error::DuplicateTargets { .. }
                | Error::TooFewTargets { .. }
                | Error::InvalidScenario(_)
                | Error::Json(_)
        )
    }
}
