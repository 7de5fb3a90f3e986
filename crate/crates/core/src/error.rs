use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("distance matrix is empty")]
    EmptyMatrix,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("{labels} labels given for {points} points")]
    LabelCount { labels: usize, points: usize },
    #[error("cannot repair: dist[{i}][{j}] is zero for distinct points")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("cannot repair: {0}")]
    NotRepairable(String),
    #[error("not a metric: {0}")]
    InvalidMetric(String),
    #[error("map has {map_len} entries but the space has {points} points")]
    MapLength { map_len: usize, points: usize },
    #[error("map sends {index} to {value}, outside 0..{points}")]
    MapOutOfRange {
        index: usize,
        value: usize,
        points: usize,
    },
    #[error("point index {index} is out of range for {points} points")]
    IndexOutOfRange { index: usize, points: usize },
    #[error("invalid scalar {text:?}: expected \"p/q\" or \"p\"")]
    ParseScalar { text: String },
    #[error("{0}")]
    Domain(String),
    #[error("orbit from {start} did not revisit a point within {steps} steps")]
    OrbitNotClosed { start: usize, steps: usize },
    #[error("malformed space file: {0}")]
    SpaceFile(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
