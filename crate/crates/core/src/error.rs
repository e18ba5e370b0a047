// SPDX-License-Identifier: Apache-2.0

use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyInput,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    ZeroDimension,
    NonFinite {
        row: usize,
        col: usize,
    },
    InvalidMinLeafSize,
    PointOutsideBox {
        row: usize,
    },
    UnknownNode(usize),
    InvalidRect(&'static str),
    DegenerateSide {
        axis: usize,
    },
    InsetTooLarge {
        t: f64,
        max: f64,
    },
    InvalidMarginal(&'static str),
    InvalidDistribution(&'static str),
    /// A hypothesis of a closed-form bound does not hold for the given arguments.
    Hypothesis(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "input is empty"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ZeroDimension => write!(f, "dimension must be at least 1"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite coordinate at row {row}, column {col}")
            }
            Error::InvalidMinLeafSize => write!(f, "minimum leaf size must be at least 1"),
            Error::PointOutsideBox { row } => {
                write!(f, "point {row} lies outside the bounding box")
            }
            Error::UnknownNode(id) => write!(f, "unknown node id {id}"),
            Error::InvalidRect(why) => write!(f, "invalid rectangle: {why}"),
            Error::DegenerateSide { axis } => {
                write!(f, "side {axis} has zero length, aspect ratio undefined")
            }
            Error::InsetTooLarge { t, max } => {
                write!(f, "inset {t} exceeds half the shortest side ({max})")
            }
            Error::InvalidMarginal(why) => write!(f, "invalid marginal: {why}"),
            Error::InvalidDistribution(why) => write!(f, "invalid distribution: {why}"),
            Error::Hypothesis(why) => write!(f, "hypothesis violated: {why}"),
        }
    }
}

impl core::error::Error for Error {}
