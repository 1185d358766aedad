use thiserror::Error;

use crate::geom::TileKey;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("recursion denominator vanished at column {0}")]
    DenominatorVanished(usize),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("degenerate triangle (radicand {radicand:e})")]
    DegenerateTriangle { radicand: f64 },

    #[error("triangles coincide up to translation and half-turn; every shear is bad")]
    DegeneratePair,

    #[error("no edge pair with unequal vertical extents")]
    NoUnequalHeights,

    #[error("shear {index} could not be certified after {attempts} samples")]
    ExhaustedRetries { index: usize, attempts: usize },

    #[error("strip rows {lower} and {upper} disagree on their shared boundary by {deviation:e}")]
    BoundaryMismatch { lower: i64, upper: i64, deviation: f64 },

    #[error("equal-area denominator is singular ({value:e})")]
    SingularDenominator { value: f64 },

    #[error("quadrangle {corner} is not convex")]
    NonConvexOutput { corner: char },

    #[error("Newton iteration stalled after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("quadrangle is outside the reconstruction basin (deviation {deviation:e})")]
    OutOfBasin { deviation: f64 },

    #[error("edge length {length} outside the admissible window")]
    EdgeOutOfRange { length: f64 },

    #[error("tile {0} is equilateral")]
    EquilateralTile(TileKey),

    #[error("tile {key}: {source}")]
    Tile {
        key: TileKey,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Name of the variant, for messages and scripts.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DenominatorVanished(_) => "DenominatorVanished",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::DegeneratePolygon(_) => "DegeneratePolygon",
            Error::DegenerateTriangle { .. } => "DegenerateTriangle",
            Error::DegeneratePair => "DegeneratePair",
            Error::NoUnequalHeights => "NoUnequalHeights",
            Error::ExhaustedRetries { .. } => "ExhaustedRetries",
            Error::BoundaryMismatch { .. } => "BoundaryMismatch",
            Error::SingularDenominator { .. } => "SingularDenominator",
            Error::NonConvexOutput { .. } => "NonConvexOutput",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularJacobian { .. } => "SingularJacobian",
            Error::OutOfBasin { .. } => "OutOfBasin",
            Error::EdgeOutOfRange { .. } => "EdgeOutOfRange",
            Error::EquilateralTile(_) => "EquilateralTile",
            Error::Tile { source, .. } => source.name(),
        }
    }

    pub(crate) fn at(self, key: TileKey) -> Self {
        Error::Tile {
            key,
            source: Box::new(self),
        }
    }
}
