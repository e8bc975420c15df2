//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building fans, meshes or reports.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate was NaN or infinite.
    #[error("non-finite coordinate in {0}")]
    NonFiniteCoordinate(&'static str),

    /// A fan could not be built because fewer than three neighbors were given.
    #[error("one-ring fan needs at least 3 neighbors, got {0}")]
    TooFewNeighbors(usize),

    /// The one-ring around the vertex does not close (the vertex lies on a
    /// mesh boundary).
    #[error("vertex {0} is a boundary vertex: its one-ring does not close")]
    BoundaryVertex(usize),

    /// The one-ring around the vertex is not a single closed fan.
    #[error("vertex {0} is non-manifold")]
    NonManifoldVertex(usize),

    /// A star triangle is too close to degenerate for the curvature formulas,
    /// which all divide by sin(gamma_i).
    #[error("degenerate triangle in one-ring: {0}")]
    DegenerateTriangle(&'static str),

    /// A denominator fell below its conditioning floor.
    #[error("ill-conditioned denominator in {0}")]
    IllConditioned(&'static str),

    /// The edge-length recurrence produced a nonpositive radicand.
    #[error("regular-fan recurrence produced a nonpositive radicand")]
    InvalidRecurrence,

    /// The two parameter-domain basis offsets are linearly dependent.
    #[error("parallelogram basis offsets are linearly dependent")]
    DegenerateBasis,

    /// The input point set does not span three dimensions.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// A triangle list failed mesh validation.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// A mesh file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A mesh file contains a face with more than three sides.
    #[error("unsupported polygon at line {line}: only triangles are accepted")]
    UnsupportedPolygon { line: usize },

    /// An experiment configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
}
