//! Affine and relative-topology primitives in R^n.

mod hull;
mod interior;
mod polytope;
mod slice;
mod vector;

pub use hull::{affine_hull, affine_hull_product, AffineSubspace};
pub use interior::{relative_interior_member, relative_interior_probe, Body, ProbeOutcome, WithHull};
pub use polytope::{convex_hull_contains, PolytopeBody};
pub use slice::{boundary_on_ray, relative_boundary_of_line_slice, slice_through, LineSlice, RayHit};
pub use vector::{PointCloud, Segment, Vector};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point cloud is empty")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("segment parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("a line must be a one-dimensional affine subspace, got dimension {0}")]
    NotALine(usize),
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// `(1 - t) a + t b` for `t` in `[0, 1]`.
pub fn segment_point(a: &Vector, b: &Vector, t: f64) -> Result<Vector, GeometryError> {
    if a.dim() != b.dim() {
        return Err(GeometryError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::ParameterOutOfRange(t));
    }
    Ok(a.lerp(b, t))
}
