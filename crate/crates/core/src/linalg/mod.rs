//! Graded vector spaces, homogeneous maps, and exact per-degree linear algebra.

mod graded;
mod matrix;
mod sparse;

pub use graded::{
    direct_sum, direct_sum_labeled, direct_sum_maps, kernel_image, quotient, solve, to_dense, to_sparse, DirectSum,
    GradedMap, GradedSpace, Quotient, SparseVec, Subspace,
};
pub use matrix::{Matrix, Rref};
pub use sparse::SparseEchelon;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field mismatch")]
    FieldMismatch,
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("not a subspace: {0}")]
    NotASubspace(String),
    #[error("degree mismatch: image of `{from}` has a term `{to}` outside degree {expected}")]
    DegreeMismatch { from: String, to: String, expected: i32 },
}
