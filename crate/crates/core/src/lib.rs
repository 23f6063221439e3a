//! Exact differential graded algebra over the rationals and prime fields.

pub mod algebra;
pub mod cli;
pub mod complexes;
pub mod format;
pub mod linalg;
pub mod module;
pub mod report;
pub mod resolution;
pub mod scalar;
pub mod tilt;
pub mod triangular;
