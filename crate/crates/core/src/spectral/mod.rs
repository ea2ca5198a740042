//! Eigenvalues, gaps and gap bounds along the interpolation path.

pub mod bounds;
pub mod crossing;
pub mod dense;
pub mod gap;
pub mod secular;

pub use bounds::{bound_report, BoundReport, ScheduleBound};
pub use crossing::{
    crossing_points, crossing_points_with, lemma_scale, CrossingOptions, CrossingReport,
    DEFAULT_DIVISOR,
};
pub use dense::{dense_char_poly, dense_eigenvalues, dense_oracle, DenseSpectrum};
pub use gap::{
    gap, lowest_eigenvalues, min_gap, min_gap_instance, min_gap_linear, min_gap_path, minimize_gap,
    GapProfile, GapSample, GapSolver, MinGapOptions, DEFAULT_GRID, DEFAULT_TOL,
};
pub use secular::{
    char_poly_eval, char_poly_log, expand_vector, SecularLevel, SecularProblem, SignedLog,
};

use crate::error::Result;
use crate::objective::SpectrumTable;

/// Ground and first-excited eigenvectors of the uniform-projector path at `s`
/// in value/multiplicity coordinates.
pub fn ground_excited_vectors(table: &SpectrumTable, s: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let prob = SecularProblem::linear(table, s);
    let levels = prob.lowest_levels(2)?;
    Ok((prob.eigenvector(&levels[0])?, prob.eigenvector(&levels[1])?))
}
