//! Structural identities between paths.
//!
//! * The Hadamard mirror `(1 − s)·W·diag(a)·W + s·(I − |x⟩⟨x|)` has the
//!   spectrum of the uniform-projector path at `1 − s`, for every `x`.
//! * A schedule path satisfies `gap(u) = (f + g)(u) · gap_linear(s(u))`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{check_dense, zero_crossings, PathOperator, Schedule};
use crate::objective::SpectrumTable;
use crate::spectral::{dense_eigenvalues, min_gap, GapSolver, DEFAULT_GRID, DEFAULT_TOL};
use crate::walsh::fwht;

/// Tolerance of the mirror check.
pub const LEMMA2_TOL: f64 = 1e-10;

/// Tolerance of the rescaling identity.
pub const RESCALING_TOL: f64 = 1e-10;

/// Default number of `s` points in the mirror check.
pub const LEMMA2_GRID: usize = 21;

/// Default number of `u` points in the rescaling check.
pub const RESCALING_GRID: usize = 101;

/// Largest qubit count the mirror check enumerates by default.
pub const LEMMA2_MAX_QUBITS: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CaseRecord {
    Marked(MarkedCase),
    Rescaling(RescalingCase),
}

/// Worst deviations for one marked index over the `s` grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkedCase {
    pub x: u64,
    /// Against the spectra for `x = 0`.
    pub dev_across_x: f64,
    /// Against the secular spectrum at `1 − s`.
    pub dev_secular: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescalingCase {
    pub u: f64,
    pub scale: f64,
    pub s: f64,
    pub gap_path: f64,
    pub gap_rescaled: f64,
    pub dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub check: String,
    pub max_dev: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Extra inequality attached to the identity (rescaling only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consequence: Option<RescalingConsequence>,
    pub cases: Vec<CaseRecord>,
}

/// `min_u gap_path < c2 · gMin_linear`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescalingConsequence {
    pub c2: f64,
    pub g_min_linear: f64,
    pub s_star: f64,
    pub g_min_path: f64,
    pub u_star: f64,
    pub margin: f64,
    pub holds: bool,
}

impl EquivalenceVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// `W·M·W` with `W` the normalized n-fold Hadamard transform.
pub fn hadamard_conjugate(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = matrix.nrows();
    if matrix.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: matrix.ncols(),
        });
    }
    if !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "Hadamard conjugation needs a power-of-two dimension, got {dim}"
        )));
    }
    check_dense(dim)?;
    let mut out = matrix.clone();
    let mut buf = vec![0.0; dim];
    for j in 0..dim {
        buf.copy_from_slice(out.column(j).as_slice());
        fwht(&mut buf);
        out.column_mut(j).copy_from_slice(&buf);
    }
    for i in 0..dim {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = out[(i, j)];
        }
        fwht(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            out[(i, j)] = *b;
        }
    }
    Ok(out)
}

fn s_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Dense spectra of the Hadamard-mirror path for every marked index on an
/// `s` grid, compared across `x` and with the secular spectrum at `1 − s`.
pub fn lemma2_invariance_check(
    table: &SpectrumTable,
    s_points: usize,
) -> Result<EquivalenceVerdict> {
    let n = table.n();
    if n > LEMMA2_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "mirror check qubits",
            requested: n as usize,
            limit: LEMMA2_MAX_QUBITS as usize,
        });
    }
    check_dense(1usize << n)?;
    let grid = s_grid(s_points);
    let reference: Vec<Vec<f64>> = grid
        .iter()
        .map(|&s| crate::spectral::SecularProblem::linear(table, 1.0 - s).spectrum())
        .collect::<Result<_>>()?;

    let spectra_for = |x: u64| -> Result<Vec<Vec<f64>>> {
        let path = PathOperator::mirrored(table.clone(), x, Schedule::linear())?;
        grid.iter()
            .map(|&s| dense_eigenvalues(&path.dense_weighted(1.0 - s, s)?))
            .collect()
    };
    let base = spectra_for(0)?;
    let cases: Vec<MarkedCase> = (0..1u64 << n)
        .into_par_iter()
        .map(|x| {
            let spectra = if x == 0 {
                base.clone()
            } else {
                spectra_for(x)?
            };
            let mut dev_across_x = 0.0f64;
            let mut dev_secular = 0.0f64;
            for (k, spec) in spectra.iter().enumerate() {
                dev_across_x = dev_across_x.max(max_abs_diff(spec, &base[k]));
                dev_secular = dev_secular.max(max_abs_diff(spec, &reference[k]));
            }
            Ok(MarkedCase {
                x,
                dev_across_x,
                dev_secular,
            })
        })
        .collect::<Result<_>>()?;

    let max_dev = cases
        .iter()
        .map(|c| c.dev_across_x.max(c.dev_secular))
        .fold(0.0, f64::max);
    Ok(EquivalenceVerdict {
        check: "lemma2".into(),
        max_dev,
        tolerance: LEMMA2_TOL,
        passed: max_dev <= LEMMA2_TOL,
        consequence: None,
        cases: cases.into_iter().map(CaseRecord::Marked).collect(),
    })
}

/// Rescaling identity for a validated schedule on `grid` uniform points plus
/// the preimages of the linear-path minimum.
pub fn path_rescaling_check(
    table: &SpectrumTable,
    schedule: &Schedule,
    grid: usize,
) -> Result<EquivalenceVerdict> {
    rescaling_check_weights(table, |u| schedule.weights(u), Some(schedule.c2()), grid)
}

/// Rescaling identity for arbitrary weights. Without `c2` the observed
/// maximum of `f + g` on the grid is used for the consequence.
pub fn rescaling_check_weights<W>(
    table: &SpectrumTable,
    weights: W,
    c2: Option<f64>,
    grid: usize,
) -> Result<EquivalenceVerdict>
where
    W: Fn(f64) -> (f64, f64) + Sync,
{
    let linear = min_gap(table, DEFAULT_GRID, DEFAULT_TOL)?;
    let s_of = |u: f64| {
        let (f, g) = weights(u);
        g / (f + g)
    };
    let mut points = s_grid(grid);
    points.extend(zero_crossings(|u| s_of(u) - linear.s_star, grid.max(2)));
    points.sort_by(f64::total_cmp);
    points.dedup();

    let solver = GapSolver::Secular(table);
    let cases: Vec<RescalingCase> = points
        .par_iter()
        .map(|&u| {
            let (f, g) = weights(u);
            let scale = f + g;
            let s = g / scale;
            let gap_path = solver.lowest_pair(f, g)?.gap;
            let gap_rescaled = scale * solver.linear(s)?.gap;
            Ok(RescalingCase {
                u,
                scale,
                s,
                gap_path,
                gap_rescaled,
                dev: (gap_path - gap_rescaled).abs(),
            })
        })
        .collect::<Result<_>>()?;

    let max_dev = cases.iter().map(|c| c.dev).fold(0.0, f64::max);
    let c2 = c2.unwrap_or_else(|| cases.iter().map(|c| c.scale).fold(f64::MIN, f64::max));
    let best = cases
        .iter()
        .min_by(|a, b| a.gap_path.total_cmp(&b.gap_path))
        .expect("grid is non-empty");
    let margin = c2 * linear.g_min - best.gap_path;
    let consequence = RescalingConsequence {
        c2,
        g_min_linear: linear.g_min,
        s_star: linear.s_star,
        g_min_path: best.gap_path,
        u_star: best.u,
        margin,
        holds: margin > 0.0,
    };
    Ok(EquivalenceVerdict {
        check: "rescaling".into(),
        max_dev,
        tolerance: RESCALING_TOL,
        passed: max_dev <= RESCALING_TOL && consequence.holds,
        consequence: Some(consequence),
        cases: cases.into_iter().map(CaseRecord::Rescaling).collect(),
    })
}
