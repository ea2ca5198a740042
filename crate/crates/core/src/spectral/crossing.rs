//! Auxiliary lines `λ′₁(s) = 1 − (1 + 1/m)s` and `λ′₂(s) = 1 − (1 − 1/m)s`
//! and the abscissas where they meet the two lowest eigenvalue curves.
//!
//! On `(s1, s2)` both curves sit between the two lines, whose separation is
//! `2s/m < 2/m`, so the gap inside that window is below `2/m`.

use serde::Serialize;

use crate::error::Result;
use crate::objective::SpectrumTable;

use super::gap::{min_gap, DEFAULT_GRID, DEFAULT_TOL};
use super::secular::{SecularLevel, SecularProblem};

/// Default exponent divisor `d` in `2^(n/2 − n/d)`.
pub const DEFAULT_DIVISOR: f64 = 100.0;

/// Default number of window samples used to verify the sandwich.
pub const SANDWICH_GRID: usize = 10_000;

/// `2^(n/2 − n/divisor)`.
pub fn lemma_scale(n: u32, divisor: f64) -> f64 {
    let n = n as f64;
    (n / 2.0 - n / divisor).exp2()
}

/// `1 / (1 + N / Σ_j μ_j/(a_j + shift))` on a normalized table, or `None`
/// when the sum vanishes or the result leaves `(0, 1)`.
fn crossing_abscissa(table: &SpectrumTable, shift: f64, include_ground: bool) -> Option<f64> {
    let sum: f64 = table
        .entries()
        .iter()
        .enumerate()
        .filter(|(j, _)| include_ground || *j != 0)
        .map(|(_, e)| e.mult as f64 / (e.value + shift))
        .sum();
    if !sum.is_finite() || sum == 0.0 {
        return None;
    }
    let s = 1.0 / (1.0 + table.dim_f64() / sum);
    (s > 0.0 && s < 1.0).then_some(s)
}

/// `(s1, s2)` when both are defined.
pub fn crossing_abscissas(
    table: &SpectrumTable,
    m: f64,
    include_ground: bool,
) -> Option<(f64, f64)> {
    let s1 = crossing_abscissa(table, 1.0 / m, include_ground)?;
    let s2 = crossing_abscissa(table, -1.0 / m, include_ground)?;
    Some((s1, s2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingOptions {
    /// Keep the `j = 1` term (value 0) in both sums.
    pub include_ground_term: bool,
    pub sandwich_grid: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions {
            include_ground_term: true,
            sandwich_grid: SANDWICH_GRID,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingReport {
    pub m: f64,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub ordered: bool,
    /// Both lowest curves lie between the lines at every window sample.
    pub sandwich_holds: bool,
    pub bound_holds: bool,
    /// Global minimum gap of the path.
    pub g_min: f64,
    /// Smallest gap seen on the window samples.
    pub window_gap_min: Option<f64>,
    pub two_over_m: f64,
    /// `min (λ₁ − λ′₁)` over the window samples.
    pub lower_margin: Option<f64>,
    /// `min (λ′₂ − λ₂)` over the window samples.
    pub upper_margin: Option<f64>,
    pub window_samples: usize,
    pub include_ground_term: bool,
}

/// Crossing abscissas and sandwich check for the uniform-projector path.
/// The table is shifted to a zero minimum first.
pub fn crossing_points(table: &SpectrumTable, m: f64) -> Result<CrossingReport> {
    crossing_points_with(table, m, &CrossingOptions::default())
}

pub fn crossing_points_with(
    table: &SpectrumTable,
    m: f64,
    opts: &CrossingOptions,
) -> Result<CrossingReport> {
    let (table, _) = table.normalize_shift();
    let s1 = crossing_abscissa(&table, 1.0 / m, opts.include_ground_term);
    let s2 = crossing_abscissa(&table, -1.0 / m, opts.include_ground_term);
    let ordered = matches!((s1, s2), (Some(a), Some(b)) if a < b);
    let g_min = min_gap(&table, DEFAULT_GRID, DEFAULT_TOL)?.g_min;

    let mut report = CrossingReport {
        m,
        s1,
        s2,
        ordered,
        sandwich_holds: false,
        bound_holds: false,
        g_min,
        window_gap_min: None,
        two_over_m: 2.0 / m,
        lower_margin: None,
        upper_margin: None,
        window_samples: 0,
        include_ground_term: opts.include_ground_term,
    };
    let (Some(a), Some(b)) = (s1, s2) else {
        return Ok(report);
    };
    if !ordered {
        return Ok(report);
    }

    let count = opts.sandwich_grid.max(1);
    let ground_pole = SecularLevel {
        pole: 0,
        offset: 0.0,
        deflated: true,
    };
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    let mut window_gap = f64::INFINITY;
    for i in 1..=count {
        let s = a + (b - a) * i as f64 / (count + 1) as f64;
        let prob = SecularProblem::linear(&table, s);
        let lv = prob.lowest_levels(2)?;
        // positions relative to d₀ = 1 − s, where λ′₁ = −s/m and λ′₂ = +s/m
        let rel1 = prob.separation(&ground_pole, &lv[0]);
        let rel2 = prob.separation(&ground_pole, &lv[1]);
        lower = lower.min(rel1 + s / m);
        upper = upper.min(s / m - rel2);
        window_gap = window_gap.min(prob.separation(&lv[0], &lv[1]));
    }
    report.window_samples = count;
    report.lower_margin = Some(lower);
    report.upper_margin = Some(upper);
    report.window_gap_min = Some(window_gap);
    report.sandwich_holds = lower > 0.0 && upper > 0.0;
    report.bound_holds = report.sandwich_holds && window_gap < 2.0 / m;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{build_instance, InstanceSpec, DEFAULT_BOUND};

    fn grover(n: u32) -> SpectrumTable {
        build_instance(&InstanceSpec::Grover, n, DEFAULT_BOUND)
            .unwrap()
            .table
    }

    #[test]
    fn small_grover_coincides() {
        let r = crossing_points(&grover(4), 4.0).unwrap();
        assert_eq!(r.s1, Some(0.5));
        assert_eq!(r.s2, Some(0.5));
        assert!(!r.ordered);
        assert!(!r.bound_holds);
    }

    #[test]
    fn large_grover_sandwich() {
        let n = 20;
        let m = lemma_scale(n, DEFAULT_DIVISOR);
        let r = crossing_points(&grover(n), m).unwrap();
        assert!(r.ordered);
        assert!(r.sandwich_holds);
        assert!(r.bound_holds);
        assert!(r.g_min < 2.0 / m);
    }

    #[test]
    fn undefined_when_sum_vanishes() {
        // Σ μ/(a − 1/m) = 1/(−0.5) + 1/0.5 = 0
        let t = SpectrumTable::new(1, [(0.0, 1), (1.0, 1)], DEFAULT_BOUND).unwrap();
        let r = crossing_points(&t, 1.0 / 0.5).unwrap();
        assert_eq!(r.s2, None);
        assert!(!r.ordered);
    }

    #[test]
    fn excluding_ground_term_changes_s2() {
        let t = grover(10);
        let m = 8.0;
        let with = crossing_points_with(&t, m, &CrossingOptions::default()).unwrap();
        let without = crossing_points_with(
            &t,
            m,
            &CrossingOptions {
                include_ground_term: false,
                ..CrossingOptions::default()
            },
        )
        .unwrap();
        assert!(without.s2.unwrap() > with.s2.unwrap());
    }
}
