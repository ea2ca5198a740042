//! Schrödinger evolution along a path and the adiabatic running-time budget
//! `D_max / g_min² ≤ ε`.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{Assignment, EndpointForm, PathFamily, PathOperator, Schedule};
use crate::objective::{build_instance, InstanceSpec, SpectrumTable};
use crate::output::fmt_f64;
use crate::spectral::{
    dense_oracle, expand_vector, min_gap, min_gap_path, GapProfile, MinGapOptions, SecularProblem,
    DEFAULT_GRID, DEFAULT_TOL,
};
use crate::walsh::fwht;

/// Largest qubit count [`evolve`] accepts.
pub const EVOLUTION_MAX_QUBITS: u32 = 14;

/// Total norm drift tolerated before an integration is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Step-doubling target on the success probability.
pub const CONVERGENCE_TARGET: f64 = 1e-6;

/// Lower bound on the default step count.
pub const MIN_DEFAULT_STEPS: usize = 1000;

/// Default step cap for [`evolve_converged`].
pub const MAX_CONVERGED_STEPS: usize = 1 << 22;

/// Relative gap below which the lowest pair counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// Half-width, in grid cells, of the refinement window around the minimum
/// gap used by [`dmax`].
const WINDOW_HALF: i32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub amplitudes: Vec<Complex64>,
}

impl WaveState {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// A grid point whose lowest pair is degenerate; its matrix element is kept
/// out of `d_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlaggedPoint {
    pub u: f64,
    pub element: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DmaxReport {
    pub time: f64,
    pub d_max: f64,
    pub u_max: f64,
    pub samples: usize,
    pub flagged: Vec<FlaggedPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdiabaticBudget {
    /// `D_max` at `T = 1`; `D_max(T)` is this divided by `T`.
    pub d_max: f64,
    pub g_min: f64,
    pub u_star: f64,
    pub epsilon: f64,
    /// `None` when the minimum gap is zero.
    pub t_required: Option<f64>,
    pub unbounded: bool,
}

impl AdiabaticBudget {
    /// `D_max(T)/g_min² ≤ ε` at `T = t_required`.
    pub fn satisfied(&self) -> bool {
        match self.t_required {
            Some(t) => self.d_max / t / (self.g_min * self.g_min) <= self.epsilon,
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub u: f64,
    /// Weight in the instantaneous ground space.
    pub overlap2: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    pub final_state: WaveState,
    pub success_probability: f64,
    pub time: f64,
    pub steps: usize,
    /// Largest `|‖ψ‖ − 1|` seen after any step.
    pub norm_drift: f64,
    pub trajectory: Option<Vec<TrajectorySample>>,
}

impl EvolutionResult {
    pub fn trajectory_csv(&self) -> Option<String> {
        let rows = self.trajectory.as_ref()?;
        let mut out = String::from("u,overlap2,norm\n");
        for r in rows {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(r.u),
                fmt_f64(r.overlap2),
                fmt_f64(r.norm)
            ));
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergedEvolution {
    pub result: EvolutionResult,
    /// `|P(steps) − P(steps/2)|` at the returned step count.
    pub change: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvolveOptions {
    /// `None` uses `max(1000, 50·T·max‖H‖)`.
    pub steps: Option<usize>,
    /// Number of trajectory samples; 0 disables the trajectory.
    pub trajectory: usize,
}

// ---------------------------------------------------------------------------
// minimum gap along a path

/// Minimum gap along the path in `u`. Linear uniform-projector paths reuse
/// the crossing-window search of [`min_gap`].
pub fn path_min_gap(path: &PathOperator, grid: usize, tol: f64) -> Result<GapProfile> {
    if let PathFamily::UniformProjector { table } = path.family() {
        if path.schedule().is_linear() {
            return min_gap(table, grid, tol);
        }
    }
    min_gap_path(
        path,
        &MinGapOptions {
            grid,
            tol,
            ..MinGapOptions::default()
        },
    )
}

// ---------------------------------------------------------------------------
// transition matrix elements

/// `|⟨E₁|(dp·(I − |α⟩⟨α|) + dq·diag(a))|E₀⟩|` and the gap, on the
/// uniform-projector path with weights `(p, q)`. `None` for the element
/// means the lowest pair is degenerate.
fn projector_element(
    table: &SpectrumTable,
    p: f64,
    q: f64,
    dp: f64,
    dq: f64,
) -> Result<(Option<f64>, f64)> {
    let prob = SecularProblem::weighted(table, p, q);
    let levels = prob.lowest_levels(2)?;
    let gap = prob.separation(&levels[0], &levels[1]);
    let scale = prob.value(&levels[0]).abs().max(1.0);
    if gap <= DEGENERACY_TOL * scale {
        return Ok((None, gap));
    }
    if levels[0].deflated || levels[1].deflated {
        // a deflated vector is orthogonal to |α⟩ and to every level-constant
        // vector, so both terms vanish
        return Ok((Some(0.0), gap));
    }
    let v0 = prob.eigenvector(&levels[0])?;
    let v1 = prob.eigenvector(&levels[1])?;
    let entries = table.entries();
    let dim = table.dim_f64();
    let alpha = |v: &[f64]| -> f64 {
        v.iter()
            .zip(entries)
            .map(|(c, e)| c * (e.mult as f64).sqrt())
            .sum::<f64>()
            / dim.sqrt()
    };
    let overlap: f64 = v0.iter().zip(&v1).map(|(a, b)| a * b).sum();
    let diag: f64 = v0
        .iter()
        .zip(&v1)
        .zip(entries)
        .map(|((a, b), e)| a * b * e.value)
        .sum();
    let proj = overlap - alpha(&v1) * alpha(&v0);
    Ok((Some((dp * proj + dq * diag).abs()), gap))
}

/// Single-qubit factor of the separable path: `h = p·|−⟩⟨−| + q·|1⟩⟨1|`.
/// The excited vector is one flipped qubit, so the element does not grow
/// with `n`.
fn hamming_element(p: f64, q: f64, dp: f64, dq: f64) -> (Option<f64>, f64) {
    let h = Matrix2::new(p / 2.0, -p / 2.0, -p / 2.0, p / 2.0 + q);
    let dh = Matrix2::new(dp / 2.0, -dp / 2.0, -dp / 2.0, dp / 2.0 + dq);
    let eig = h.symmetric_eigen();
    let (i0, i1) = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let gap = (p * p + q * q).sqrt();
    if gap <= DEGENERACY_TOL {
        return (None, gap);
    }
    let e0 = eig.eigenvectors.column(i0);
    let e1 = eig.eigenvectors.column(i1);
    (Some((e1.transpose() * dh * e0)[(0, 0)].abs()), gap)
}

fn dense_element(
    path: &PathOperator,
    f: f64,
    g: f64,
    df: f64,
    dg: f64,
) -> Result<(Option<f64>, f64)> {
    let spec = dense_oracle(&path.dense_weighted(f, g)?)?;
    let gap = spec.values[1] - spec.values[0];
    if gap <= DEGENERACY_TOL * spec.values[0].abs().max(1.0) {
        return Ok((None, gap));
    }
    let dh = path.dense_weighted(df, dg)?;
    let e0 = spec.vector(0);
    let e1 = spec.vector(1);
    Ok((Some((e1.transpose() * dh * e0)[(0, 0)].abs()), gap))
}

/// `|⟨E₁,u|(f′(u)·H₀ + g′(u)·H₁)|E₀,u⟩|` at `T = 1`, or `None` when the
/// lowest pair is degenerate, together with the gap.
pub fn transition_element(path: &PathOperator, u: f64) -> Result<(Option<f64>, f64)> {
    let (f, g) = path.schedule().weights(u);
    let (df, dg) = path.schedule().derivatives(u);
    match path.family() {
        PathFamily::UniformProjector { table } => projector_element(table, f, g, df, dg),
        PathFamily::MirroredProjector { table, .. } => projector_element(table, g, f, dg, df),
        PathFamily::HammingSeparable { .. } => Ok(hamming_element(f, g, df, dg)),
        PathFamily::General => dense_element(path, f, g, df, dg),
    }
}

fn dmax_points(path: &PathOperator, grid: usize, profile: &GapProfile) -> Vec<f64> {
    let grid = grid.max(2);
    let mut points: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    let u0 = profile.s_star;
    let s_of = |u: f64| path.schedule().normalized_point(u).s;
    let du = 1e-6;
    let slope = ((s_of((u0 + du).min(1.0)) - s_of((u0 - du).max(0.0))) / (2.0 * du)).abs();
    if profile.g_min > 0.0 && slope > 0.0 {
        let h = (profile.g_min / slope / 8.0).min(1.0 / grid as f64);
        for k in -WINDOW_HALF..=WINDOW_HALF {
            let u = u0 + k as f64 * h;
            if (0.0..=1.0).contains(&u) {
                points.push(u);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

fn dmax_with_profile(
    path: &PathOperator,
    time: f64,
    grid: usize,
    profile: &GapProfile,
) -> Result<DmaxReport> {
    if !(time > 0.0 && time.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "evolution time must be > 0, got {time}"
        )));
    }
    let points = dmax_points(path, grid, profile);
    let elements: Vec<(f64, Option<f64>)> = points
        .par_iter()
        .map(|&u| Ok((u, transition_element(path, u)?.0)))
        .collect::<Result<_>>()?;
    let mut d_max = 0.0;
    let mut u_max = 0.0;
    let mut flagged = Vec::new();
    for (u, e) in elements {
        match e {
            Some(e) if e > d_max => {
                d_max = e;
                u_max = u;
            }
            Some(_) => {}
            None => {
                let (df, dg) = path.schedule().derivatives(u);
                flagged.push(FlaggedPoint {
                    u,
                    element: (df.abs() + dg.abs()) / time,
                });
            }
        }
    }
    Ok(DmaxReport {
        time,
        d_max: d_max / time,
        u_max,
        samples: points.len(),
        flagged,
    })
}

/// Largest transition element of `dH/dt = (f′H₀ + g′H₁)/T` over a uniform
/// `u` grid refined around the minimum gap. For flagged (degenerate) points
/// the reported element is the bound `(|f′| + |g′|)/T`, since the excited
/// vector is not defined there.
pub fn dmax(path: &PathOperator, time: f64, grid: usize) -> Result<DmaxReport> {
    let profile = path_min_gap(path, grid.max(DEFAULT_GRID), DEFAULT_TOL)?;
    dmax_with_profile(path, time, grid, &profile)
}

/// Smallest `T` with `D_max(T)/g_min² ≤ ε`.
pub fn required_time(path: &PathOperator, epsilon: f64, grid: usize) -> Result<AdiabaticBudget> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let profile = path_min_gap(path, grid.max(DEFAULT_GRID), DEFAULT_TOL)?;
    let g_min = profile.g_min;
    if profile.zero_gap || g_min <= 0.0 {
        return Ok(AdiabaticBudget {
            d_max: f64::NAN,
            g_min,
            u_star: profile.s_star,
            epsilon,
            t_required: None,
            unbounded: true,
        });
    }
    let report = dmax_with_profile(path, 1.0, grid, &profile)?;
    let mut t = report.d_max / (epsilon * g_min * g_min);
    while report.d_max / t / (g_min * g_min) > epsilon {
        t = t.next_up();
    }
    Ok(AdiabaticBudget {
        d_max: report.d_max,
        g_min,
        u_star: profile.s_star,
        epsilon,
        t_required: Some(t),
        unbounded: false,
    })
}

// ---------------------------------------------------------------------------
// integration

enum Factor {
    Uniform,
    Marked(usize),
    Computational(Vec<f64>),
    Hadamard(Vec<f64>),
}

impl Factor {
    fn new(form: &EndpointForm) -> Result<Self> {
        Ok(match form {
            EndpointForm::UniformProjectorComplement { .. } => Factor::Uniform,
            EndpointForm::MarkedProjectorComplement { marked, .. } => {
                Factor::Marked(*marked as usize)
            }
            EndpointForm::DiagonalCost { basis, .. } => {
                let diag = form
                    .diagonal_entries()?
                    .expect("cost endpoint has a diagonal")
                    .into_owned();
                match basis {
                    crate::hamiltonian::Basis::Computational => Factor::Computational(diag),
                    crate::hamiltonian::Basis::Hadamard => Factor::Hadamard(diag),
                }
            }
        })
    }

    /// `v ← exp(−iθH)·v`.
    fn exp_apply(&self, theta: f64, v: &mut [Complex64]) {
        if theta == 0.0 {
            return;
        }
        let phase = |x: f64| Complex64::from_polar(1.0, -theta * x);
        match self {
            Factor::Uniform => {
                let mean = v.iter().sum::<Complex64>() / v.len() as f64;
                let e = phase(1.0);
                for x in v.iter_mut() {
                    *x = (*x - mean) * e + mean;
                }
            }
            Factor::Marked(m) => {
                let keep = v[*m];
                let e = phase(1.0);
                v.iter_mut().for_each(|x| *x *= e);
                v[*m] = keep;
            }
            Factor::Computational(a) => {
                for (x, a) in v.iter_mut().zip(a) {
                    *x *= phase(*a);
                }
            }
            Factor::Hadamard(a) => {
                fwht(v);
                for (x, a) in v.iter_mut().zip(a) {
                    *x *= phase(*a);
                }
                fwht(v);
            }
        }
    }
}

fn state_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Default step count `max(1000, ⌈50·T·max‖H‖⌉)`.
pub fn default_steps(path: &PathOperator, time: f64) -> usize {
    let est = (50.0 * time * path.max_energy()).ceil();
    if est.is_finite() && est > MIN_DEFAULT_STEPS as f64 {
        est as usize
    } else {
        MIN_DEFAULT_STEPS
    }
}

/// Weight of `psi` in the ground space of `H(u)`.
pub fn instantaneous_ground_weight(path: &PathOperator, u: f64, psi: &[Complex64]) -> Result<f64> {
    let (f, g) = path.schedule().weights(u);
    if g == 0.0 {
        return path.h0().ground_space_weight(psi);
    }
    if f == 0.0 {
        return path.h1().ground_space_weight(psi);
    }
    if let (
        PathFamily::UniformProjector { table },
        EndpointForm::DiagonalCost {
            assignment: Assignment::Canonical,
            ..
        },
    ) = (path.family(), path.h1())
    {
        if f > 0.0 {
            let prob = SecularProblem::weighted(table, f, g);
            let level = prob.root(0)?;
            let v = expand_vector(table, &prob.eigenvector(&level)?)?;
            let overlap: Complex64 = v.iter().zip(psi).map(|(a, b)| b * *a).sum();
            return Ok(overlap.norm_sqr());
        }
    }
    let spec = dense_oracle(&path.dense_weighted(f, g)?)?;
    let cutoff = spec.values[0] + DEGENERACY_TOL * spec.values[0].abs().max(1.0);
    let mut weight = 0.0;
    for (k, _) in spec
        .values
        .iter()
        .enumerate()
        .take_while(|(_, l)| **l <= cutoff)
    {
        let vk = spec.vector(k);
        let overlap: Complex64 = vk.iter().zip(psi).map(|(a, b)| b * *a).sum();
        weight += overlap.norm_sqr();
    }
    Ok(weight)
}

/// Integrates `i dψ/dt = H(t/T)ψ` from the ground state of `H₀` with Strang
/// splitting at the step midpoint: `e^{−iΔt f H₀/2} e^{−iΔt g H₁} e^{−iΔt f H₀/2}`.
/// Every factor is applied exactly, so the map is unitary up to rounding.
pub fn evolve(path: &PathOperator, time: f64, opts: &EvolveOptions) -> Result<EvolutionResult> {
    let n = path.n();
    if n > EVOLUTION_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "evolution qubits",
            requested: n as usize,
            limit: EVOLUTION_MAX_QUBITS as usize,
        });
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "evolution time must be ≥ 0, got {time}"
        )));
    }
    let mut psi = path.h0().ground_state()?;
    if time == 0.0 {
        let success = path.h1().ground_space_weight(&psi)?;
        let trajectory = (opts.trajectory > 0).then(|| {
            vec![TrajectorySample {
                u: 0.0,
                overlap2: 1.0,
                norm: state_norm(&psi),
            }]
        });
        return Ok(EvolutionResult {
            final_state: WaveState { amplitudes: psi },
            success_probability: success.clamp(0.0, 1.0),
            time,
            steps: 0,
            norm_drift: 0.0,
            trajectory,
        });
    }
    let steps = opts.steps.unwrap_or_else(|| default_steps(path, time));
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    let h0 = Factor::new(path.h0())?;
    let h1 = Factor::new(path.h1())?;
    let dt = time / steps as f64;
    let sample_every = steps
        .checked_div(opts.trajectory)
        .map_or(usize::MAX, |k| k.max(1));
    let mut trajectory = (opts.trajectory > 0).then(Vec::new);
    if let Some(t) = trajectory.as_mut() {
        t.push(TrajectorySample {
            u: 0.0,
            overlap2: instantaneous_ground_weight(path, 0.0, &psi)?,
            norm: state_norm(&psi),
        });
    }
    let mut drift = 0.0f64;
    for k in 0..steps {
        let um = (k as f64 + 0.5) / steps as f64;
        let (f, g) = path.schedule().weights(um);
        h0.exp_apply(0.5 * dt * f, &mut psi);
        h1.exp_apply(dt * g, &mut psi);
        h0.exp_apply(0.5 * dt * f, &mut psi);
        let norm = state_norm(&psi);
        drift = drift.max((norm - 1.0).abs());
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::IntegrationQuality {
                drift,
                steps,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        if let Some(t) = trajectory.as_mut() {
            if (k + 1) % sample_every == 0 || k + 1 == steps {
                let u = (k + 1) as f64 / steps as f64;
                t.push(TrajectorySample {
                    u,
                    overlap2: instantaneous_ground_weight(path, u, &psi)?,
                    norm,
                });
            }
        }
    }
    let success = path.h1().ground_space_weight(&psi)?;
    Ok(EvolutionResult {
        final_state: WaveState { amplitudes: psi },
        success_probability: success.clamp(0.0, 1.0),
        time,
        steps,
        norm_drift: drift,
        trajectory,
    })
}

/// Doubles the step count from `opts.steps` (or the default) until the
/// success probability changes by at most `target`, or `max_steps` is hit.
pub fn evolve_converged(
    path: &PathOperator,
    time: f64,
    opts: &EvolveOptions,
    target: f64,
    max_steps: usize,
) -> Result<ConvergedEvolution> {
    let mut steps = opts
        .steps
        .unwrap_or_else(|| default_steps(path, time))
        .max(2);
    let run = |steps: usize| {
        evolve(
            path,
            time,
            &EvolveOptions {
                steps: Some(steps),
                trajectory: 0,
            },
        )
    };
    let mut prev = run(steps)?;
    if time == 0.0 {
        return Ok(ConvergedEvolution {
            result: evolve(path, time, opts)?,
            change: 0.0,
            converged: true,
        });
    }
    loop {
        let next_steps = steps * 2;
        let next = run(next_steps)?;
        let change = (next.success_probability - prev.success_probability).abs();
        let converged = change <= target;
        if converged || next_steps * 2 > max_steps {
            let result = if opts.trajectory > 0 {
                evolve(
                    path,
                    time,
                    &EvolveOptions {
                        steps: Some(next_steps),
                        trajectory: opts.trajectory,
                    },
                )?
            } else {
                next
            };
            return Ok(ConvergedEvolution {
                result,
                change,
                converged,
            });
        }
        steps = next_steps;
        prev = next;
    }
}

// ---------------------------------------------------------------------------
// experiments

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub g_min: f64,
    pub d_max: f64,
    pub t_required: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub instance: String,
    pub epsilon: f64,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log₂ t_required` against `n`; `None` with
    /// fewer than two finite rows.
    pub slope: Option<f64>,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,g_min,d_max,t_required\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n,
                fmt_f64(r.g_min),
                fmt_f64(r.d_max),
                r.t_required.map(fmt_f64).unwrap_or_default()
            ));
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn budget_for(
    spec: &InstanceSpec,
    n: u32,
    schedule: &Schedule,
    epsilon: f64,
    grid: usize,
) -> Result<AdiabaticBudget> {
    let instance = build_instance(spec, n, crate::objective::DEFAULT_BOUND)?;
    let path = PathOperator::for_instance(&instance, schedule.clone())?;
    required_time(&path, epsilon, grid)
}

/// `g_min` and `t_required` for every `n` in the range, with the fitted
/// growth rate of `log₂ t_required`.
pub fn runtime_scaling_experiment(
    spec: &InstanceSpec,
    n_range: RangeInclusive<u32>,
    epsilon: f64,
    schedule: &Schedule,
    grid: usize,
) -> Result<ScalingTable> {
    let rows: Vec<ScalingRow> = n_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let b = budget_for(spec, n, schedule, epsilon, grid)?;
            Ok(ScalingRow {
                n,
                g_min: b.g_min,
                d_max: b.d_max,
                t_required: b.t_required,
            })
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_required.map(|t| (r.n as f64, t.log2())))
        .collect();
    Ok(ScalingTable {
        instance: spec.kind().name().into(),
        epsilon,
        slope: fit_slope(&pts),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub g_min: f64,
    pub t_required: Option<f64>,
    pub success_probability: Option<f64>,
    #[serde(rename = "T")]
    pub time: Option<f64>,
    pub steps: Option<usize>,
}

/// Renders sweep rows; missing values are empty cells.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut out = String::from("n,g_min,t_required,success_probability,T,steps\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            fmt_f64(r.g_min),
            opt(r.t_required),
            opt(r.success_probability),
            opt(r.time),
            r.steps.map(|s| s.to_string()).unwrap_or_default()
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub epsilon: f64,
    pub grid: usize,
    /// Evolution time; `None` with `steps` set uses `10·t_required`.
    pub time: Option<f64>,
    pub steps: Option<usize>,
}

/// Budget per `n`, plus an evolution when a time or step count is given.
pub fn sweep(
    spec: &InstanceSpec,
    n_range: RangeInclusive<u32>,
    schedule: &Schedule,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    let run_evolution = opts.time.is_some() || opts.steps.is_some();
    n_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let b = budget_for(spec, n, schedule, opts.epsilon, opts.grid)?;
            let mut row = SweepRow {
                n,
                g_min: b.g_min,
                t_required: b.t_required,
                success_probability: None,
                time: None,
                steps: None,
            };
            if run_evolution {
                let time = match (opts.time, b.t_required) {
                    (Some(t), _) => t,
                    (None, Some(t)) => 10.0 * t,
                    (None, None) => return Ok(row),
                };
                let instance = build_instance(spec, n, crate::objective::DEFAULT_BOUND)?;
                let path = PathOperator::for_instance(&instance, schedule.clone())?;
                let r = evolve(
                    &path,
                    time,
                    &EvolveOptions {
                        steps: opts.steps,
                        trajectory: 0,
                    },
                )?;
                row.success_probability = Some(r.success_probability);
                row.time = Some(time);
                row.steps = Some(r.steps);
            }
            Ok(row)
        })
        .collect()
}

/// Dense matrix of `dH/du` at `T = 1` (used for cross-checks).
pub fn dense_derivative(path: &PathOperator, u: f64) -> Result<DMatrix<f64>> {
    let (df, dg) = path.schedule().derivatives(u);
    path.dense_weighted(df, dg)
}
