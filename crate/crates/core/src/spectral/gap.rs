use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hamiltonian::{PathFamily, PathOperator};
use crate::objective::{Instance, SpectrumTable};

use super::dense::dense_eigenvalues;
use super::secular::SecularProblem;

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Extra samples placed inside the crossing window `(s1, s2)`.
pub const WINDOW_POINTS: usize = 4096;
pub const MIN_GRID: usize = 64;

/// Two lowest eigenvalues at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapSample {
    pub s: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
}

impl GapSample {
    /// Exact degeneracy of the two lowest levels.
    pub fn is_crossing(&self) -> bool {
        self.gap == 0.0
    }
}

/// Sampled gap curve and its located minimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapProfile {
    pub samples: Vec<GapSample>,
    pub s_star: f64,
    pub g_min: f64,
    /// The minimum is an exact zero (degenerate ground level).
    pub zero_gap: bool,
}

impl GapProfile {
    pub fn to_csv(&self) -> String {
        use crate::output::fmt_f64;
        let mut out = String::from("s,lambda1,lambda2,gap\n");
        for p in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(p.s),
                fmt_f64(p.lambda1),
                fmt_f64(p.lambda2),
                fmt_f64(p.gap)
            ));
        }
        out
    }
}

/// How the two lowest eigenvalues of `p·H₀ + q·H₁` are obtained.
#[derive(Clone, Copy, Debug)]
pub enum GapSolver<'a> {
    /// Uniform-projector family: secular equation on the compressed table.
    Secular(&'a SpectrumTable),
    /// Hadamard-mirrored family: secular equation with the weights exchanged.
    MirroredSecular(&'a SpectrumTable),
    /// Hamming-weight tensor sum: single-qubit closed form.
    HammingSeparable { n: u32 },
    /// Dense diagonalization of the materialized path.
    Dense(&'a PathOperator),
}

impl<'a> GapSolver<'a> {
    pub fn for_path(path: &'a PathOperator) -> Self {
        match path.family() {
            PathFamily::UniformProjector { table } => GapSolver::Secular(table),
            PathFamily::MirroredProjector { table, .. } => GapSolver::MirroredSecular(table),
            PathFamily::HammingSeparable { n } => GapSolver::HammingSeparable { n },
            PathFamily::General => GapSolver::Dense(path),
        }
    }

    /// Hamming-weight instances use their structured path; everything else the
    /// uniform-projector path.
    pub fn for_instance(instance: &'a Instance) -> Self {
        if instance.uses_structured_path() {
            GapSolver::HammingSeparable {
                n: instance.table.n(),
            }
        } else {
            GapSolver::Secular(&instance.table)
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            GapSolver::Secular(_) => "uniform-projector",
            GapSolver::MirroredSecular(_) => "mirrored-projector",
            GapSolver::HammingSeparable { .. } => "hamming-separable",
            GapSolver::Dense(_) => "general",
        }
    }

    /// Whether the path belongs to the family whose gap the exponential
    /// bounds describe (the uniform projector at one end).
    pub fn in_projector_family(&self) -> bool {
        matches!(self, GapSolver::Secular(_) | GapSolver::MirroredSecular(_))
    }

    /// Lowest two eigenvalues and their separation for weights `(p, q)` on
    /// `(H₀, H₁)`. The sample's `s` is set to `q / (p + q)`.
    pub fn lowest_pair(&self, p: f64, q: f64) -> Result<GapSample> {
        let s = q / (p + q);
        let (lambda1, lambda2, gap) = match self {
            GapSolver::Secular(table) => secular_pair(table, p, q)?,
            GapSolver::MirroredSecular(table) => secular_pair(table, q, p)?,
            GapSolver::HammingSeparable { n } => {
                // per qubit: p·|−⟩⟨−| + q·|1⟩⟨1|, eigenvalues (p + q ± √(p² + q²))/2
                let root = p.hypot(q);
                let low = 0.5 * (p + q - root);
                let lambda1 = *n as f64 * low;
                (lambda1, lambda1 + root, root)
            }
            GapSolver::Dense(path) => {
                let values = dense_eigenvalues(&path.dense_weighted(p, q)?)?;
                (values[0], values[1], values[1] - values[0])
            }
        };
        Ok(GapSample {
            s,
            lambda1,
            lambda2,
            gap,
        })
    }

    /// Gap of the linear path at `s`.
    pub fn linear(&self, s: f64) -> Result<GapSample> {
        let mut sample = self.lowest_pair(1.0 - s, s)?;
        sample.s = s;
        Ok(sample)
    }
}

fn secular_pair(table: &SpectrumTable, p: f64, q: f64) -> Result<(f64, f64, f64)> {
    let prob = SecularProblem::weighted(table, p, q);
    let levels = prob.lowest_levels(2)?;
    Ok((
        prob.value(&levels[0]),
        prob.value(&levels[1]),
        prob.separation(&levels[0], &levels[1]),
    ))
}

/// `λ₂(s) − λ₁(s)` for the uniform-projector path.
pub fn gap(table: &SpectrumTable, s: f64) -> Result<f64> {
    Ok(GapSolver::Secular(table).linear(s)?.gap)
}

/// The `k` smallest eigenvalues of the uniform-projector path at `s`.
pub fn lowest_eigenvalues(table: &SpectrumTable, s: f64, k: usize) -> Result<Vec<f64>> {
    SecularProblem::linear(table, s).lowest(k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinGapOptions {
    pub grid: usize,
    pub tol: f64,
    /// Sample densely inside this interval in addition to the coarse grid.
    pub window: Option<(f64, f64)>,
    pub window_points: usize,
}

impl Default for MinGapOptions {
    fn default() -> Self {
        MinGapOptions {
            grid: DEFAULT_GRID,
            tol: DEFAULT_TOL,
            window: None,
            window_points: WINDOW_POINTS,
        }
    }
}

/// Minimum of `gap(x)` over `x ∈ [0, 1]`: a uniform scan followed by
/// golden-section refinement around every local minimum of the scan.
pub fn minimize_gap<F>(eval: F, opts: &MinGapOptions) -> Result<GapProfile>
where
    F: Fn(f64) -> Result<GapSample> + Sync,
{
    let grid = opts.grid.max(MIN_GRID);
    let mut xs: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    if let Some((a, b)) = opts.window {
        if a < b {
            let m = opts.window_points;
            xs.extend((1..=m).map(|i| a + (b - a) * i as f64 / (m + 1) as f64));
            xs.sort_by(f64::total_cmp);
            xs.dedup();
        }
    }
    let samples: Vec<GapSample> = xs
        .par_iter()
        .map(|&x| {
            let mut sample = eval(x)?;
            sample.s = x;
            Ok(sample)
        })
        .collect::<Result<_>>()?;

    let mut best = *samples
        .iter()
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("grid is non-empty");
    let last = samples.len() - 1;
    for i in 0..=last {
        let g = samples[i].gap;
        let left_ok = i == 0 || g <= samples[i - 1].gap;
        let right_ok = i == last || g < samples[i + 1].gap;
        if !(left_ok && right_ok) || g == 0.0 {
            continue;
        }
        let lo = samples[i.saturating_sub(1)].s;
        let hi = samples[(i + 1).min(last)].s;
        let refined = golden_section(&eval, lo, hi, opts.tol)?;
        if refined.gap < best.gap {
            best = refined;
        }
    }

    let mut samples = samples;
    if let Err(pos) = samples.binary_search_by(|p| p.s.total_cmp(&best.s)) {
        samples.insert(pos, best);
    }
    Ok(GapProfile {
        samples,
        s_star: best.s,
        g_min: best.gap,
        zero_gap: best.gap == 0.0,
    })
}

/// Golden-section search for the minimum gap on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`.
pub fn golden_section<F>(eval: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<GapSample>
where
    F: Fn(f64) -> Result<GapSample>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let at = |x: f64| -> Result<GapSample> {
        let mut sample = eval(x)?;
        sample.s = x;
        Ok(sample)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = at(x1)?;
    let mut f2 = at(x2)?;
    let mut best = if f1.gap <= f2.gap { f1 } else { f2 };
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1.gap <= f2.gap {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = at(x1)?;
            if f1.gap < best.gap {
                best = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = at(x2)?;
            if f2.gap < best.gap {
                best = f2;
            }
        }
    }
    Ok(best)
}

/// Minimum gap of the linear path for a given solver.
pub fn min_gap_linear(solver: &GapSolver<'_>, opts: &MinGapOptions) -> Result<GapProfile> {
    minimize_gap(|s| solver.linear(s), opts)
}

/// Minimum gap along a path's own schedule, parameterized by `u`.
pub fn min_gap_path(path: &PathOperator, opts: &MinGapOptions) -> Result<GapProfile> {
    let solver = GapSolver::for_path(path);
    let schedule = path.schedule();
    minimize_gap(
        |u| {
            let (f, g) = schedule.weights(u);
            solver.lowest_pair(f, g)
        },
        opts,
    )
}

/// Minimum gap of the uniform-projector path. When the crossing lines for
/// `m = 2^(n/2 − n/100)` are ordered, their window is sampled densely.
pub fn min_gap(table: &SpectrumTable, grid: usize, tol: f64) -> Result<GapProfile> {
    let (normalized, _) = table.normalize_shift();
    let m = super::crossing::lemma_scale(table.n(), super::crossing::DEFAULT_DIVISOR);
    let window =
        super::crossing::crossing_abscissas(&normalized, m, true).filter(|(s1, s2)| s1 < s2);
    let opts = MinGapOptions {
        grid,
        tol,
        window,
        ..MinGapOptions::default()
    };
    min_gap_linear(&GapSolver::Secular(table), &opts)
}

/// Minimum gap of an instance along its natural path.
pub fn min_gap_instance(instance: &Instance, grid: usize, tol: f64) -> Result<GapProfile> {
    match GapSolver::for_instance(instance) {
        GapSolver::Secular(table) => min_gap(table, grid, tol),
        solver => min_gap_linear(
            &solver,
            &MinGapOptions {
                grid,
                tol,
                ..MinGapOptions::default()
            },
        ),
    }
}
