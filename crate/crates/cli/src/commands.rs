use adiabatic_gap::equivalence::{
    lemma2_invariance_check, path_rescaling_check, LEMMA2_GRID, RESCALING_GRID,
};
use adiabatic_gap::evolution::{
    evolve, evolve_converged, fit_slope, required_time, sweep, sweep_csv, EvolveOptions,
    SweepOptions, CONVERGENCE_TARGET, MAX_CONVERGED_STEPS,
};
use adiabatic_gap::figures::fig1;
use adiabatic_gap::hamiltonian::{PathOperator, Schedule};
use adiabatic_gap::objective::{
    build_instance, Instance, InstanceSpec, SpectrumTable, DEFAULT_BOUND,
};
use adiabatic_gap::spectral::{
    bound_report, crossing_points_with, lemma_scale, min_gap_instance, minimize_gap,
    CrossingOptions, GapProfile, GapSolver, MinGapOptions, DEFAULT_DIVISOR, DEFAULT_GRID,
    DEFAULT_TOL,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_range, Check, Format, RunConfig};

pub const DEFAULT_EPSILON: f64 = 0.1;
const TRAJECTORY_SAMPLES: usize = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(adiabatic_gap::Error),
}

impl From<adiabatic_gap::Error> for CliError {
    fn from(e: adiabatic_gap::Error) -> Self {
        CliError::Run(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Run(e) => write!(f, "error: {e}"),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Rendered output plus the verdict that drives the exit code.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

fn json_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_n(cfg: &RunConfig) -> Result<u32> {
    cfg.n.ok_or_else(|| usage("--n is required"))
}

fn instance_spec(cfg: &RunConfig) -> Result<InstanceSpec> {
    let name = match (&cfg.instance, &cfg.file) {
        (Some(name), _) => name.as_str(),
        (None, Some(_)) => "file",
        (None, None) => return Err(usage("--instance is required")),
    };
    Ok(match name {
        "grover" => InstanceSpec::Grover,
        "two-level" => InstanceSpec::TwoLevel {
            gap: cfg.level_gap.unwrap_or(1.0),
            ground: cfg.ground_mult.unwrap_or(1),
        },
        "hamming" | "hamming-weight" => InstanceSpec::HammingWeight,
        "random" | "random-poly-bounded" => InstanceSpec::RandomPolyBounded {
            seed: cfg.seed.unwrap_or(0),
        },
        "file" | "explicit-file" => InstanceSpec::ExplicitFile(
            cfg.file
                .clone()
                .ok_or_else(|| usage("--instance file needs --file"))?,
        ),
        "fig1" => InstanceSpec::Fig1,
        other => return Err(usage(format!("unknown instance {other:?}"))),
    })
}

fn bound(cfg: &RunConfig) -> f64 {
    cfg.bound.unwrap_or(DEFAULT_BOUND)
}

fn instance(cfg: &RunConfig) -> Result<Instance> {
    let spec = instance_spec(cfg)?;
    let n = match spec {
        InstanceSpec::Fig1 => cfg.n.unwrap_or(4),
        InstanceSpec::ExplicitFile(ref path) => match cfg.n {
            Some(n) => n,
            None => SpectrumTable::load(path, bound(cfg))?.n(),
        },
        _ => require_n(cfg)?,
    };
    Ok(build_instance(&spec, n, bound(cfg))?)
}

fn schedule(cfg: &RunConfig) -> Result<Schedule> {
    match &cfg.schedule {
        None => Ok(Schedule::linear()),
        Some(s) => Schedule::parse(s).map_err(|e| usage(e.to_string())),
    }
}

fn format(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn grid(cfg: &RunConfig) -> usize {
    cfg.grid.unwrap_or(DEFAULT_GRID)
}

fn tol(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or(DEFAULT_TOL)
}

fn epsilon(cfg: &RunConfig) -> f64 {
    cfg.epsilon.unwrap_or(DEFAULT_EPSILON)
}

/// Minimum gap of an instance along the configured schedule.
fn instance_min_gap(inst: &Instance, sched: &Schedule, cfg: &RunConfig) -> Result<GapProfile> {
    if sched.is_linear() {
        return Ok(min_gap_instance(inst, grid(cfg), tol(cfg))?);
    }
    let solver = GapSolver::for_instance(inst);
    let opts = MinGapOptions {
        grid: grid(cfg),
        tol: tol(cfg),
        ..MinGapOptions::default()
    };
    Ok(minimize_gap(
        |u| {
            let (f, g) = sched.weights(u);
            solver.lowest_pair(f, g)
        },
        &opts,
    )?)
}

pub fn cmd_fig1(cfg: &RunConfig) -> Result<Outcome> {
    let data = fig1()?;
    let body = match format(cfg, Format::Csv) {
        Format::Csv => data.to_csv(),
        Format::Json => json_body(&json!({
            "points": data.rows.len(),
            "violations": data.violations,
            "passed": data.passed(),
        })),
    };
    Ok(Outcome {
        body,
        passed: data.passed(),
    })
}

pub fn cmd_gap(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let sched = schedule(cfg)?;
    let solver = GapSolver::for_instance(&inst);
    let points = grid(cfg).max(2);
    let samples = (0..points)
        .map(|i| {
            let u = i as f64 / (points - 1) as f64;
            let (f, g) = sched.weights(u);
            let mut sample = solver.lowest_pair(f, g)?;
            sample.s = u;
            Ok(sample)
        })
        .collect::<adiabatic_gap::Result<Vec<_>>>()?;
    let best = samples
        .iter()
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("grid is non-empty");
    let profile = GapProfile {
        s_star: best.s,
        g_min: best.gap,
        zero_gap: best.gap == 0.0,
        samples,
    };
    let body = match format(cfg, Format::Csv) {
        Format::Csv => profile.to_csv(),
        Format::Json => json_body(&json!({
            "instance": inst.kind.name(),
            "n": inst.table.n(),
            "schedule": sched.name(),
            "samples": profile.samples,
        })),
    };
    Ok(Outcome { body, passed: true })
}

pub fn cmd_mingap(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let sched = schedule(cfg)?;
    let profile = instance_min_gap(&inst, &sched, cfg)?;
    let body = match format(cfg, Format::Json) {
        Format::Csv => profile.to_csv(),
        Format::Json => json_body(&json!({
            "instance": inst.kind.name(),
            "n": inst.table.n(),
            "family": GapSolver::for_instance(&inst).family_name(),
            "schedule": sched.name(),
            "g_min": profile.g_min,
            "s_star": profile.s_star,
            "zero_gap": profile.zero_gap,
        })),
    };
    Ok(Outcome { body, passed: true })
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let sched = match cfg.schedule {
        Some(_) => Some(schedule(cfg)?),
        None => None,
    };
    let divisor = cfg.divisor.unwrap_or(DEFAULT_DIVISOR);
    let report = bound_report(&inst, divisor, sched.as_ref(), grid(cfg), tol(cfg))?;
    Ok(Outcome {
        body: json_body(&report),
        passed: report.passed,
    })
}

pub fn cmd_crossing(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let n = inst.table.n();
    let m = cfg
        .m
        .unwrap_or_else(|| lemma_scale(n, cfg.divisor.unwrap_or(DEFAULT_DIVISOR)));
    if !(m > 0.0 && m.is_finite()) {
        return Err(usage(format!("--m must be positive, got {m}")));
    }
    let opts = CrossingOptions {
        include_ground_term: !cfg.exclude_ground_term.unwrap_or(false),
        ..CrossingOptions::default()
    };
    let report = crossing_points_with(&inst.table, m, &opts)?;
    Ok(Outcome {
        body: json_body(&report),
        passed: report.bound_holds,
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let spec = instance_spec(cfg)?;
    let range = match (&cfg.n_range, cfg.n) {
        (Some(r), _) => parse_range(r).map_err(usage)?,
        (None, Some(n)) => n..=n,
        (None, None) => return Err(usage("--n-range or --n is required")),
    };
    let sched = schedule(cfg)?;
    let eps = epsilon(cfg);
    let rows = sweep(
        &spec,
        range,
        &sched,
        &SweepOptions {
            epsilon: eps,
            grid: grid(cfg),
            time: cfg.time,
            steps: cfg.steps,
        },
    )?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_required.map(|t| (r.n as f64, t.log2())))
        .collect();
    let body = match format(cfg, Format::Csv) {
        Format::Csv => sweep_csv(&rows),
        Format::Json => json_body(&json!({
            "instance": spec.kind().name(),
            "schedule": sched.name(),
            "epsilon": eps,
            "slope_log2_t_required": fit_slope(&pts),
            "rows": rows,
        })),
    };
    Ok(Outcome { body, passed: true })
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let sched = schedule(cfg)?;
    let path = PathOperator::for_instance(&inst, sched.clone())?;
    let eps = epsilon(cfg);
    let budget = required_time(&path, eps, grid(cfg))?;
    let time = match (cfg.time, budget.t_required) {
        (Some(t), _) => t,
        (None, Some(t)) => 10.0 * t,
        (None, None) => {
            return Err(usage(
                "minimum gap is zero, so there is no finite budget; pass --time",
            ))
        }
    };
    let fmt = format(cfg, Format::Json);
    let trajectory = cfg.trajectory.unwrap_or(match fmt {
        Format::Csv => TRAJECTORY_SAMPLES,
        Format::Json => 0,
    });
    let (result, converged, change) = match cfg.steps {
        Some(steps) => {
            let r = evolve(
                &path,
                time,
                &EvolveOptions {
                    steps: Some(steps),
                    trajectory,
                },
            )?;
            (r, None, None)
        }
        None => {
            let c = evolve_converged(
                &path,
                time,
                &EvolveOptions {
                    steps: None,
                    trajectory,
                },
                CONVERGENCE_TARGET,
                MAX_CONVERGED_STEPS,
            )?;
            (c.result, Some(c.converged), Some(c.change))
        }
    };
    let body = match fmt {
        Format::Csv => result
            .trajectory_csv()
            .ok_or_else(|| usage("CSV output needs --trajectory > 0"))?,
        Format::Json => json_body(&json!({
            "instance": inst.kind.name(),
            "n": inst.table.n(),
            "schedule": sched.name(),
            "budget": budget,
            "T": time,
            "steps": result.steps,
            "success_probability": result.success_probability,
            "norm_drift": result.norm_drift,
            "converged": converged,
            "step_doubling_change": change,
            "trajectory": result.trajectory,
        })),
    };
    Ok(Outcome {
        body,
        passed: converged.unwrap_or(true),
    })
}

pub fn cmd_equiv(cfg: &RunConfig) -> Result<Outcome> {
    let inst = instance(cfg)?;
    let verdict = match cfg.check.unwrap_or(Check::Lemma2) {
        Check::Lemma2 => lemma2_invariance_check(&inst.table, cfg.grid.unwrap_or(LEMMA2_GRID))?,
        Check::Rescaling => path_rescaling_check(
            &inst.table,
            &schedule(cfg)?,
            cfg.grid.unwrap_or(RESCALING_GRID),
        )?,
    };
    Ok(Outcome {
        body: verdict.to_json() + "\n",
        passed: verdict.passed,
    })
}
