//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use adiabatic_gap::equivalence::{path_rescaling_check, RESCALING_TOL};
use adiabatic_gap::evolution::{
    evolve, evolve_converged, fit_slope, required_time, runtime_scaling_experiment, EvolveOptions,
    CONVERGENCE_TARGET, MAX_CONVERGED_STEPS, NORM_DRIFT_LIMIT,
};
use adiabatic_gap::hamiltonian::{PathOperator, Schedule};
use adiabatic_gap::objective::{build_instance, InstanceSpec, SpectrumTable, DEFAULT_BOUND};
use adiabatic_gap::spectral::{
    bound_report, char_poly_eval, crossing_points, dense_char_poly, dense_eigenvalues, lemma_scale,
    min_gap_instance, SecularProblem, DEFAULT_DIVISOR, DEFAULT_GRID, DEFAULT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

/// Name, check and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Check, u64);

fn adgap(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_adgap"))
        .args(args)
        .output()
        .expect("adgap runs")
}

fn grover(n: u32) -> SpectrumTable {
    build_instance(&InstanceSpec::Grover, n, DEFAULT_BOUND)
        .unwrap()
        .table
}

/// Values drawn from a small pool so that repeats are common.
fn pooled_table(rng: &mut ChaCha8Rng, n: u32) -> SpectrumTable {
    const POOL: [f64; 9] = [0.0, 0.5, 1.0, 1.25, 2.0, 3.0, 4.5, 7.0, 9.5];
    let values: Vec<f64> = (0..1usize << n)
        .map(|_| {
            if rng.random_bool(0.5) {
                POOL[rng.random_range(0..POOL.len())]
            } else {
                rng.random_range(0.0..10.0)
            }
        })
        .collect();
    SpectrumTable::from_values(n, &values, DEFAULT_BOUND).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn char_poly_fidelity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(1..=3u32);
        let t = pooled_table(&mut rng, n);
        let s = rng.random_range(0.0..=1.0);
        let lambda = rng.random_range(-1.0..11.0);
        let path = PathOperator::uniform_to_cost(t.clone(), Schedule::linear());
        let want = dense_char_poly(&path.materialize_dense(s).unwrap(), lambda).unwrap();
        let got = char_poly_eval(&t, s, lambda);
        let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Err(format!(
                "case {case}: N = {}, s = {s}, lambda = {lambda}, relative error {rel:.3e}",
                t.dim()
            ));
        }
    }
    Ok(format!(
        "200 cases, N <= 8, worst relative error {worst:.3e}"
    ))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut repeated = 0;
    for case in 0..100 {
        let n = rng.random_range(1..=6u32);
        let t = pooled_table(&mut rng, n);
        if (t.distinct() as u64) < t.dim() {
            repeated += 1;
        }
        let s = rng.random_range(0.0..=1.0);
        let secular = SecularProblem::linear(&t, s).spectrum().unwrap();
        let path = PathOperator::uniform_to_cost(t, Schedule::linear());
        let dense = dense_eigenvalues(&path.materialize_dense(s).unwrap()).unwrap();
        let dev = max_abs_diff(&secular, &dense);
        worst = worst.max(dev);
        if dev > 1e-10 || secular.len() != dense.len() {
            return Err(format!("case {case}: deviation {dev:.3e}"));
        }
    }
    Ok(format!(
        "100 instances ({repeated} with repeated values), max deviation {worst:.3e}"
    ))
}

fn sixteen_value_reproduction() -> Check {
    let out = adgap(&["fig1"]);
    if out.status.code() != Some(0) {
        return Err(format!("fig1 exited with {:?}", out.status.code()));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    if rows.len() != 512 {
        return Err(format!("{} rows", rows.len()));
    }
    let mut interior = 0;
    for r in &rows[1..rows.len() - 1] {
        let (s, l1, l2) = (r[0], r[1], r[2]);
        if !(0.0 < l1 && l1 < 1.0 - s && 1.0 - s < l2 && l2 < 1.0 - s + 3.0 * s) {
            return Err(format!("bracket broken at s = {s}"));
        }
        interior += 1;
    }
    let first = &rows[0][1..5];
    let last = &rows[rows.len() - 1][1..5];
    let first_dev = max_abs_diff(first, &[0.0, 1.0, 1.0, 1.0]);
    let last_dev = max_abs_diff(last, &[0.0, 3.0, 3.5, 4.0]);
    if first_dev > 1e-12 || last_dev > 1e-12 {
        return Err(format!("endpoint rows {first:?} / {last:?}"));
    }
    Ok(format!(
        "{interior} interior rows bracketed, endpoint rows match"
    ))
}

fn gap_scaling() -> Check {
    let g4 = adiabatic_gap::spectral::min_gap(&grover(4), DEFAULT_GRID, DEFAULT_TOL)
        .unwrap()
        .g_min;
    let pts: Vec<(f64, f64)> = (6..=24u32)
        .map(|n| {
            let g = adiabatic_gap::spectral::min_gap(&grover(n), DEFAULT_GRID, DEFAULT_TOL)
                .unwrap()
                .g_min;
            (n as f64, g.log2())
        })
        .collect();
    let slope = fit_slope(&pts).unwrap();
    let msg = format!("slope {slope:.6}, gMin(4) = {g4:.12}");
    if (slope + 0.5).abs() <= 0.01 && (g4 - 0.25).abs() <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn exponential_bound() -> Check {
    let mut margins = Vec::new();
    for n in 16..=24u32 {
        let inst = build_instance(&InstanceSpec::Grover, n, DEFAULT_BOUND).unwrap();
        let r = bound_report(&inst, DEFAULT_DIVISOR, None, DEFAULT_GRID, DEFAULT_TOL).unwrap();
        if !r.holds {
            return Err(format!("n = {n}: gMin {} >= bound {}", r.g_min, r.bound));
        }
        margins.push(format!("{n}:{:.3e}", r.margin));
    }
    Ok(format!("n=16..24 hold, margins {}", margins.join(" ")))
}

fn crossing_sandwich() -> Check {
    let m = lemma_scale(20, DEFAULT_DIVISOR);
    let r = crossing_points(&grover(20), m).unwrap();
    let msg = format!(
        "s1 = {:?}, s2 = {:?}, {} samples, margins {:?}/{:?}, window gap {:?} < 2/m = {:.6e}",
        r.s1,
        r.s2,
        r.window_samples,
        r.lower_margin,
        r.upper_margin,
        r.window_gap_min,
        r.two_over_m
    );
    let window_ok = r.window_gap_min.is_some_and(|g| g < r.two_over_m);
    if r.ordered && r.sandwich_holds && r.bound_holds && window_ok && r.window_samples >= 10_000 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn marked_invariance() -> Check {
    let out = adgap(&[
        "equiv",
        "--check",
        "lemma2",
        "--instance",
        "grover",
        "--n",
        "3",
    ]);
    let code = out.status.code();
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    let max_dev = v["max_dev"].as_f64().unwrap_or(f64::INFINITY);
    let cases = v["cases"].as_array().map_or(0, Vec::len);
    let msg = format!("exit {code:?}, {cases} marked indices, max deviation {max_dev:.3e}");
    if code == Some(0) && cases == 8 && max_dev <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rescaling_identity() -> Check {
    let t = grover(6);
    let mut parts = Vec::new();
    for name in ["power:2", "smoothstep", "bump:2"] {
        let sched = Schedule::parse(name).unwrap();
        let v = path_rescaling_check(&t, &sched, 101).unwrap();
        let margin = v.consequence.as_ref().map(|c| c.margin);
        let msg = format!(
            "{name}: {} points, dev {:.3e}, margin {margin:?}",
            v.cases.len(),
            v.max_dev
        );
        if v.cases.len() < 101 || v.max_dev > RESCALING_TOL || !margin.is_some_and(|m| m > 0.0) {
            return Err(msg);
        }
        parts.push(msg);
    }
    Ok(parts.join("; "))
}

fn positive_control() -> Check {
    let gaps: Vec<f64> = (1..=8u32)
        .map(|n| {
            let inst = build_instance(&InstanceSpec::HammingWeight, n, DEFAULT_BOUND).unwrap();
            min_gap_instance(&inst, DEFAULT_GRID, DEFAULT_TOL)
                .unwrap()
                .g_min
        })
        .collect();
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let worst = gaps.iter().map(|g| (g - target).abs()).fold(0.0, f64::max);
    let msg = format!("gMin n=1..8 within {worst:.3e} of 1/sqrt(2)");
    if worst <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn evolution() -> Check {
    let inst = build_instance(&InstanceSpec::Grover, 2, DEFAULT_BOUND).unwrap();
    let path = PathOperator::for_instance(&inst, Schedule::linear()).unwrap();
    let quench = evolve(&path, 0.0, &EvolveOptions::default()).unwrap();
    if (quench.success_probability - 0.25).abs() > 1e-8 {
        return Err(format!("quench success {}", quench.success_probability));
    }
    let t_req = required_time(&path, 0.1, DEFAULT_GRID)
        .unwrap()
        .t_required
        .ok_or("no finite budget")?;
    let mut parts = vec![format!("quench {:.12}", quench.success_probability)];
    for factor in [10.0, 20.0, 50.0] {
        let time = factor * t_req;
        let c = evolve_converged(
            &path,
            time,
            &EvolveOptions::default(),
            CONVERGENCE_TARGET,
            MAX_CONVERGED_STEPS,
        )
        .unwrap();
        let r = &c.result;
        let msg = format!(
            "{factor}x budget: success {:.6}, drift {:.1e}, doubling change {:.1e}",
            r.success_probability, r.norm_drift, c.change
        );
        if r.success_probability < 0.99
            || r.norm_drift > NORM_DRIFT_LIMIT
            || c.change > 1e-6
            || !c.converged
        {
            return Err(msg);
        }
        parts.push(msg);
    }
    Ok(parts.join("; "))
}

fn runtime_scaling() -> Check {
    let linear = Schedule::linear();
    let g = runtime_scaling_experiment(&InstanceSpec::Grover, 4..=20, 0.1, &linear, DEFAULT_GRID)
        .unwrap()
        .slope
        .unwrap_or(f64::NAN);
    let h = runtime_scaling_experiment(
        &InstanceSpec::HammingWeight,
        2..=8,
        0.1,
        &linear,
        DEFAULT_GRID,
    )
    .unwrap()
    .slope
    .unwrap_or(f64::NAN);
    let msg = format!("grover slope {g:.4}, hamming slope {h:.4}");
    if g >= 0.9 && h <= 0.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("characteristic polynomial fidelity", char_poly_fidelity, 5),
        ("oracle equivalence", oracle_equivalence, 30),
        ("sixteen-value figure reproduction", sixteen_value_reproduction, 1),
        ("gap scaling law", gap_scaling, 10),
        ("exponential gap bound", exponential_bound, 10),
        ("crossing-line sandwich", crossing_sandwich, 10),
        ("marked-index invariance", marked_invariance, 5),
        ("schedule rescaling identity", rescaling_identity, 5),
        ("structured positive control", positive_control, 5),
        ("evolution", evolution, 60),
        ("runtime scaling", runtime_scaling, 30),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (verdict, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict}: {name}: {detail} ({:.2} s)",
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
