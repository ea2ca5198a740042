use adiabatic_gap::equivalence::{
    hadamard_conjugate, lemma2_invariance_check, path_rescaling_check,
};
use adiabatic_gap::evolution::{evolve, EvolveOptions};
use adiabatic_gap::hamiltonian::{Basis, EndpointForm, PathOperator, Schedule, ScheduleTable};
use adiabatic_gap::objective::{build_instance, InstanceSpec, SpectrumTable, DEFAULT_BOUND};
use adiabatic_gap::spectral::{
    char_poly_log, dense_eigenvalues, dense_oracle, expand_vector, SecularProblem,
};
use adiabatic_gap::walsh::fwht;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// `2ⁿ` values drawn from a small pool so that repeats are common.
fn pooled_values(max_n: u32) -> impl Strategy<Value = (u32, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        let pool = prop::sample::select(vec![0.0, 0.5, 1.0, 1.25, 2.0, 3.0, 4.5, 7.0]);
        (Just(n), prop::collection::vec(pool, 1usize << n))
    })
}

/// `2ⁿ` values, continuous in `[lo, hi]`.
fn spread_values(max_n: u32, lo: f64, hi: f64) -> impl Strategy<Value = (u32, Vec<f64>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec(lo..hi, 1usize << n)))
}

fn table(n: u32, values: &[f64]) -> SpectrumTable {
    SpectrumTable::from_values(n, values, DEFAULT_BOUND).unwrap()
}

fn random_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn multiplicities_sum_to_dimension() {
    for n in 1..=20u32 {
        let specs = [
            InstanceSpec::Grover,
            InstanceSpec::TwoLevel {
                gap: 2.0,
                ground: 1,
            },
            InstanceSpec::HammingWeight,
        ];
        for spec in &specs {
            let t = build_instance(spec, n, DEFAULT_BOUND).unwrap().table;
            assert_eq!(t.entries().iter().map(|e| e.mult).sum::<u64>(), 1u64 << n);
        }
    }
    for n in [1, 5, 12, 20] {
        let t = build_instance(
            &InstanceSpec::RandomPolyBounded { seed: 3 },
            n,
            DEFAULT_BOUND,
        )
        .unwrap()
        .table;
        assert_eq!(t.entries().iter().map(|e| e.mult).sum::<u64>(), 1u64 << n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oracle_equivalence((n, values) in pooled_values(6), s in 0.0f64..=1.0) {
        let t = table(n, &values);
        let secular = SecularProblem::linear(&t, s).spectrum().unwrap();
        let path = PathOperator::uniform_to_cost(t, Schedule::linear());
        let dense = dense_eigenvalues(&path.materialize_dense(s).unwrap()).unwrap();
        prop_assert!(max_diff(&secular, &dense) <= 1e-10);
    }

    #[test]
    fn shift_leaves_differences_unchanged((n, values) in spread_values(4, 0.0, 10.0), c in 0.5f64..10.0) {
        let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
        let t = table(n, &shifted);
        let (norm, offset) = t.normalize_shift();
        prop_assert_eq!(norm.min_value(), 0.0);
        prop_assert!((offset - t.min_value()).abs() == 0.0);
        let a = PathOperator::uniform_to_cost(t, Schedule::linear());
        let b = PathOperator::uniform_to_cost(norm, Schedule::linear());
        for i in 0..20 {
            let s = i as f64 / 19.0;
            let ea = dense_eigenvalues(&a.materialize_dense(s).unwrap()).unwrap();
            let eb = dense_eigenvalues(&b.materialize_dense(s).unwrap()).unwrap();
            let da: Vec<f64> = ea.iter().map(|x| x - ea[0]).collect();
            let db: Vec<f64> = eb.iter().map(|x| x - eb[0]).collect();
            prop_assert!(max_diff(&da, &db) <= 1e-12, "s = {}", s);
        }
    }

    #[test]
    fn merge_round_trip((n, values) in pooled_values(6), jitter in prop::collection::vec(-4e-11f64..4e-11, 64)) {
        let tau = adiabatic_gap::objective::merge_tolerance(DEFAULT_BOUND);
        let input: Vec<f64> = values.iter().zip(jitter.iter().cycle()).map(|(v, j)| v + j).collect();
        let t = SpectrumTable::from_function(n, |z| input[z as usize], DEFAULT_BOUND).unwrap();
        let mut sorted = input.clone();
        sorted.sort_by(f64::total_cmp);
        let back = t.expand().unwrap();
        prop_assert!(max_diff(&back, &sorted) <= tau);
    }

    #[test]
    fn interlacing_and_sign_pattern((n, values) in pooled_values(6), s in 0.01f64..0.99) {
        let (t, _) = table(n, &values).normalize_shift();
        // a constant table has λ₁ = 0 exactly
        prop_assume!(t.distinct() >= 2);
        let prob = SecularProblem::linear(&t, s);
        let d = |k: usize| (1.0 - s) + s * t.entries()[k].value;
        let l1 = prob.value(&prob.root(0).unwrap());
        prop_assert!(0.0 < l1 && l1 < 1.0 - s);
        for k in 1..t.distinct() {
            let lk = prob.value(&prob.root(k).unwrap());
            prop_assert!(d(k - 1) < lk && lk < d(k), "root {} = {} not in ({}, {})", k, lk, d(k - 1), d(k));
        }
        let low = prob.lowest(2).unwrap();
        let below = char_poly_log(&t, s, 0.5 * low[0]);
        let between = char_poly_log(&t, s, 0.5 * (low[0] + low[1]));
        prop_assert!(!below.negative);
        prop_assert!(between.negative);
    }

    #[test]
    fn deflation_is_exact((n, values) in pooled_values(6), s in 0.05f64..0.95) {
        let t = table(n, &values);
        let spectrum = SecularProblem::linear(&t, s).spectrum().unwrap();
        for e in t.entries() {
            let d = (1.0 - s) + s * e.value;
            let copies = spectrum.iter().filter(|&&x| x == d).count() as u64;
            prop_assert_eq!(copies, e.mult - 1);
        }
    }

    #[test]
    fn secular_vectors_match_dense((n, values) in spread_values(5, 0.0, 8.0), s in 0.05f64..0.95) {
        let (t, _) = table(n, &values).normalize_shift();
        let prob = SecularProblem::linear(&t, s);
        let levels = prob.lowest_levels(2).unwrap();
        let path = PathOperator::uniform_to_cost(t.clone(), Schedule::linear());
        let dense = dense_oracle(&path.materialize_dense(s).unwrap()).unwrap();
        prop_assume!(dense.values[1] - dense.values[0] > 1e-6);
        prop_assume!(dense.values.len() < 3 || dense.values[2] - dense.values[1] > 1e-6);
        for (k, level) in levels.iter().enumerate() {
            prop_assume!(!level.deflated);
            let v = expand_vector(&t, &prob.eigenvector(level).unwrap()).unwrap();
            let w = dense.vector(k);
            let dot: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            let sign = dot.signum();
            let dev = v.iter().zip(w.iter()).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-8, "level {} dev {}", k, dev);
        }
    }

    #[test]
    fn dense_path_is_symmetric((n, values) in pooled_values(4), u in 0.0f64..=1.0, x in 0u64..16) {
        let t = table(n, &values);
        let x = x % (1 << n);
        for path in [
            PathOperator::uniform_to_cost(t.clone(), Schedule::smoothstep()),
            PathOperator::mirrored(t.clone(), x, Schedule::power(2.0).unwrap()).unwrap(),
            PathOperator::hamming(n, Schedule::bump(1.0).unwrap()).unwrap(),
        ] {
            let m = path.materialize_dense(u).unwrap();
            prop_assert!((&m - m.transpose()).abs().max() <= 1e-14);
        }
    }

    #[test]
    fn matrix_free_matches_dense((n, values) in pooled_values(4), u in 0.0f64..=1.0, seed in any::<u64>()) {
        let t = table(n, &values);
        let dim = 1usize << n;
        let v = random_vector(dim, seed);
        let vnorm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let forms = [
            EndpointForm::uniform_projector(n),
            EndpointForm::diagonal(t.clone(), Basis::Computational),
            EndpointForm::diagonal(t.clone(), Basis::Hadamard),
            EndpointForm::marked_projector(n, seed % dim as u64).unwrap(),
            EndpointForm::hamming(n, Basis::Hadamard).unwrap(),
        ];
        for h0 in &forms {
            for h1 in &forms {
                let path = PathOperator::new(h0.clone(), h1.clone(), Schedule::smoothstep()).unwrap();
                let got = path.apply(u, &v).unwrap();
                let m = path.materialize_dense(u).unwrap();
                let err = (0..dim)
                    .map(|i| {
                        let want: Complex64 = (0..dim).map(|j| v[j] * m[(i, j)]).sum();
                        (got[i] - want).norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt();
                prop_assert!(err <= 1e-12 * vnorm);
            }
        }
    }

    #[test]
    fn walsh_involution(seed in any::<u64>(), n in 0u32..10) {
        let v = random_vector(1 << n, seed);
        let mut w = v.clone();
        fwht(&mut w);
        fwht(&mut w);
        let dev = v.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(dev <= 1e-13);
    }

    #[test]
    fn marked_projector_spectrum_independent_of_x(n in 1u32..=4) {
        let reference = dense_eigenvalues(&EndpointForm::marked_projector(n, 0).unwrap().dense().unwrap()).unwrap();
        for x in 1..(1u64 << n) {
            let ev = dense_eigenvalues(&EndpointForm::marked_projector(n, x).unwrap().dense().unwrap()).unwrap();
            prop_assert!(max_diff(&ev, &reference) <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn hadamard_conjugation_preserves_spectrum(n in 1u32..=4, entries in prop::collection::vec(-5.0f64..5.0, 256)) {
        let dim = 1usize << n;
        let m = DMatrix::from_fn(dim, dim, |i, j| entries[i.min(j) * 16 + i.max(j)]);
        let c = hadamard_conjugate(&m).unwrap();
        let back = hadamard_conjugate(&c).unwrap();
        prop_assert!((&back - &m).abs().max() <= 1e-12);
        let a = dense_eigenvalues(&m).unwrap();
        let b = dense_eigenvalues(&((&c + c.transpose()) * 0.5)).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn marked_invariance_for_random_tables((n, values) in pooled_values(4)) {
        let v = lemma2_invariance_check(&table(n, &values), 11).unwrap();
        prop_assert!(v.passed, "max_dev {}", v.max_dev);
    }

    #[test]
    fn rescaling_identity_every_family((n, values) in pooled_values(5), p in 0.5f64..3.0, b in -1.0f64..3.0) {
        let t = table(n, &values);
        let knee = ScheduleTable::new(
            vec![0.0, 0.3, 0.7, 1.0],
            vec![1.0, 0.8, 0.1, 0.0],
            vec![0.0, 0.4, 0.8, 1.0],
        ).unwrap();
        for sched in [
            Schedule::linear(),
            Schedule::power(p).unwrap(),
            Schedule::smoothstep(),
            Schedule::bump(b).unwrap(),
            Schedule::table(knee.clone()).unwrap(),
        ] {
            let v = path_rescaling_check(&t, &sched, 101).unwrap();
            prop_assert!(v.max_dev <= 1e-10, "{}: {}", sched.name(), v.max_dev);
        }
    }
}

#[test]
fn compression_consistency() {
    // merge tolerance at B = 1 is 1e-12, so a ±1e-11 split stays two entries
    for n in [3u32, 6, 10] {
        let dim = 1u64 << n;
        let k = dim / 2;
        let compact = SpectrumTable::new(n, [(0.0, 1), (1.0, dim - 1)], 1.0).unwrap();
        let split = SpectrumTable::new(
            n,
            [(0.0, 1), (1.0 - 1e-11, k), (1.0 + 1e-11, dim - 1 - k)],
            1.5,
        )
        .unwrap();
        assert_eq!(split.distinct(), 3);
        for i in 1..50 {
            let s = i as f64 / 50.0;
            let a = SecularProblem::linear(&compact, s).lowest(2).unwrap();
            let b = SecularProblem::linear(&split, s).lowest(2).unwrap();
            assert!(((a[1] - a[0]) - (b[1] - b[0])).abs() <= 1e-9, "n={n} s={s}");
        }
    }
}

#[test]
fn random_instances_are_reproducible() {
    let a = build_instance(
        &InstanceSpec::RandomPolyBounded { seed: 7 },
        3,
        DEFAULT_BOUND,
    )
    .unwrap();
    let b = build_instance(
        &InstanceSpec::RandomPolyBounded { seed: 7 },
        3,
        DEFAULT_BOUND,
    )
    .unwrap();
    assert_eq!(a.table, b.table);
    let c = build_instance(
        &InstanceSpec::RandomPolyBounded { seed: 8 },
        3,
        DEFAULT_BOUND,
    )
    .unwrap();
    assert_ne!(a.table, c.table);
}

#[test]
fn unitarity_and_quench_limit() {
    for (n, values) in [
        (2u32, vec![0.0, 1.0, 2.0, 2.0]),
        (3, vec![1.0, 0.0, 3.0, 0.5, 2.0, 2.0, 4.0, 0.25]),
    ] {
        let t = table(n, &values);
        let path = PathOperator::uniform_to_cost(t, Schedule::linear());
        let steps = 3000;
        let r = evolve(
            &path,
            25.0,
            &EvolveOptions {
                steps: Some(steps),
                trajectory: 0,
            },
        )
        .unwrap();
        assert!(r.norm_drift <= steps as f64 * 1e-10);

        let h0 = path.h0().ground_state().unwrap();
        let expected = path.h1().ground_space_weight(&h0).unwrap();
        let q = evolve(
            &path,
            1e-9,
            &EvolveOptions {
                steps: Some(16),
                trajectory: 0,
            },
        )
        .unwrap();
        assert!((q.success_probability - expected).abs() <= 1e-8);
    }
}

#[test]
fn adiabatic_limit_envelope() {
    use adiabatic_gap::evolution::{
        evolve_converged, required_time, CONVERGENCE_TARGET, MAX_CONVERGED_STEPS,
    };
    let inst = build_instance(&InstanceSpec::Grover, 2, DEFAULT_BOUND).unwrap();
    let path = PathOperator::for_instance(&inst, Schedule::linear()).unwrap();
    let t_req = required_time(&path, 0.1, 512).unwrap().t_required.unwrap();
    let mut running = 0.0f64;
    let mut reached: Option<f64> = None;
    for k in 0..12 {
        let time = t_req * 0.25 * 1.6f64.powi(k);
        let c = evolve_converged(
            &path,
            time,
            &EvolveOptions::default(),
            CONVERGENCE_TARGET,
            MAX_CONVERGED_STEPS,
        )
        .unwrap();
        assert!(c.converged);
        running = running.max(c.result.success_probability);
        if running >= 0.99 && reached.is_none() {
            reached = Some(time);
        }
        if let Some(t0) = reached {
            if time >= 10.0 * t_req.max(t0) {
                assert!(c.result.success_probability >= 0.99, "T = {time}");
            }
        }
    }
    assert!(reached.is_some());
}
