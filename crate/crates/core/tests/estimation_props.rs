use nalgebra::DVector;
use platoon::estimation::{
    max_tolerable_faults, observation_model, random_initial_state, recover_initial_state,
    recovery_tolerance, simulate_faulty, simulate_packet_drop, stack_inputs, FaultScenario,
    MeasurementTrace, Recovery, WeightMatrix,
};
use platoon::linalg::inf_norm;
use platoon::{build_knn_platoon, Graph, PlatoonSpec};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PHI_BOUND: f64 = 5.0;

fn platoon(n: usize, k: usize) -> Graph {
    build_knn_platoon(PlatoonSpec::new(n, k).unwrap()).unwrap()
}

struct Trial {
    g: Graph,
    w: WeightMatrix,
    x0: DVector<f64>,
    scenario: FaultScenario,
    trace: MeasurementTrace,
    f: usize,
}

/// Random observer, `f = floor((k-1)/2)` random faulty vehicles other than
/// the observer, and bounded injections at every step.
fn trial(n: usize, k: usize, seed: u64) -> Trial {
    let g = platoon(n, k);
    let f = max_tolerable_faults(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observer = rng.random_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&v| v != observer).collect();
    let faulty: Vec<usize> = sample(&mut rng, others.len(), f)
        .into_iter()
        .map(|i| others[i])
        .collect();
    let mut scenario = FaultScenario::new(faulty.iter().copied(), n);
    for &v in &faulty {
        for step in 0..n {
            scenario
                .set(v, step, rng.random_range(-PHI_BOUND..=PHI_BOUND))
                .unwrap();
        }
    }
    let w = WeightMatrix::random(&g, seed.wrapping_add(1));
    let x0 = random_initial_state(n, seed.wrapping_add(2));
    let states = simulate_faulty(&w, &x0, &scenario).unwrap();
    let trace = MeasurementTrace::record(&g, observer, &states).unwrap();
    Trial {
        g,
        w,
        x0,
        scenario,
        trace,
        f,
    }
}

const CONFIGS: [(usize, usize); 4] = [(8, 3), (10, 3), (10, 5), (12, 5)];

#[test]
fn recovery_is_unique_and_exact() {
    for seed in 0..50u64 {
        let (n, k) = CONFIGS[seed as usize % CONFIGS.len()];
        let t = trial(n, k, 1000 + seed);
        let recovery = recover_initial_state(&t.g, &t.trace, &t.w, t.f).unwrap();
        let Recovery::Unique { x0, consistent, .. } = &recovery else {
            panic!(
                "P({n},{k}) seed {seed}: ambiguous {:?}",
                recovery.consistent_sets()
            );
        };
        let err = inf_norm(&(x0 - &t.x0));
        assert!(err < 1e-6, "P({n},{k}) seed {seed}: error {err}");
        assert!(consistent.contains(&t.scenario.faulty().to_vec()));
    }
}

#[test]
fn recovery_is_sound() {
    for seed in 0..12u64 {
        let (n, k) = CONFIGS[seed as usize % CONFIGS.len()];
        let t = trial(n, k, 2000 + seed);
        let Recovery::Unique { x0, estimate, .. } =
            recover_initial_state(&t.g, &t.trace, &t.w, t.f).unwrap()
        else {
            panic!("ambiguous recovery");
        };
        let scenario = estimate.scenario(n - 1);
        let replay = simulate_faulty(&t.w, &x0, &scenario).unwrap();
        let replayed = MeasurementTrace::record(&t.g, t.trace.observer, &replay).unwrap();
        let stacked = t.trace.stacked(n);
        let tol = recovery_tolerance(&stacked);
        let diff = inf_norm(&(replayed.stacked(n) - &stacked));
        assert!(
            diff < tol,
            "P({n},{k}) seed {seed}: replay differs by {diff}, tol {tol}"
        );
    }
}

#[test]
fn stacked_measurements_match_model() {
    for seed in 0..20u64 {
        let (n, k) = CONFIGS[seed as usize % CONFIGS.len()];
        let t = trial(n, k, 3000 + seed);
        let faulty = t.scenario.faulty().to_vec();
        let (o, j) = observation_model(&t.g, &t.w, t.trace.observer, n, &faulty).unwrap();
        let phi = stack_inputs(&t.scenario, &faulty, n);
        let stacked = t.trace.stacked(n);
        let predicted = &o * &t.x0 + &j * &phi;
        // entries grow like powers of W, so compare relative to their scale
        let diff = inf_norm(&(predicted - &stacked));
        assert!(
            diff <= 1e-10 * (1.0 + inf_norm(&stacked)),
            "seed {seed}: {diff}"
        );
    }
}

#[test]
fn sparse_platoon_keeps_true_set_consistent() {
    // P(10,1) tolerates no faults; with one injected fault recovery may be
    // ambiguous, but the true fault set must always explain the data.
    let g = platoon(10, 1);
    for seed in 0..5u64 {
        let w = WeightMatrix::random(&g, seed);
        let x0 = random_initial_state(10, seed + 100);
        let mut scenario = FaultScenario::new([7], 10);
        for step in 0..10 {
            scenario.set(7, step, (step as f64).sin()).unwrap();
        }
        let states = simulate_faulty(&w, &x0, &scenario).unwrap();
        let trace = MeasurementTrace::record(&g, 2, &states).unwrap();
        let recovery = recover_initial_state(&g, &trace, &w, 1).unwrap();
        assert!(recovery.consistent_sets().contains(&vec![7]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn packet_drop_matches_silenced_rows(
        (n, k) in prop_oneof![Just((6usize, 2usize)), Just((8, 3)), Just((10, 3))],
        seed in any::<u64>(),
        picks in proptest::collection::vec(any::<usize>(), 1..3),
        steps in 1usize..25,
    ) {
        let g = platoon(n, k);
        let w = WeightMatrix::random(&g, seed);
        let x0 = random_initial_state(n, seed ^ 0x5eed);
        let mut dropped: Vec<usize> = picks.iter().map(|p| p % n).collect();
        dropped.sort_unstable();
        dropped.dedup();

        let dropped_trace = simulate_packet_drop(&w, &x0, &dropped, steps).unwrap();
        let silenced = dropped.iter().fold(w.clone(), |acc, &i| acc.without_neighbor_inputs(i));
        let reference = simulate_faulty(&silenced, &x0, &FaultScenario::fault_free(steps)).unwrap();
        prop_assert_eq!(dropped_trace.len(), reference.len());
        for (a, b) in dropped_trace.iter().zip(&reference) {
            let scale = 1.0 + inf_norm(a).max(inf_norm(b));
            prop_assert!(inf_norm(&(a - b)) <= 1e-12 * scale);
        }
    }
}
