use platoon::connectivity::{algebraic_connectivity, lambda2_bounds};
use platoon::formation::{
    build_formation, hinf_closed_form, hinf_report, hinf_sweep, hinf_sweep_with_output, modal_hinf,
    simulate_formation, Branch, Disturbance, FrequencyGrid, SimulationOptions, DEFAULT_SPACING,
};
use platoon::linalg::psd_sqrt;
use platoon::{build_knn_platoon, Graph, PlatoonSpec};

const NS: [usize; 3] = [5, 10, 20];
const KS: [usize; 3] = [1, 2, 4];
const GAINS: [(f64, f64); 3] = [(1.0, 1.0), (5.0, 10.0), (10.0, 2.0)];

fn platoon(n: usize, k: usize) -> Graph {
    build_knn_platoon(PlatoonSpec::new(n, k).unwrap()).unwrap()
}

#[test]
fn incidence_and_root_laplacian_outputs_agree() {
    let grid = FrequencyGrid::default();
    for n in NS {
        for k in KS {
            for (kp, ku) in GAINS {
                let g = platoon(n, k);
                let s = build_formation(&g, kp, ku, DEFAULT_SPACING).unwrap();
                let by_incidence = hinf_sweep(&s, &grid).unwrap().value;
                let root = psd_sqrt(&g.laplacian());
                let by_root = hinf_sweep_with_output(&s, &root, &grid).unwrap().value;
                let rel = (by_incidence - by_root).abs() / by_incidence;
                assert!(
                    rel <= 1e-6,
                    "P({n},{k}) kp={kp} ku={ku}: {by_incidence} vs {by_root}"
                );
            }
        }
    }
}

#[test]
fn norm_is_the_lambda2_mode() {
    let grid = FrequencyGrid {
        log_points: 10,
        window_points: 2,
        refine_iterations: 0,
        ..Default::default()
    };
    for n in NS {
        for k in KS {
            for (kp, ku) in GAINS {
                let s = build_formation(&platoon(n, k), kp, ku, DEFAULT_SPACING).unwrap();
                let report = hinf_report(&s, &grid).unwrap();
                let lambda2_mode = modal_hinf(report.lambda2, kp, ku).unwrap();
                assert!(
                    (report.max_mode_norm() - report.closed_form).abs()
                        <= 1e-9 * report.closed_form
                );
                assert!((lambda2_mode - report.closed_form).abs() <= 1e-9 * report.closed_form);
            }
        }
    }
}

#[test]
fn trends_in_n_and_k() {
    for (kp, ku) in GAINS {
        for k in KS {
            let values: Vec<f64> = NS
                .iter()
                .filter(|&&n| k < n)
                .map(|&n| {
                    hinf_closed_form(algebraic_connectivity(&platoon(n, k)), kp, ku)
                        .unwrap()
                        .0
                })
                .collect();
            assert!(
                values.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)),
                "k={k}: {values:?}"
            );
        }
        for n in NS {
            let values: Vec<f64> = KS
                .iter()
                .filter(|&&k| k < n)
                .map(|&k| {
                    hinf_closed_form(algebraic_connectivity(&platoon(n, k)), kp, ku)
                        .unwrap()
                        .0
                })
                .collect();
            assert!(
                values.windows(2).all(|w| w[0] >= w[1] * (1.0 - 1e-12)),
                "n={n}: {values:?}"
            );
        }
    }
}

#[test]
fn static_gain_values_respect_lambda2_bracket() {
    let mut checked = 0;
    for n in 4..=30 {
        for k in 1..n {
            for (kp, ku) in GAINS {
                let spec = PlatoonSpec::new(n, k).unwrap();
                let l2 = algebraic_connectivity(&platoon(n, k));
                let b = lambda2_bounds(spec);
                let threshold = 2.0 * kp / (ku * ku);
                if !(l2 > threshold && b.lower > threshold && b.upper > threshold) {
                    continue;
                }
                let (value, branch) = hinf_closed_form(l2, kp, ku).unwrap();
                assert_eq!(branch, Branch::StaticGain);
                assert!(1.0 / (kp * b.upper.sqrt()) <= value * (1.0 + 1e-12));
                assert!(value <= 1.0 / (kp * b.lower.sqrt()) * (1.0 + 1e-12));
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn fiedler_direction_input_approaches_the_norm() {
    // constant input along the Fiedler vector drives the static gain of the
    // lambda2 mode, which is the norm in the static-gain branch
    let g = platoon(10, 2);
    let (kp, ku) = (5.0, 10.0);
    let s = build_formation(&g, kp, ku, DEFAULT_SPACING).unwrap();
    let (_, vectors) = platoon::linalg::sorted_symmetric_eigen(&g.laplacian());
    let fiedler = vectors.column(1).into_owned();
    let disturbance = Disturbance::Sinusoid {
        direction: fiedler,
        amplitude: 1.0,
        omega: 0.0,
        phase: 0.0,
    };
    let mut opts = SimulationOptions::new(60.0);
    opts.record_every = 10;
    let trace = simulate_formation(&s, &disturbance, &opts).unwrap();
    let ratio = trace.peak_error_after(50.0);
    let (hinf, branch) = hinf_closed_form(algebraic_connectivity(&g), kp, ku).unwrap();
    assert_eq!(branch, Branch::StaticGain);
    assert!((ratio - hinf).abs() <= 1e-3 * hinf, "{ratio} vs {hinf}");
}

#[test]
fn resonant_input_on_chain_stays_below_the_norm() {
    let g = platoon(20, 1);
    let (kp, ku) = (5.0, 10.0);
    let s = build_formation(&g, kp, ku, DEFAULT_SPACING).unwrap();
    let report = hinf_report(&s, &FrequencyGrid::default()).unwrap();
    assert_eq!(report.branch, Branch::UnderdampedPeak);
    let (_, vectors) = platoon::linalg::sorted_symmetric_eigen(&g.laplacian());
    let direction = vectors.column(1).into_owned();
    let disturbance = Disturbance::Sinusoid {
        direction,
        amplitude: 1.0,
        omega: report.peak_frequency,
        phase: 0.0,
    };
    let mut opts = SimulationOptions::new(400.0);
    opts.step = 1e-2;
    opts.record_every = 1;
    let trace = simulate_formation(&s, &disturbance, &opts).unwrap();
    let ratio = trace.peak_error_after(300.0);
    assert!(
        ratio <= report.closed_form * 1.02,
        "{ratio} vs {}",
        report.closed_form
    );
    // the Fiedler direction at the peak frequency nearly attains the norm
    assert!(
        ratio >= report.closed_form * 0.98,
        "{ratio} vs {}",
        report.closed_form
    );
}

#[test]
fn step_disturbance_settles() {
    let g = platoon(8, 2);
    let s = build_formation(&g, 5.0, 10.0, DEFAULT_SPACING).unwrap();
    let disturbance = Disturbance::step_on(8, 3, 1.0, 1.0);
    let mut opts = SimulationOptions::new(40.0);
    opts.record_every = 50;
    let trace = simulate_formation(&s, &disturbance, &opts).unwrap();
    assert!(trace.peak_error_after(0.0) > 0.0);
    let last = trace.spacing_errors.last().unwrap();
    let prev = &trace.spacing_errors[trace.spacing_errors.len() - 2];
    assert!((last - prev).norm() < 1e-6);
}
