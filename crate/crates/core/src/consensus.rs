//! W-MSR resilient consensus against adversarial vehicles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_STEPS: usize = 500;

/// Broadcast signal of an adversarial vehicle as a function of the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", content = "params", rename_all = "kebab-case")]
pub enum Strategy {
    Constant {
        value: f64,
    },
    /// `offset + slope * step`.
    Ramp {
        offset: f64,
        slope: f64,
    },
    /// `amplitude * sin(omega * step + phase)`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Uniform on `[low, high]`, drawn from a stream keyed by the run seed
    /// and the vehicle index.
    SeededRandom {
        low: f64,
        high: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adversary {
    pub vehicle: usize,
    #[serde(flatten)]
    pub strategy: Strategy,
}

impl Adversary {
    pub fn new(vehicle: usize, strategy: Strategy) -> Self {
        Self { vehicle, strategy }
    }

    /// Values broadcast at steps `0..len`.
    pub fn broadcast_sequence(&self, len: usize, seed: u64) -> Vec<f64> {
        match self.strategy {
            Strategy::Constant { value } => vec![value; len],
            Strategy::Ramp { offset, slope } => {
                (0..len).map(|k| offset + slope * k as f64).collect()
            }
            Strategy::Sinusoid {
                amplitude,
                omega,
                phase,
            } => (0..len)
                .map(|k| amplitude * (omega * k as f64 + phase).sin())
                .collect(),
            Strategy::SeededRandom { low, high } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(self.vehicle as u64);
                (0..len).map(|_| rng.random_range(low..=high)).collect()
            }
        }
    }
}

/// One W-MSR step for a normal vehicle.
///
/// Removes up to `f` neighbor values strictly above `own` (largest first)
/// and up to `f` strictly below (smallest first); among equal values the
/// higher vehicle index goes first. Returns the uniform average of `own`
/// and the kept values.
pub fn wmsr_update(own: f64, neighbors: &[(usize, f64)], f: usize) -> f64 {
    let mut above: Vec<(usize, f64)> = neighbors
        .iter()
        .copied()
        .filter(|&(_, v)| v > own)
        .collect();
    let mut below: Vec<(usize, f64)> = neighbors
        .iter()
        .copied()
        .filter(|&(_, v)| v < own)
        .collect();
    above.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.0.cmp(&a.0)));
    below.sort_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
    let removed: Vec<usize> = above
        .iter()
        .take(f)
        .chain(below.iter().take(f))
        .map(|&(id, _)| id)
        .collect();

    let mut kept: Vec<(usize, f64)> = neighbors
        .iter()
        .copied()
        .filter(|(id, _)| !removed.contains(id))
        .collect();
    kept.sort_by_key(|&(id, _)| id);

    let count = (kept.len() + 1) as f64;
    let mean = own + kept.iter().map(|&(_, v)| v - own).sum::<f64>() / count;
    let (lo, hi) = kept
        .iter()
        .fold((own, own), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    // a convex combination stays in the hull; clamp away rounding
    mean.clamp(lo, hi)
}

/// True iff no vertex outside `set` has more than `f` neighbors in `set`.
pub fn is_f_local(g: &Graph, set: &[usize], f: usize) -> bool {
    let mut inside = vec![false; g.n()];
    for &v in set {
        if v < g.n() {
            inside[v] = true;
        }
    }
    (0..g.n())
        .filter(|&i| !inside[i])
        .all(|i| g.neighbors(i).iter().filter(|&&j| inside[j]).count() <= f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WmsrConfig {
    pub f: usize,
    pub steps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl WmsrConfig {
    pub fn new(f: usize, seed: u64) -> Self {
        Self {
            f,
            steps: DEFAULT_STEPS,
            tol: DEFAULT_TOL,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusTrace {
    /// `values[k][i]` is vehicle `i`'s broadcast value at step `k`.
    pub values: Vec<Vec<f64>>,
    pub normal: Vec<usize>,
    pub adversarial: Vec<usize>,
    pub converged_at: Option<usize>,
    /// Whether the adversaries formed an `f`-local set.
    pub f_local: bool,
}

impl ConsensusTrace {
    pub fn normal_range(&self, step: usize) -> (f64, f64) {
        self.normal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = self.values[step][i];
                (lo.min(v), hi.max(v))
            })
    }

    pub fn spread(&self, step: usize) -> f64 {
        let (lo, hi) = self.normal_range(step);
        hi - lo
    }

    /// `(step, vehicle)` pairs where a normal value left the previous
    /// step's normal range.
    pub fn safety_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for step in 1..self.values.len() {
            let (lo, hi) = self.normal_range(step - 1);
            for &i in &self.normal {
                let v = self.values[step][i];
                if v < lo || v > hi {
                    out.push((step, i));
                }
            }
        }
        out
    }

    pub fn is_adversary(&self, vehicle: usize) -> bool {
        self.adversarial.binary_search(&vehicle).is_ok()
    }
}

/// Runs synchronous W-MSR rounds for `config.steps` steps.
///
/// Adversaries ignore the update and broadcast their strategy's value; every
/// neighbor sees the same value. The `f`-local condition is only sufficient
/// for consensus, so a violation is recorded in the trace rather than
/// rejected.
pub fn run_wmsr(
    g: &Graph,
    x0: &[f64],
    adversaries: &[Adversary],
    config: WmsrConfig,
) -> Result<ConsensusTrace> {
    let n = g.n();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "x0 has length {}, graph has {n} vertices",
            x0.len()
        )));
    }
    let mut adversarial: Vec<usize> = adversaries.iter().map(|a| a.vehicle).collect();
    adversarial.sort_unstable();
    if let Some(&v) = adversarial.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if adversarial.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "vehicle listed as adversary twice".into(),
        ));
    }
    let normal: Vec<usize> = (0..n)
        .filter(|v| adversarial.binary_search(v).is_err())
        .collect();
    let f_local = is_f_local(g, &adversarial, config.f);

    let signals: Vec<(usize, Vec<f64>)> = adversaries
        .iter()
        .map(|a| {
            (
                a.vehicle,
                a.broadcast_sequence(config.steps + 1, config.seed),
            )
        })
        .collect();

    let mut current = x0.to_vec();
    for (v, seq) in &signals {
        current[*v] = seq[0];
    }
    let mut values = Vec::with_capacity(config.steps + 1);
    values.push(current);

    for step in 0..config.steps {
        let prev = &values[step];
        let mut next = prev.clone();
        for &i in &normal {
            let heard: Vec<(usize, f64)> = g.neighbors(i).iter().map(|&j| (j, prev[j])).collect();
            next[i] = wmsr_update(prev[i], &heard, config.f);
        }
        for (v, seq) in &signals {
            next[*v] = seq[step + 1];
        }
        values.push(next);
    }

    let mut trace = ConsensusTrace {
        values,
        normal,
        adversarial,
        converged_at: None,
        f_local,
    };
    trace.converged_at = (0..trace.values.len()).find(|&k| trace.spread(k) < config.tol);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_knn_platoon, PlatoonSpec};

    fn platoon(n: usize, k: usize) -> Graph {
        build_knn_platoon(PlatoonSpec::new(n, k).unwrap()).unwrap()
    }

    fn ids(values: &[f64]) -> Vec<(usize, f64)> {
        values.iter().copied().enumerate().collect()
    }

    #[test]
    fn trims_both_sides() {
        assert_eq!(wmsr_update(4.0, &ids(&[1.0, 3.0, 5.0, 9.0]), 1), 4.0);
    }

    #[test]
    fn trims_only_existing_side() {
        assert_eq!(wmsr_update(4.0, &ids(&[5.0, 6.0, 7.0]), 1), 5.0);
    }

    #[test]
    fn no_trimming_is_plain_average() {
        let v = wmsr_update(1.0, &ids(&[2.0, 3.0, 6.0]), 0);
        assert!((v - 3.0).abs() < 1e-15);
    }

    #[test]
    fn equal_values_are_never_trimmed() {
        assert_eq!(wmsr_update(2.0, &ids(&[2.0, 2.0, 2.0]), 2), 2.0);
        assert_eq!(wmsr_update(0.1, &ids(&[0.1, 0.1]), 0), 0.1);
    }

    #[test]
    fn f_local_examples() {
        assert!(is_f_local(&platoon(10, 3), &[4], 1));
        assert!(!is_f_local(&platoon(6, 2), &[2, 3], 1));
        assert!(is_f_local(&platoon(6, 2), &[], 0));
    }

    #[test]
    fn plain_consensus_without_adversaries() {
        let g = platoon(8, 2);
        let x0: Vec<f64> = (0..8).map(|i| (i * i) as f64 * 0.5 - 3.0).collect();
        let trace = run_wmsr(&g, &x0, &[], WmsrConfig::new(0, 1)).unwrap();
        let k = trace.converged_at.expect("converges");
        let v = trace.values[k][0];
        assert!((-3.0..=21.5).contains(&v));
        assert!(trace.safety_violations().is_empty());
    }

    #[test]
    fn equal_start_stays_put() {
        let g = platoon(10, 3);
        let x0 = vec![0.7; 10];
        let adv = [Adversary::new(
            5,
            Strategy::Ramp {
                offset: 0.0,
                slope: 3.0,
            },
        )];
        let trace = run_wmsr(&g, &x0, &adv, WmsrConfig::new(1, 2)).unwrap();
        for row in &trace.values {
            for &i in &trace.normal {
                assert_eq!(row[i], 0.7);
            }
        }
        assert_eq!(trace.converged_at, Some(0));
    }

    #[test]
    fn adversary_follows_strategy() {
        let g = platoon(10, 3);
        let x0: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let adv = [Adversary::new(
            4,
            Strategy::Ramp {
                offset: 1.0,
                slope: 0.5,
            },
        )];
        let trace = run_wmsr(
            &g,
            &x0,
            &adv,
            WmsrConfig {
                steps: 20,
                ..WmsrConfig::new(1, 0)
            },
        )
        .unwrap();
        for (k, row) in trace.values.iter().enumerate() {
            assert_eq!(row[4], 1.0 + 0.5 * k as f64);
        }
        assert!(trace.f_local);
    }

    #[test]
    fn random_strategy_is_seeded() {
        let a = Adversary::new(
            3,
            Strategy::SeededRandom {
                low: -1.0,
                high: 1.0,
            },
        );
        assert_eq!(a.broadcast_sequence(10, 4), a.broadcast_sequence(10, 4));
        assert_ne!(a.broadcast_sequence(10, 4), a.broadcast_sequence(10, 5));
        let b = Adversary::new(
            2,
            Strategy::SeededRandom {
                low: -1.0,
                high: 1.0,
            },
        );
        assert_ne!(a.broadcast_sequence(10, 4), b.broadcast_sequence(10, 4));
    }

    #[test]
    fn non_local_adversaries_are_flagged() {
        let g = platoon(6, 2);
        let adv = [
            Adversary::new(2, Strategy::Constant { value: 5.0 }),
            Adversary::new(3, Strategy::Constant { value: -5.0 }),
        ];
        let trace = run_wmsr(
            &g,
            &[0.0; 6],
            &adv,
            WmsrConfig {
                steps: 5,
                ..WmsrConfig::new(1, 0)
            },
        )
        .unwrap();
        assert!(!trace.f_local);
    }

    #[test]
    fn strategy_json_shape() {
        let a = Adversary::new(
            4,
            Strategy::Ramp {
                offset: 0.0,
                slope: 0.1,
            },
        );
        let json = serde_json::to_value(a).unwrap();
        assert_eq!(json["strategy"], "ramp");
        assert_eq!(json["vehicle"], 4);
        assert_eq!(json["params"]["slope"], 0.1);
        let back: Adversary = serde_json::from_value(json).unwrap();
        assert_eq!(back, a);
    }
}
