//! Linear iterative strategy with faulty vehicles, and recovery of every
//! vehicle's initial value from one observer's local measurements.
//!
//! Each vehicle updates `x_i[k+1] = w_ii x_i[k] + sum_j w_ij x_j[k] + phi_i[k]`,
//! where `phi_i` is nonzero only for faulty vehicles. The observer sees its
//! own value and its neighbors' values at every step. Recovery stacks those
//! measurements over a horizon of `n` steps,
//!
//! ```text
//! Y = O x[0] + J_F Phi_F,
//! ```
//!
//! and tests every candidate fault set `F` with `|F| <= f`: the candidate is
//! consistent when `Y` lies in the range of `[O J_F]`. Consistent candidates
//! must agree on `x[0]`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{inf_norm, least_squares, project_out, range_basis};

pub const WEIGHT_LOW: f64 = 0.2;
pub const WEIGHT_HIGH: f64 = 1.0;

/// Iteration matrix whose support is the graph plus the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    matrix: DMatrix<f64>,
}

impl WeightMatrix {
    pub fn new(g: &Graph, matrix: DMatrix<f64>) -> Result<Self> {
        let n = g.n();
        if matrix.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "weight matrix is {:?}, graph has {n} vertices",
                matrix.shape()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !g.has_edge(i, j) && matrix[(i, j)] != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "weight ({i}, {j}) is nonzero but {i} and {j} are not neighbors"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// Entries on the support drawn i.i.d. from `U[0.2, 1.0]`, row by row in
    /// column order.
    pub fn random(g: &Graph, seed: u64) -> Self {
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j || g.has_edge(i, j) {
                    matrix[(i, j)] = rng.random_range(WEIGHT_LOW..=WEIGHT_HIGH);
                }
            }
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Rows sum to one and every supported entry lies in `(0, 1]`.
    pub fn is_row_stochastic(&self, g: &Graph, tol: f64) -> bool {
        (0..self.n()).all(|i| {
            let row = self.matrix.row(i);
            let support_ok = (0..self.n()).all(|j| {
                let w = row[j];
                if i == j || g.has_edge(i, j) {
                    w > 0.0 && w <= 1.0
                } else {
                    w == 0.0
                }
            });
            support_ok && (row.sum() - 1.0).abs() <= tol
        })
    }

    /// Copy with row `i`'s neighbor entries zeroed: vehicle `i` hears nothing.
    pub fn without_neighbor_inputs(&self, i: usize) -> Self {
        let mut matrix = self.matrix.clone();
        for j in 0..self.n() {
            if j != i {
                matrix[(i, j)] = 0.0;
            }
        }
        Self { matrix }
    }
}

/// Faulty vehicles and the values they inject.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FaultScenario {
    faulty: Vec<usize>,
    phi: BTreeMap<(usize, usize), f64>,
    horizon: usize,
}

impl FaultScenario {
    pub fn new(faulty: impl IntoIterator<Item = usize>, horizon: usize) -> Self {
        let mut faulty: Vec<usize> = faulty.into_iter().collect();
        faulty.sort_unstable();
        faulty.dedup();
        Self {
            faulty,
            phi: BTreeMap::new(),
            horizon,
        }
    }

    pub fn fault_free(horizon: usize) -> Self {
        Self::new([], horizon)
    }

    /// Sets `phi_vehicle[step]`.
    pub fn set(&mut self, vehicle: usize, step: usize, value: f64) -> Result<()> {
        if self.faulty.binary_search(&vehicle).is_err() {
            return Err(Error::InvalidArgument(format!(
                "injected value for vehicle {vehicle}, which is not faulty"
            )));
        }
        if step >= self.horizon {
            return Err(Error::InvalidArgument(format!(
                "injected value at step {step} is beyond the horizon {}",
                self.horizon
            )));
        }
        self.phi.insert((vehicle, step), value);
        Ok(())
    }

    pub fn with(mut self, vehicle: usize, step: usize, value: f64) -> Result<Self> {
        self.set(vehicle, step, value)?;
        Ok(self)
    }

    pub fn faulty(&self) -> &[usize] {
        &self.faulty
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn phi(&self, vehicle: usize, step: usize) -> f64 {
        self.phi.get(&(vehicle, step)).copied().unwrap_or(0.0)
    }

    /// Full-length injection vector `A phi[step]`.
    pub fn injection(&self, n: usize, step: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        for &i in &self.faulty {
            v[i] = self.phi(i, step);
        }
        v
    }

    /// The column-selection matrix `[e_i1 ... e_if]`.
    pub fn selection(&self, n: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, self.faulty.len());
        for (col, &i) in self.faulty.iter().enumerate() {
            a[(i, col)] = 1.0;
        }
        a
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.faulty.iter().find(|&&v| v >= n) {
            Some(&v) => Err(Error::VertexOutOfRange { vertex: v, n }),
            None => Ok(()),
        }
    }
}

/// Runs `x[k+1] = W x[k] + A phi[k]` for `horizon` steps; returns
/// `x[0..=horizon]`.
pub fn simulate_faulty(
    w: &WeightMatrix,
    x0: &DVector<f64>,
    scenario: &FaultScenario,
) -> Result<Vec<DVector<f64>>> {
    let n = w.n();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "x0 has length {}, W is {n}x{n}",
            x0.len()
        )));
    }
    scenario.validate(n)?;
    simulate_with(w, x0, scenario.horizon(), |step, _| {
        scenario.injection(n, step)
    })
}

/// Like [`simulate_faulty`], with the injection computed from the current
/// state. `inject(k, x[k])` returns the full-length vector added at step `k`.
pub fn simulate_with(
    w: &WeightMatrix,
    x0: &DVector<f64>,
    steps: usize,
    mut inject: impl FnMut(usize, &DVector<f64>) -> DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let n = w.n();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "x0 has length {}, W is {n}x{n}",
            x0.len()
        )));
    }
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(x0.clone());
    for step in 0..steps {
        let x = &trace[step];
        let injected = inject(step, x);
        if injected.len() != n {
            return Err(Error::Dimension(format!(
                "injection has length {}",
                injected.len()
            )));
        }
        let next = w.matrix() * x + injected;
        trace.push(next);
    }
    Ok(trace)
}

/// `phi_i[k] = -sum_{j in N_i} w_ij x_j[k]`: the injection that makes vehicle
/// `i` behave as if it received nothing from its neighbors at step `k`.
pub fn packet_drop_fault(w: &WeightMatrix, trace: &[DVector<f64>], i: usize, k: usize) -> f64 {
    let x = &trace[k];
    let row = w.matrix().row(i);
    -(0..w.n())
        .filter(|&j| j != i)
        .map(|j| row[j] * x[j])
        .sum::<f64>()
}

/// Simulates `steps` updates where every vehicle in `dropped` loses all of
/// its incoming packets at every step.
pub fn simulate_packet_drop(
    w: &WeightMatrix,
    x0: &DVector<f64>,
    dropped: &[usize],
    steps: usize,
) -> Result<Vec<DVector<f64>>> {
    let n = w.n();
    let mut history: Vec<DVector<f64>> = Vec::with_capacity(steps + 1);
    simulate_with(w, x0, steps, |step, x| {
        history.push(x.clone());
        let mut v = DVector::zeros(n);
        for &i in dropped {
            v[i] = packet_drop_fault(w, &history, i, step);
        }
        v
    })
}

/// Rows `N_i ∪ {i}` in ascending vertex order.
pub fn observed_vehicles(g: &Graph, observer: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = g.neighbors(observer).to_vec();
    rows.push(observer);
    rows.sort_unstable();
    rows
}

/// The `(d_i + 1) x n` selection matrix `C_i`.
pub fn selection_matrix(g: &Graph, observer: usize) -> DMatrix<f64> {
    let rows = observed_vehicles(g, observer);
    let mut c = DMatrix::zeros(rows.len(), g.n());
    for (r, &v) in rows.iter().enumerate() {
        c[(r, v)] = 1.0;
    }
    c
}

/// The measurements `y_i[k] = C_i x[k]` an observer collects.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTrace {
    pub observer: usize,
    pub rows: Vec<usize>,
    pub y: Vec<DVector<f64>>,
}

impl MeasurementTrace {
    pub fn record(g: &Graph, observer: usize, states: &[DVector<f64>]) -> Result<Self> {
        if observer >= g.n() {
            return Err(Error::VertexOutOfRange {
                vertex: observer,
                n: g.n(),
            });
        }
        let rows = observed_vehicles(g, observer);
        let y = states
            .iter()
            .map(|x| DVector::from_iterator(rows.len(), rows.iter().map(|&v| x[v])))
            .collect();
        Ok(Self { observer, rows, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// The first `horizon` measurements stacked into one vector.
    pub fn stacked(&self, horizon: usize) -> DVector<f64> {
        let m = self.rows.len();
        DVector::from_iterator(
            m * horizon,
            self.y[..horizon].iter().flat_map(|y| y.iter().copied()),
        )
    }
}

/// Stacked observation model over a fixed horizon.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    /// `C_i W^k` for `k = 0..horizon`.
    blocks: Vec<DMatrix<f64>>,
    horizon: usize,
    n: usize,
}

impl ObservationModel {
    pub fn new(g: &Graph, w: &WeightMatrix, observer: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if observer >= g.n() {
            return Err(Error::VertexOutOfRange {
                vertex: observer,
                n: g.n(),
            });
        }
        if w.n() != g.n() {
            return Err(Error::Dimension("weight matrix and graph disagree".into()));
        }
        let mut blocks = Vec::with_capacity(horizon);
        blocks.push(selection_matrix(g, observer));
        for k in 1..horizon {
            let next = &blocks[k - 1] * w.matrix();
            blocks.push(next);
        }
        Ok(Self {
            blocks,
            horizon,
            n: g.n(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn rows_per_step(&self) -> usize {
        self.blocks[0].nrows()
    }

    /// `O = [C; C W; ...; C W^(L-1)]`.
    pub fn observability(&self) -> DMatrix<f64> {
        let m = self.rows_per_step();
        let mut o = DMatrix::zeros(m * self.horizon, self.n);
        for (k, block) in self.blocks.iter().enumerate() {
            o.rows_mut(k * m, m).copy_from(block);
        }
        o
    }

    /// Maps `Phi = [phi_F[0]; ...; phi_F[L-2]]` (inputs at the last step
    /// never reach a measurement) into the stacked measurements: block
    /// `(k, t)` is `C W^(k-1-t) E_F` for `t < k`.
    pub fn unknown_input_matrix(&self, fault_set: &[usize]) -> DMatrix<f64> {
        let m = self.rows_per_step();
        let f = fault_set.len();
        let steps = self.horizon - 1;
        let mut j = DMatrix::zeros(m * self.horizon, f * steps);
        for t in 0..steps {
            for k in t + 1..self.horizon {
                let block = &self.blocks[k - 1 - t];
                for (a, &v) in fault_set.iter().enumerate() {
                    j.view_mut((k * m, t * f + a), (m, 1))
                        .copy_from(&block.column(v));
                }
            }
        }
        j
    }
}

/// Builds `(O_i, J_i)` for the given candidate fault set.
pub fn observation_model(
    g: &Graph,
    w: &WeightMatrix,
    observer: usize,
    horizon: usize,
    fault_set: &[usize],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let model = ObservationModel::new(g, w, observer, horizon)?;
    Ok((model.observability(), model.unknown_input_matrix(fault_set)))
}

/// Stacks a scenario's injections in the column order of
/// [`ObservationModel::unknown_input_matrix`].
pub fn stack_inputs(scenario: &FaultScenario, fault_set: &[usize], horizon: usize) -> DVector<f64> {
    let f = fault_set.len();
    let steps = horizon.saturating_sub(1);
    DVector::from_fn(f * steps, |idx, _| {
        scenario.phi(fault_set[idx % f], idx / f)
    })
}

/// Result of testing one candidate fault set.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEstimate {
    pub fault_set: Vec<usize>,
    pub residual: f64,
    /// Whether `x[0]` is uniquely determined for this candidate.
    pub identifiable: bool,
    pub x0: DVector<f64>,
    /// Minimum-norm stacked inputs explaining the data given `x0`.
    pub phi: DVector<f64>,
}

impl CandidateEstimate {
    /// Rebuilds a scenario carrying this candidate's inputs.
    pub fn scenario(&self, horizon: usize) -> FaultScenario {
        let mut s = FaultScenario::new(self.fault_set.iter().copied(), horizon);
        let f = self.fault_set.len();
        for (idx, &value) in self.phi.iter().enumerate() {
            s.set(self.fault_set[idx % f], idx / f, value)
                .expect("index within horizon");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recovery {
    Unique {
        x0: DVector<f64>,
        /// Consistent candidate with the smallest residual.
        estimate: CandidateEstimate,
        consistent: Vec<Vec<usize>>,
    },
    Ambiguous(AmbiguityReport),
}

impl Recovery {
    pub fn x0(&self) -> Option<&DVector<f64>> {
        match self {
            Recovery::Unique { x0, .. } => Some(x0),
            Recovery::Ambiguous(_) => None,
        }
    }

    pub fn consistent_sets(&self) -> Vec<Vec<usize>> {
        match self {
            Recovery::Unique { consistent, .. } => consistent.clone(),
            Recovery::Ambiguous(report) => report
                .candidates
                .iter()
                .map(|c| c.fault_set.clone())
                .collect(),
        }
    }
}

/// Consistent candidates that do not pin down a single `x[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityReport {
    pub candidates: Vec<CandidateEstimate>,
    pub tolerance: f64,
}

/// Candidate fault sets of size `0..=max_faults` drawn from `vehicles`,
/// ordered by size, then lexicographically.
pub fn candidate_fault_sets(vehicles: &[usize], max_faults: usize) -> Vec<Vec<usize>> {
    fn extend(
        vehicles: &[usize],
        start: usize,
        size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for idx in start..vehicles.len() {
            current.push(vehicles[idx]);
            extend(vehicles, idx + 1, size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=max_faults.min(vehicles.len()) {
        extend(vehicles, 0, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Residual and agreement tolerance, `1e-8 (1 + |Y|_inf)`.
pub fn recovery_tolerance(stacked: &DVector<f64>) -> f64 {
    1e-8 * (1.0 + inf_norm(stacked))
}

/// Fits one candidate fault set against stacked measurements.
pub fn fit_candidate(
    model: &ObservationModel,
    observability: &DMatrix<f64>,
    stacked: &DVector<f64>,
    fault_set: &[usize],
) -> CandidateEstimate {
    let n = observability.ncols();
    let j = model.unknown_input_matrix(fault_set);
    let basis = range_basis(&j);
    let projected_o = project_out(&basis, observability);
    let projected_y = project_out(
        &basis,
        &DMatrix::from_column_slice(stacked.len(), 1, stacked.as_slice()),
    );
    let projected_y = DVector::from_column_slice(projected_y.as_slice());
    let fit = least_squares(&projected_o, &projected_y);
    let phi = if j.ncols() == 0 {
        DVector::zeros(0)
    } else {
        least_squares(&j, &(stacked - observability * &fit.solution)).solution
    };
    CandidateEstimate {
        fault_set: fault_set.to_vec(),
        residual: fit.residual,
        identifiable: fit.rank == n,
        x0: fit.solution,
        phi,
    }
}

/// Recovers `x[0]` from the first `horizon` measurements, tolerating up to
/// `max_faults` faulty vehicles other than the observer.
pub fn recover_with_horizon(
    g: &Graph,
    trace: &MeasurementTrace,
    w: &WeightMatrix,
    max_faults: usize,
    horizon: usize,
) -> Result<Recovery> {
    if trace.len() < horizon {
        return Err(Error::InvalidArgument(format!(
            "trace holds {} measurements, horizon needs {horizon}",
            trace.len()
        )));
    }
    let model = ObservationModel::new(g, w, trace.observer, horizon)?;
    let o = model.observability();
    let stacked = trace.stacked(horizon);
    let tol = recovery_tolerance(&stacked);

    let others: Vec<usize> = (0..g.n()).filter(|&v| v != trace.observer).collect();
    let consistent: Vec<CandidateEstimate> = candidate_fault_sets(&others, max_faults)
        .iter()
        .map(|set| fit_candidate(&model, &o, &stacked, set))
        .filter(|c| c.residual < tol)
        .collect();

    // smallest residual, earliest in enumeration order on ties
    let Some(best) = consistent
        .iter()
        .reduce(|best, c| if c.residual < best.residual { c } else { best })
    else {
        return Err(Error::ModelMismatch { max_faults });
    };
    let agree = consistent.iter().all(|c| c.identifiable)
        && consistent
            .iter()
            .all(|c| inf_norm(&(&c.x0 - &best.x0)) <= tol);
    if !agree {
        return Ok(Recovery::Ambiguous(AmbiguityReport {
            candidates: consistent,
            tolerance: tol,
        }));
    }
    Ok(Recovery::Unique {
        x0: best.x0.clone(),
        estimate: best.clone(),
        consistent: consistent.iter().map(|c| c.fault_set.clone()).collect(),
    })
}

/// Recovery over the default horizon `L = n`.
pub fn recover_initial_state(
    g: &Graph,
    trace: &MeasurementTrace,
    w: &WeightMatrix,
    max_faults: usize,
) -> Result<Recovery> {
    recover_with_horizon(g, trace, w, max_faults, g.n())
}

/// `floor((k - 1) / 2)` faulty vehicles are tolerated on `P(n,k)`.
pub fn max_tolerable_faults(k: usize) -> usize {
    k.saturating_sub(1) / 2
}

/// Estimation error after each additional measurement.
///
/// At horizon `h` the estimate is the minimum-norm `x[0]` of the candidate
/// fault set with the smallest residual (first in enumeration order on
/// ties); the error is its Euclidean distance to `truth`.
pub fn error_curve(
    g: &Graph,
    trace: &MeasurementTrace,
    w: &WeightMatrix,
    max_faults: usize,
    truth: &DVector<f64>,
) -> Result<Vec<(usize, f64)>> {
    let horizon = trace.len().min(g.n());
    let others: Vec<usize> = (0..g.n()).filter(|&v| v != trace.observer).collect();
    let candidates = candidate_fault_sets(&others, max_faults);
    let full = ObservationModel::new(g, w, trace.observer, horizon.max(1))?;
    let mut curve = Vec::with_capacity(horizon);
    for h in 1..=horizon {
        let model = ObservationModel {
            blocks: full.blocks[..h].to_vec(),
            horizon: h,
            n: full.n,
        };
        let o = model.observability();
        let stacked = trace.stacked(h);
        let best = candidates
            .iter()
            .map(|set| fit_candidate(&model, &o, &stacked, set))
            .reduce(|best, c| if c.residual < best.residual { c } else { best })
            .expect("empty fault set is always a candidate");
        curve.push((h, (&best.x0 - truth).norm()));
    }
    Ok(curve)
}

/// Initial values drawn uniformly from `[-10, 10]`.
pub fn random_initial_state(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.random_range(-10.0..=10.0))
}
