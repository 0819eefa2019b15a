//! Double-integrator formation control on a communication graph.
//!
//! Each vehicle applies
//! `p_i'' = sum_{j in N_i} kp (p_j - p_i + D_ij) + ku (u_j - u_i) + w_i`,
//! which in state-space form with `x = [P; U]` reads
//!
//! ```text
//! x' = [[0, I], [-kp L, -ku L]] x + [0; kp D] + [0; I] w,   y = B^T P.
//! ```
//!
//! The H-infinity norm from `w` to the spacing outputs `y` is available in
//! closed form through the Laplacian modes; [`hinf_sweep`] computes it
//! independently by evaluating the transfer matrix on a frequency grid.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::connectivity::{algebraic_connectivity, lambda2_bounds};
use crate::error::{Error, Result};
use crate::graph::{build_knn_platoon, Graph, PlatoonSpec};
use crate::linalg::sorted_symmetric_eigenvalues;

pub const DEFAULT_SPACING: f64 = 10.0;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Laplacian eigenvalues below this are treated as the zero mode.
const ZERO_MODE_TOL: f64 = 1e-9;

/// RK4 stays stable for `h |s| <= 2.5` along both axes.
const RK4_STABILITY: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
pub struct FormationSystem {
    graph: Graph,
    pub kp: f64,
    pub ku: f64,
    pub spacing: f64,
    laplacian: DMatrix<f64>,
    /// `D_i = sum_{j in N_i} D_ij` with `D_ij = d0 (j - i)`.
    pub delta: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b_aff: DVector<f64>,
    pub f: DMatrix<f64>,
    /// `[B^T 0]`.
    pub c: DMatrix<f64>,
}

/// Desired offset `p_i - p_j` between vehicles `i` and `j`.
pub fn desired_offset(spacing: f64, i: usize, j: usize) -> f64 {
    spacing * (j as f64 - i as f64)
}

pub fn build_formation(g: &Graph, kp: f64, ku: f64, spacing: f64) -> Result<FormationSystem> {
    if !(kp > 0.0 && ku > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gains must be positive, got kp = {kp}, ku = {ku}"
        )));
    }
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let laplacian = g.laplacian();
    let delta = DVector::from_fn(n, |i, _| {
        g.neighbors(i)
            .iter()
            .map(|&j| desired_offset(spacing, i, j))
            .sum()
    });

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).copy_from(&(-kp * &laplacian));
    a.view_mut((n, n), (n, n)).copy_from(&(-ku * &laplacian));

    let mut b_aff = DVector::zeros(2 * n);
    b_aff.rows_mut(n, n).copy_from(&(kp * &delta));

    let mut f = DMatrix::zeros(2 * n, n);
    f.view_mut((n, 0), (n, n)).fill_with_identity();

    let incidence = g.incidence();
    let mut c = DMatrix::zeros(g.edge_count(), 2 * n);
    c.view_mut((0, 0), (g.edge_count(), n))
        .copy_from(&incidence.transpose());

    Ok(FormationSystem {
        graph: g.clone(),
        kp,
        ku,
        spacing,
        laplacian,
        delta,
        a,
        b_aff,
        f,
        c,
    })
}

impl FormationSystem {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// `p_i = -d0 i`: vehicle 0 leads.
    pub fn desired_positions(&self) -> DVector<f64> {
        DVector::from_fn(self.n(), |i, _| -self.spacing * i as f64)
    }

    /// `B^T P*`, i.e. `D_ij` for every edge in canonical order.
    pub fn desired_spacing(&self) -> DVector<f64> {
        let edges = self.graph.edges();
        DVector::from_fn(edges.len(), |l, _| {
            desired_offset(self.spacing, edges[l].0, edges[l].1)
        })
    }

    /// Position block of the output matrix.
    pub fn output_positions(&self) -> DMatrix<f64> {
        self.c.columns(0, self.n()).into_owned()
    }

    /// Ascending Laplacian eigenvalues with the zero mode snapped to 0.
    pub fn modes(&self) -> Vec<f64> {
        sorted_symmetric_eigenvalues(&self.laplacian)
            .into_iter()
            .map(|l| if l.abs() < ZERO_MODE_TOL { 0.0 } else { l })
            .collect()
    }

    /// Roots of `s^2 + ku lambda s + kp lambda` for every Laplacian mode.
    pub fn poles(&self) -> Vec<Complex<f64>> {
        self.modes()
            .into_iter()
            .flat_map(|l| {
                let b = self.ku * l;
                let c = self.kp * l;
                let disc = Complex::new(b * b - 4.0 * c, 0.0).sqrt();
                [(-b + disc) / 2.0, (-b - disc) / 2.0]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    UnderdampedPeak,
    StaticGain,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::UnderdampedPeak => "underdamped-peak",
            Branch::StaticGain => "static-gain",
        }
    }
}

fn mode_norm(lambda: f64, kp: f64, ku: f64) -> (f64, Branch) {
    if lambda * ku * ku / (2.0 * kp) <= 1.0 {
        let value = 2.0 / (ku * lambda * (4.0 * kp - ku * ku * lambda).sqrt());
        (value, Branch::UnderdampedPeak)
    } else {
        (1.0 / (kp * lambda.sqrt()), Branch::StaticGain)
    }
}

/// H-infinity norm from disturbances to spacing errors given `lambda_2`:
/// `2 / (ku l2 sqrt(4 kp - ku^2 l2))` when `l2 ku^2 / (2 kp) <= 1`,
/// otherwise `1 / (kp sqrt(l2))`.
pub fn hinf_closed_form(lambda2: f64, kp: f64, ku: f64) -> Result<(f64, Branch)> {
    if !(lambda2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda2 must be positive, got {lambda2}"
        )));
    }
    Ok(mode_norm(lambda2, kp, ku))
}

/// Peak gain of the mode `sqrt(l) / (s^2 + ku l s + kp l)`; the zero mode
/// contributes nothing.
pub fn modal_hinf(lambda: f64, kp: f64, ku: f64) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "negative Laplacian eigenvalue {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(mode_norm(lambda, kp, ku).0)
}

/// `sqrt(kp l - ku^2 l^2 / 2)` when real, else 0 (the static gain is the
/// peak).
pub fn analytic_peak_frequency(lambda: f64, kp: f64, ku: f64) -> f64 {
    let sq = kp * lambda - 0.5 * ku * ku * lambda * lambda;
    if sq > 0.0 {
        sq.sqrt()
    } else {
        0.0
    }
}

/// Frequency grid for [`hinf_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub low: f64,
    pub high: f64,
    pub log_points: usize,
    /// Linear points per mode around its analytic peak.
    pub window_points: usize,
    /// Half-width of each window, relative to the peak frequency.
    pub window_fraction: f64,
    /// Golden-section iterations around the best grid point.
    pub refine_iterations: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self {
            low: 1e-3,
            high: 1e3,
            log_points: 2000,
            window_points: 50,
            window_fraction: 0.2,
            refine_iterations: 80,
        }
    }
}

impl FrequencyGrid {
    /// Sorted, deduplicated positive frequencies.
    pub fn frequencies(&self, modes: &[f64], kp: f64, ku: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.log_points + modes.len() * self.window_points);
        if self.log_points == 1 {
            out.push(self.low);
        } else {
            let (a, b) = (self.low.ln(), self.high.ln());
            let last = (self.log_points - 1) as f64;
            out.extend((0..self.log_points).map(|i| (a + (b - a) * i as f64 / last).exp()));
        }
        for &l in modes.iter().filter(|&&l| l > 0.0) {
            let peak = analytic_peak_frequency(l, kp, ku);
            if peak <= 0.0 || self.window_points < 2 {
                continue;
            }
            let lo = peak * (1.0 - self.window_fraction);
            let hi = peak * (1.0 + self.window_fraction);
            let last = (self.window_points - 1) as f64;
            out.extend((0..self.window_points).map(|i| lo + (hi - lo) * i as f64 / last));
        }
        out.retain(|w| *w >= self.low && *w <= self.high);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub value: f64,
    pub peak_frequency: f64,
    pub evaluations: usize,
}

/// Largest singular value of `C_pos (jw I - A)^{-1} F` restricted to the
/// position outputs, evaluated through the full state-space model.
fn state_space_gain(system: &FormationSystem, output: &DMatrix<f64>, omega: f64) -> f64 {
    let size = system.a.nrows();
    let n = system.n();
    let mut m: DMatrix<Complex<f64>> = system.a.map(|v| Complex::new(-v, 0.0));
    for i in 0..size {
        m[(i, i)] += Complex::new(0.0, omega);
    }
    let rhs: DMatrix<Complex<f64>> = system.f.map(|v| Complex::new(v, 0.0));
    let x = m
        .lu()
        .solve(&rhs)
        .expect("jw I - A is nonsingular for w > 0");
    let out: DMatrix<Complex<f64>> = output.map(|v| Complex::new(v, 0.0));
    let g = out * x.rows(0, n);
    g.singular_values().max()
}

/// Gain at `w = 0`, `|C_pos L^+ / kp|_2`, with the pseudo-inverse taken as
/// `(L + 11^T/n)^{-1} - 11^T/n`. Only finite when the output annihilates
/// the consensus direction.
fn static_gain(system: &FormationSystem, output: &DMatrix<f64>) -> Option<f64> {
    let n = system.n();
    let ones = DVector::from_element(n, 1.0);
    if (output * &ones).norm() > 1e-9 * (1.0 + output.norm()) {
        return None;
    }
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let inv = (system.laplacian() + &j).try_inverse()?;
    let pinv = inv - j;
    Some((output * pinv / system.kp).singular_values().max())
}

/// H-infinity norm of `w -> output * P` by frequency sweep.
///
/// Evaluates the transfer matrix at `w = 0` and on the grid, then refines
/// the best interior point by golden-section search between its grid
/// neighbors.
pub fn hinf_sweep_with_output(
    system: &FormationSystem,
    output: &DMatrix<f64>,
    grid: &FrequencyGrid,
) -> Result<SweepResult> {
    if output.ncols() != system.n() {
        return Err(Error::Dimension(format!(
            "output has {} columns, system has {} positions",
            output.ncols(),
            system.n()
        )));
    }
    let freqs = grid.frequencies(&system.modes(), system.kp, system.ku);
    let mut evaluations = 0;
    let mut best = (f64::NEG_INFINITY, 0.0);
    if let Some(g0) = static_gain(system, output) {
        evaluations += 1;
        best = (g0, 0.0);
    }
    let mut best_idx = None;
    for (idx, &w) in freqs.iter().enumerate() {
        let g = state_space_gain(system, output, w);
        evaluations += 1;
        if g > best.0 {
            best = (g, w);
            best_idx = Some(idx);
        }
    }

    if let Some(idx) = best_idx {
        let lo = freqs[idx.saturating_sub(1)];
        let hi = freqs[(idx + 1).min(freqs.len() - 1)];
        let (value, w) = golden_section_max(lo, hi, grid.refine_iterations, |w| {
            evaluations += 1;
            state_space_gain(system, output, w)
        });
        if value > best.0 {
            best = (value, w);
        }
    }
    Ok(SweepResult {
        value: best.0,
        peak_frequency: best.1,
        evaluations,
    })
}

/// [`hinf_sweep_with_output`] for the spacing outputs `B^T P`.
pub fn hinf_sweep(system: &FormationSystem, grid: &FrequencyGrid) -> Result<SweepResult> {
    hinf_sweep_with_output(system, &system.output_positions(), grid)
}

fn golden_section_max(
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
    mut f: impl FnMut(f64) -> f64,
) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (f1, x1)
    } else {
        (f2, x2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeNorm {
    pub lambda: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HinfReport {
    pub lambda2: f64,
    pub closed_form: f64,
    pub branch: Branch,
    /// Analytic peak frequency of the `lambda_2` mode (0 in the static-gain
    /// branch).
    pub peak_frequency: f64,
    pub sweep_value: f64,
    pub sweep_peak_frequency: f64,
    pub per_mode: Vec<ModeNorm>,
}

impl HinfReport {
    pub fn relative_error(&self) -> f64 {
        (self.closed_form - self.sweep_value).abs() / self.closed_form
    }

    pub fn max_mode_norm(&self) -> f64 {
        self.per_mode
            .iter()
            .skip(1)
            .map(|m| m.norm)
            .fold(0.0, f64::max)
    }
}

pub fn hinf_report(system: &FormationSystem, grid: &FrequencyGrid) -> Result<HinfReport> {
    let modes = system.modes();
    let lambda2 = modes[1];
    let (closed_form, branch) = hinf_closed_form(lambda2, system.kp, system.ku)?;
    let per_mode = modes
        .iter()
        .map(|&l| {
            Ok(ModeNorm {
                lambda: l,
                norm: modal_hinf(l, system.kp, system.ku)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = hinf_sweep(system, grid)?;
    Ok(HinfReport {
        lambda2,
        closed_form,
        branch,
        peak_frequency: analytic_peak_frequency(lambda2, system.kp, system.ku),
        sweep_value: sweep.value,
        sweep_peak_frequency: sweep.peak_frequency,
        per_mode,
    })
}

/// External disturbance `w(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Disturbance {
    None,
    /// `amplitude cos(omega t + phase) direction`; `omega = 0` gives a
    /// constant input.
    Sinusoid {
        direction: DVector<f64>,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// `amplitude direction` for `t >= start`.
    Step {
        direction: DVector<f64>,
        amplitude: f64,
        start: f64,
    },
}

impl Disturbance {
    pub fn unit(n: usize, vehicle: usize) -> DVector<f64> {
        let mut d = DVector::zeros(n);
        d[vehicle] = 1.0;
        d
    }

    pub fn sinusoid_on(n: usize, vehicle: usize, amplitude: f64, omega: f64) -> Self {
        Disturbance::Sinusoid {
            direction: Self::unit(n, vehicle),
            amplitude,
            omega,
            phase: 0.0,
        }
    }

    pub fn step_on(n: usize, vehicle: usize, amplitude: f64, start: f64) -> Self {
        Disturbance::Step {
            direction: Self::unit(n, vehicle),
            amplitude,
            start,
        }
    }

    pub fn at(&self, n: usize, t: f64) -> DVector<f64> {
        match self {
            Disturbance::None => DVector::zeros(n),
            Disturbance::Sinusoid {
                direction,
                amplitude,
                omega,
                phase,
            } => direction * (amplitude * (omega * t + phase).cos()),
            Disturbance::Step {
                direction,
                amplitude,
                start,
            } => {
                if t >= *start {
                    direction * *amplitude
                } else {
                    DVector::zeros(n)
                }
            }
        }
    }

    fn dimension(&self) -> Option<usize> {
        match self {
            Disturbance::None => None,
            Disturbance::Sinusoid { direction, .. } | Disturbance::Step { direction, .. } => {
                Some(direction.len())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub duration: f64,
    pub step: f64,
    pub record_every: usize,
    /// Initial positions and velocities; defaults to the desired formation
    /// at rest.
    pub initial: Option<(DVector<f64>, DVector<f64>)>,
}

impl SimulationOptions {
    pub fn new(duration: f64) -> Self {
        Self {
            duration,
            step: DEFAULT_STEP,
            record_every: 1,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormationTrace {
    pub times: Vec<f64>,
    pub positions: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    pub spacing_errors: Vec<DVector<f64>>,
}

impl FormationTrace {
    /// `max |y(t)|_2` over recorded samples with `t >= from`.
    pub fn peak_error_after(&self, from: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.spacing_errors)
            .filter(|(t, _)| **t >= from)
            .map(|(_, e)| e.norm())
            .fold(0.0, f64::max)
    }
}

/// Classical RK4 integration of the closed loop including the offset term.
/// Spacing errors are `B^T P(t) - B^T P*`.
pub fn simulate_formation(
    system: &FormationSystem,
    disturbance: &Disturbance,
    options: &SimulationOptions,
) -> Result<FormationTrace> {
    let n = system.n();
    let h = options.step;
    if !(h > 0.0) || !(options.duration >= 0.0) || options.record_every == 0 {
        return Err(Error::InvalidArgument(
            "step, duration and record stride must be positive".into(),
        ));
    }
    if disturbance.dimension().is_some_and(|d| d != n) {
        return Err(Error::Dimension(
            "disturbance direction does not match vehicle count".into(),
        ));
    }
    let pole_magnitude = system.poles().iter().map(|p| p.norm()).fold(0.0, f64::max);
    if h * pole_magnitude > RK4_STABILITY {
        return Err(Error::UnstableStep {
            step: h,
            pole_magnitude,
        });
    }

    let (mut p, mut u) = match &options.initial {
        Some((p0, u0)) => {
            if p0.len() != n || u0.len() != n {
                return Err(Error::Dimension(
                    "initial state does not match vehicle count".into(),
                ));
            }
            (p0.clone(), u0.clone())
        }
        None => (system.desired_positions(), DVector::zeros(n)),
    };

    let l = system.laplacian();
    let offset = &system.delta * system.kp;
    let accel = |p: &DVector<f64>, u: &DVector<f64>, t: f64| -> DVector<f64> {
        -(l * p) * system.kp - (l * u) * system.ku + &offset + disturbance.at(n, t)
    };
    let b_t = system.output_positions();
    let target = system.desired_spacing();

    let steps = (options.duration / h).round() as usize;
    let mut trace = FormationTrace {
        times: Vec::new(),
        positions: Vec::new(),
        velocities: Vec::new(),
        spacing_errors: Vec::new(),
    };
    let mut record = |k: usize, p: &DVector<f64>, u: &DVector<f64>| {
        trace.times.push(k as f64 * h);
        trace.spacing_errors.push(&b_t * p - &target);
        trace.positions.push(p.clone());
        trace.velocities.push(u.clone());
    };
    record(0, &p, &u);
    for k in 0..steps {
        let t = k as f64 * h;
        let k1p = u.clone();
        let k1u = accel(&p, &u, t);
        let p2 = &p + &k1p * (h / 2.0);
        let u2 = &u + &k1u * (h / 2.0);
        let k2p = u2.clone();
        let k2u = accel(&p2, &u2, t + h / 2.0);
        let p3 = &p + &k2p * (h / 2.0);
        let u3 = &u + &k2u * (h / 2.0);
        let k3p = u3.clone();
        let k3u = accel(&p3, &u3, t + h / 2.0);
        let p4 = &p + &k3p * h;
        let u4 = &u + &k3u * h;
        let k4p = u4.clone();
        let k4u = accel(&p4, &u4, t + h);
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
        u += (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (h / 6.0);
        if (k + 1) % options.record_every == 0 || k + 1 == steps {
            record(k + 1, &p, &u);
        }
    }
    Ok(trace)
}

/// One row of the `(n, k)` H-infinity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n: usize,
    pub k: usize,
    pub kp: f64,
    pub ku: f64,
    pub lambda2: f64,
    pub lb: f64,
    pub ub: f64,
    pub hinf: f64,
    pub branch: Branch,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<f64>,
}

impl GridRow {
    pub const CSV_HEADER: &'static str = "n,k,kp,ku,lambda2,lb,ub,hinf,branch";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            float_field(self.kp),
            float_field(self.ku),
            float_field(self.lambda2),
            float_field(self.lb),
            float_field(self.ub),
            float_field(self.hinf),
            self.branch.as_str()
        )
    }
}

/// Shortest round-trip form, with an exponent for very small or large
/// magnitudes; non-finite values print as `NaN`/`inf`, and `-0.0` as `0.0`.
pub fn float_field(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    match serde_json::Number::from_f64(v) {
        Some(num) => num.to_string(),
        None => v.to_string(),
    }
}

/// Closed-form H-infinity norm over every valid `(n, k)` pair, with the
/// algebraic-connectivity bracket. Every `sweep_every`-th row (in output
/// order) is also checked by frequency sweep; 0 disables the checks.
pub fn hinf_grid(
    ns: impl IntoIterator<Item = usize>,
    ks: impl IntoIterator<Item = usize> + Clone,
    kp: f64,
    ku: f64,
    sweep_every: usize,
) -> Result<Vec<GridRow>> {
    let mut rows = Vec::new();
    for n in ns {
        for k in ks.clone() {
            let Ok(spec) = PlatoonSpec::new(n, k) else {
                continue;
            };
            let g = build_knn_platoon(spec)?;
            let lambda2 = algebraic_connectivity(&g);
            let bounds = lambda2_bounds(spec);
            let (hinf, branch) = hinf_closed_form(lambda2, kp, ku)?;
            let sweep = if sweep_every > 0 && rows.len() % sweep_every == 0 {
                let system = build_formation(&g, kp, ku, DEFAULT_SPACING)?;
                Some(hinf_sweep(&system, &FrequencyGrid::default())?.value)
            } else {
                None
            };
            rows.push(GridRow {
                n,
                k,
                kp,
                ku,
                lambda2,
                lb: bounds.lower,
                ub: bounds.upper,
                hinf,
                branch,
                sweep,
            });
        }
    }
    Ok(rows)
}
