use std::path::PathBuf;

use clap::Args;
use nalgebra::DVector;
use platoon::formation::{
    build_formation, float_field, hinf_report, simulate_formation, Disturbance, FrequencyGrid,
    HinfReport, SimulationOptions, DEFAULT_SPACING, DEFAULT_STEP,
};
use platoon::graph::GraphFile;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::{Csv, Run};
use crate::scenario::{parse_text, read_scenario, resolve_graph};
use crate::{CliError, CliResult, Common, Format};

#[derive(Debug, Args)]
pub struct FormationArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FormationConfig {
    graph: Value,
    kp: f64,
    ku: f64,
    #[serde(default = "default_spacing")]
    spacing: f64,
    duration: f64,
    #[serde(default = "default_step")]
    step: f64,
    #[serde(default = "default_stride")]
    record_every: usize,
    #[serde(default)]
    disturbance: DisturbanceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<InitialState>,
}

fn default_spacing() -> f64 {
    DEFAULT_SPACING
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct InitialState {
    positions: Vec<f64>,
    velocities: Vec<f64>,
}

/// Disturbance acting on one vehicle or along an explicit direction.
/// A sinusoid without `omega` runs at the analytic peak frequency of the
/// slowest mode.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum DisturbanceConfig {
    #[default]
    None,
    Sinusoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vehicle: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Vec<f64>>,
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        #[serde(default)]
        phase: f64,
    },
    Step {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vehicle: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Vec<f64>>,
        amplitude: f64,
        #[serde(default)]
        start: f64,
    },
}

fn direction(
    n: usize,
    vehicle: Option<usize>,
    direction: &Option<Vec<f64>>,
) -> CliResult<DVector<f64>> {
    match (vehicle, direction) {
        (Some(v), None) if v < n => Ok(Disturbance::unit(n, v)),
        (Some(v), None) => Err(CliError::Validation(format!(
            "schema error at /disturbance/vehicle: vehicle {v} out of range for n = {n}"
        ))),
        (None, Some(d)) if d.len() == n => Ok(DVector::from_column_slice(d)),
        (None, Some(d)) => Err(CliError::Validation(format!(
            "schema error at /disturbance/direction: expected {n} values, got {}",
            d.len()
        ))),
        _ => Err(CliError::Validation(
            "schema error at /disturbance: give exactly one of \"vehicle\" or \"direction\"".into(),
        )),
    }
}

#[derive(Serialize)]
struct Sample {
    t: f64,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    spacing_errors: Vec<f64>,
}

#[derive(Serialize)]
struct FormationOutput<'a> {
    hinf: &'a HinfReport,
    omega: Option<f64>,
    edges: Vec<[usize; 2]>,
    samples: Vec<Sample>,
}

pub fn run(common: &Common, args: &FormationArgs) -> CliResult<()> {
    let file = read_scenario(&args.config)?;
    let config: FormationConfig = parse_text(&file.text)?;
    let graph = resolve_graph(&config.graph, &file.dir)?;
    let n = graph.n();
    let system = build_formation(&graph, config.kp, config.ku, config.spacing)?;
    let report = hinf_report(&system, &FrequencyGrid::default())?;

    let mut omega_used = None;
    let disturbance = match &config.disturbance {
        DisturbanceConfig::None => Disturbance::None,
        DisturbanceConfig::Sinusoid {
            vehicle,
            direction: d,
            amplitude,
            omega,
            phase,
        } => {
            let omega = omega.unwrap_or(report.peak_frequency);
            omega_used = Some(omega);
            Disturbance::Sinusoid {
                direction: direction(n, *vehicle, d)?,
                amplitude: *amplitude,
                omega,
                phase: *phase,
            }
        }
        DisturbanceConfig::Step {
            vehicle,
            direction: d,
            amplitude,
            start,
        } => Disturbance::Step {
            direction: direction(n, *vehicle, d)?,
            amplitude: *amplitude,
            start: *start,
        },
    };
    let mut options = SimulationOptions::new(config.duration);
    options.step = config.step;
    options.record_every = config.record_every;
    if let Some(init) = &config.initial {
        options.initial = Some((
            DVector::from_column_slice(&init.positions),
            DVector::from_column_slice(&init.velocities),
        ));
    }
    let trace = simulate_formation(&system, &disturbance, &options)?;

    let mut canonical = serde_json::to_value(&config).expect("config serializes");
    canonical["graph"] = json!(GraphFile::from(&graph));
    let mut run = Run::new("formation", canonical, common.seed, common);

    let edges = graph.edges();
    match run.format() {
        Format::Csv => {
            let mut states = Csv::new("t,vehicle,p,u");
            let mut spacing = Csv::new("t,edge,spacing_error");
            for (idx, &t) in trace.times.iter().enumerate() {
                for v in 0..n {
                    states.row(&[
                        float_field(t),
                        v.to_string(),
                        float_field(trace.positions[idx][v]),
                        float_field(trace.velocities[idx][v]),
                    ]);
                }
                for (l, &(i, j)) in edges.iter().enumerate() {
                    spacing.row(&[
                        float_field(t),
                        format!("{i}-{j}"),
                        float_field(trace.spacing_errors[idx][l]),
                    ]);
                }
            }
            run.write(Some("states"), "csv", &states.finish())?;
            run.write(Some("spacing"), "csv", &spacing.finish())?;
            run.write_json(Some("hinf"), &report)?;
        }
        Format::Json => {
            let samples = trace
                .times
                .iter()
                .enumerate()
                .map(|(idx, &t)| Sample {
                    t,
                    positions: trace.positions[idx].iter().copied().collect(),
                    velocities: trace.velocities[idx].iter().copied().collect(),
                    spacing_errors: trace.spacing_errors[idx].iter().copied().collect(),
                })
                .collect();
            let output = FormationOutput {
                hinf: &report,
                omega: omega_used,
                edges: edges.iter().map(|&(i, j)| [i, j]).collect(),
                samples,
            };
            run.write_json(None, &output)?;
        }
    }
    run.finish()?;

    println!(
        "lambda2 {}; H-infinity closed form {} ({}), sweep {}; peak spacing error {}",
        report.lambda2,
        report.closed_form,
        report.branch.as_str(),
        report.sweep_value,
        trace.peak_error_after(0.0)
    );
    Ok(())
}
