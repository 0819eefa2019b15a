use std::path::PathBuf;

use clap::Args;
use nalgebra::DVector;
use platoon::estimation::{
    error_curve, random_initial_state, recover_initial_state, simulate_faulty, FaultScenario,
    MeasurementTrace, Recovery, WeightMatrix,
};
use platoon::formation::float_field;
use platoon::graph::GraphFile;
use platoon::linalg::inf_norm;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::{Csv, Run};
use crate::scenario::{effective_seed, parse_text, read_scenario, resolve_graph};
use crate::{CliError, CliResult, Common, Format};

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    scenario: PathBuf,
}

/// Weights are drawn from `seed`, initial values (unless given) from
/// `seed + 1`. Injections not listed in `phi` are zero.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EstimateScenario {
    graph: Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    faulty: Vec<usize>,
    /// `[vehicle, step, value]` triples.
    #[serde(default)]
    phi: Vec<(usize, usize, f64)>,
    observer: usize,
    f: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x0: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct CurvePoint {
    step: usize,
    error: f64,
}

#[derive(Serialize)]
struct EstimateOutput {
    status: &'static str,
    consistent_fault_sets: Vec<Vec<usize>>,
    estimate: Option<Vec<f64>>,
    truth: Vec<f64>,
    error_inf: Option<f64>,
    curve: Vec<CurvePoint>,
}

pub fn run(common: &Common, args: &EstimateArgs) -> CliResult<()> {
    let file = read_scenario(&args.scenario)?;
    let scenario: EstimateScenario = parse_text(&file.text)?;
    let graph = resolve_graph(&scenario.graph, &file.dir)?;
    let seed = effective_seed(common.seed, scenario.seed)?;
    let n = graph.n();
    if scenario.observer >= n {
        return Err(CliError::Validation(format!(
            "schema error at /observer: vehicle {} out of range for n = {n}",
            scenario.observer
        )));
    }

    let mut faults = FaultScenario::new(scenario.faulty.iter().copied(), n);
    for (idx, &(vehicle, step, value)) in scenario.phi.iter().enumerate() {
        faults
            .set(vehicle, step, value)
            .map_err(|e| CliError::Validation(format!("schema error at /phi/{idx}: {e}")))?;
    }
    faults
        .validate(n)
        .map_err(|e| CliError::Validation(format!("schema error at /faulty: {e}")))?;

    let x0 = match &scenario.x0 {
        Some(values) if values.len() != n => {
            return Err(CliError::Validation(format!(
                "schema error at /x0: expected {n} values, got {}",
                values.len()
            )))
        }
        Some(values) => DVector::from_column_slice(values),
        None => random_initial_state(n, seed.wrapping_add(1)),
    };
    let w = WeightMatrix::random(&graph, seed);
    let states = simulate_faulty(&w, &x0, &faults)?;
    let trace = MeasurementTrace::record(&graph, scenario.observer, &states)?;
    let recovery = recover_initial_state(&graph, &trace, &w, scenario.f)?;
    let curve = error_curve(&graph, &trace, &w, scenario.f, &x0)?;

    let mut config = serde_json::to_value(&scenario).expect("scenario serializes");
    config["graph"] = json!(GraphFile::from(&graph));
    config["seed"] = json!(seed);
    let mut run = Run::new("estimate", config, Some(seed), common);

    let (status, estimate) = match &recovery {
        Recovery::Unique { x0: est, .. } => ("unique", Some(est.clone())),
        Recovery::Ambiguous(_) => ("ambiguous", None),
    };
    let error_inf = estimate.as_ref().map(|e| inf_norm(&(e - &x0)));
    match run.format() {
        Format::Csv => {
            let mut csv = Csv::new("step,error");
            for &(step, error) in &curve {
                csv.row(&[step.to_string(), float_field(error)]);
            }
            run.write(None, "csv", &csv.finish())?;
        }
        Format::Json => {
            let output = EstimateOutput {
                status,
                consistent_fault_sets: recovery.consistent_sets(),
                estimate: estimate.map(|e| e.iter().copied().collect()),
                truth: x0.iter().copied().collect(),
                error_inf,
                curve: curve
                    .iter()
                    .map(|&(step, error)| CurvePoint { step, error })
                    .collect(),
            };
            run.write_json(None, &output)?;
        }
    }
    run.finish()?;

    println!(
        "recovery {status}; consistent fault sets {:?}; error {}",
        recovery.consistent_sets(),
        error_inf.map_or("n/a".to_string(), |e| format!("{e:e}"))
    );
    Ok(())
}
