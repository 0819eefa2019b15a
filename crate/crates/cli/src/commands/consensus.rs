use std::path::PathBuf;

use clap::Args;
use platoon::consensus::{run_wmsr, Adversary, Strategy, WmsrConfig, DEFAULT_STEPS, DEFAULT_TOL};
use platoon::estimation::random_initial_state;
use platoon::formation::float_field;
use platoon::graph::GraphFile;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::{Csv, Run};
use crate::scenario::{effective_seed, parse_text, parse_text_at, read_scenario, resolve_graph};
use crate::{CliError, CliResult, Common, Format};

#[derive(Debug, Args)]
pub struct ConsensusArgs {
    #[arg(long)]
    scenario: PathBuf,
}

/// Initial values (unless given) are uniform on `[-10, 10]` from `seed`;
/// the same seed drives `seeded-random` adversaries.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConsensusScenario {
    graph: Value,
    #[serde(default)]
    seed: Option<u64>,
    f: usize,
    #[serde(default)]
    adversaries: Vec<AdversaryEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x0: Option<Vec<f64>>,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_tol")]
    tol: f64,
}

/// `{"vehicle", "strategy", "params"}`; the strategy is decoded separately
/// so schema errors keep their full path.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct AdversaryEntry {
    vehicle: usize,
    strategy: String,
    #[serde(default)]
    params: Value,
}

impl AdversaryEntry {
    fn decode(&self, index: usize) -> CliResult<Adversary> {
        // tag first, so params deserialize in place rather than buffered
        let text = format!(
            r#"{{"strategy":{},"params":{}}}"#,
            Value::String(self.strategy.clone()),
            self.params
        );
        let strategy: Strategy = parse_text_at(&text, &format!("/adversaries/{index}"))?;
        Ok(Adversary::new(self.vehicle, strategy))
    }
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Serialize)]
struct ConsensusOutput {
    normal: Vec<usize>,
    adversarial: Vec<usize>,
    f_local: bool,
    converged_at: Option<usize>,
    final_spread: f64,
    safety_violations: Vec<(usize, usize)>,
    values: Vec<Vec<f64>>,
}

pub fn run(common: &Common, args: &ConsensusArgs) -> CliResult<()> {
    let file = read_scenario(&args.scenario)?;
    let scenario: ConsensusScenario = parse_text(&file.text)?;
    let graph = resolve_graph(&scenario.graph, &file.dir)?;
    let seed = effective_seed(common.seed, scenario.seed)?;
    let n = graph.n();
    let x0: Vec<f64> = match &scenario.x0 {
        Some(values) if values.len() != n => {
            return Err(CliError::Validation(format!(
                "schema error at /x0: expected {n} values, got {}",
                values.len()
            )))
        }
        Some(values) => values.clone(),
        None => random_initial_state(n, seed).iter().copied().collect(),
    };
    let config = WmsrConfig {
        f: scenario.f,
        steps: scenario.steps,
        tol: scenario.tol,
        seed,
    };
    let adversaries = scenario
        .adversaries
        .iter()
        .enumerate()
        .map(|(i, entry)| entry.decode(i))
        .collect::<CliResult<Vec<_>>>()?;
    let trace = run_wmsr(&graph, &x0, &adversaries, config)?;

    let mut canonical = serde_json::to_value(&scenario).expect("scenario serializes");
    canonical["adversaries"] = json!(adversaries);
    canonical["graph"] = json!(GraphFile::from(&graph));
    canonical["seed"] = json!(seed);
    let mut run = Run::new("consensus", canonical, Some(seed), common);

    let final_spread = trace.spread(trace.values.len() - 1);
    let violations = trace.safety_violations();
    match run.format() {
        Format::Csv => {
            let mut csv = Csv::new("step,vehicle,value,is_adversary");
            for (step, values) in trace.values.iter().enumerate() {
                for (vehicle, value) in values.iter().enumerate() {
                    csv.row(&[
                        step.to_string(),
                        vehicle.to_string(),
                        float_field(*value),
                        trace.is_adversary(vehicle).to_string(),
                    ]);
                }
            }
            run.write(None, "csv", &csv.finish())?;
        }
        Format::Json => {
            let output = ConsensusOutput {
                normal: trace.normal.clone(),
                adversarial: trace.adversarial.clone(),
                f_local: trace.f_local,
                converged_at: trace.converged_at,
                final_spread,
                safety_violations: violations.clone(),
                values: trace.values.clone(),
            };
            run.write_json(None, &output)?;
        }
    }
    run.finish()?;

    println!(
        "f-local {}; converged at {}; final spread {final_spread:e}; safety violations {}",
        trace.f_local,
        trace
            .converged_at
            .map_or("never".to_string(), |s| format!("step {s}")),
        violations.len()
    );
    Ok(())
}
