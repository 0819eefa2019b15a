use std::path::PathBuf;

use clap::Args;
use platoon::connectivity::{analyze, AnalyzeOptions, ConnectivityReport, Measure, HARD_LIMIT};
use platoon::formation::float_field;
use platoon::graph::{load_graph, GraphFile};
use platoon::{build_knn_platoon, Graph, PlatoonSpec};
use serde_json::json;

use crate::output::{Csv, Run};
use crate::{CliError, CliResult, Common, Format};

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["platoon", "graph"])))]
pub struct AnalyzeArgs {
    /// Platoon `N,K`.
    #[arg(long, value_parser = parse_platoon)]
    platoon: Option<PlatoonSpec>,
    /// Graph file `{"n": .., "edges": [[i, j], ..]}`.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Require the exhaustive robustness value; refuse instead of falling
    /// back beyond the limit.
    #[arg(long)]
    robustness: bool,
    /// Require the exhaustive isoperimetric constant.
    #[arg(long)]
    iso: bool,
    /// Override both exhaustive limits (capped at 30).
    #[arg(long)]
    exhaustive_limit: Option<usize>,
}

fn parse_platoon(text: &str) -> Result<PlatoonSpec, String> {
    let (n, k) = text
        .split_once(',')
        .ok_or_else(|| format!("expected N,K, got {text:?}"))?;
    let n = n.trim().parse().map_err(|e| format!("bad N: {e}"))?;
    let k = k.trim().parse().map_err(|e| format!("bad K: {e}"))?;
    PlatoonSpec::new(n, k).map_err(|e| e.to_string())
}

fn measure_fields<T: Copy>(m: &Measure<T>, show: impl Fn(T) -> String) -> (String, String) {
    match m {
        Measure::Computed { value } => ("computed".into(), show(*value)),
        Measure::ClosedForm { value, .. } => ("closed-form".into(), show(*value)),
        Measure::Skipped { .. } => ("skipped".into(), String::new()),
    }
}

fn to_csv(report: &ConnectivityReport) -> String {
    let mut csv = Csv::new("measure,source,value");
    let plain = |name: &str, v: String| vec![name.to_string(), "computed".into(), v];
    csv.row(&plain("n", report.n.to_string()));
    csv.row(&plain("edges", report.edges.to_string()));
    csv.row(&plain("d_min", report.d_min.to_string()));
    csv.row(&plain("d_max", report.d_max.to_string()));
    for (name, m) in [
        ("kappa", &report.kappa),
        ("edge_conn", &report.edge_conn),
        ("robustness", &report.robustness),
    ] {
        let (source, value) = measure_fields(m, |v| v.to_string());
        csv.row(&[name.into(), source, value]);
    }
    let (source, value) = measure_fields(&report.iso, |v| v.exact.to_string());
    csv.row(&["iso".into(), source, value]);
    csv.row(&plain("lambda2", float_field(report.lambda2)));
    if let Some(b) = &report.lambda2_bounds {
        csv.row(&[
            "lambda2_lower".into(),
            "closed-form".into(),
            float_field(b.lower),
        ]);
        csv.row(&[
            "lambda2_upper".into(),
            "closed-form".into(),
            float_field(b.upper),
        ]);
    }
    csv.finish()
}

fn refusal_message(report: &ConnectivityReport, measure: &str, limit: usize) -> String {
    let fallback = match measure {
        "robustness" => report.robustness.value().map(|v| v.to_string()),
        _ => report.iso.value().map(|v| v.exact.to_string()),
    };
    let tail = match fallback {
        Some(v) => format!("closed-form value {v} (closed-form, not verified exhaustively)"),
        None => "no closed form is available for an arbitrary graph".into(),
    };
    format!(
        "exhaustive {measure} refused: n = {} exceeds limit {}; {tail}",
        report.n,
        limit.min(HARD_LIMIT)
    )
}

pub fn run(common: &Common, args: &AnalyzeArgs) -> CliResult<()> {
    let (graph, spec): (Graph, Option<PlatoonSpec>) = match (&args.platoon, &args.graph) {
        (Some(spec), _) => (build_knn_platoon(*spec)?, Some(*spec)),
        (None, Some(path)) => {
            let g = load_graph(path)
                .map_err(|e| CliError::Validation(format!("graph {}: {e}", path.display())))?;
            (g, None)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let mut options = AnalyzeOptions::default();
    if let Some(limit) = args.exhaustive_limit {
        options.robustness_limit = limit;
        options.iso_limit = limit;
    }

    // fallback values are always reported; refusal only decides the exit code
    let report = analyze(&graph, spec, options)?;
    let refused = if args.robustness && graph.n() > options.robustness_limit.min(HARD_LIMIT) {
        Some(refusal_message(
            &report,
            "robustness",
            options.robustness_limit,
        ))
    } else if args.iso && graph.n() > options.iso_limit.min(HARD_LIMIT) {
        Some(refusal_message(&report, "isoperimetric", options.iso_limit))
    } else {
        None
    };

    let config = json!({
        "graph": GraphFile::from(&graph),
        "platoon": spec,
        "require_robustness": args.robustness,
        "require_iso": args.iso,
        "robustness_limit": options.robustness_limit,
        "iso_limit": options.iso_limit,
    });
    let mut run = Run::new("analyze", config, None, common);
    match run.format() {
        Format::Json => run.write_json(None, &report)?,
        Format::Csv => run.write(None, "csv", &to_csv(&report))?,
    };
    run.finish()?;

    println!(
        "n={} kappa={} edge_conn={} robustness={} iso={} lambda2={}",
        report.n,
        show(&report.kappa, |v| v.to_string()),
        show(&report.edge_conn, |v| v.to_string()),
        show(&report.robustness, |v| v.to_string()),
        show(&report.iso, |v| v.exact.to_string()),
        report.lambda2
    );
    match refused {
        Some(message) => Err(CliError::Refused(message)),
        None => Ok(()),
    }
}

fn show<T: Copy>(m: &Measure<T>, f: impl Fn(T) -> String) -> String {
    match m {
        Measure::Computed { value } => f(*value),
        Measure::ClosedForm { value, .. } => format!("{} (closed-form)", f(*value)),
        Measure::Skipped { .. } => "skipped".into(),
    }
}
