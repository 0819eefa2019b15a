//! Scenario files: JSON parsing with JSON-pointer error paths and graph
//! references.

use std::fs;
use std::path::{Path, PathBuf};

use platoon::graph::GraphFile;
use platoon::{build_knn_platoon, Graph, PlatoonSpec};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use serde_path_to_error::Segment;

use crate::{CliError, CliResult};

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    path.iter()
        .map(|segment| match segment {
            Segment::Seq { index } => format!("/{index}"),
            Segment::Map { key } => format!("/{}", escape(key)),
            Segment::Enum { variant } => format!("/{}", escape(variant)),
            Segment::Unknown => "/?".to_string(),
        })
        .collect()
}

fn schema_error<E: std::fmt::Display>(
    prefix: &str,
    err: serde_path_to_error::Error<E>,
) -> CliError {
    let mut at = format!("{prefix}{}", pointer(err.path()));
    if at.is_empty() {
        at.push('/');
    }
    let mut detail = err.inner().to_string();
    // positions inside a re-encoded fragment mean nothing to the user
    if !prefix.is_empty() {
        if let Some((head, _)) = detail.rsplit_once(" at line ") {
            detail.truncate(head.len());
        }
    }
    CliError::Validation(format!("schema error at {at}: {detail}"))
}

/// Parses `text` as `T`, reporting failures with the JSON pointer of the
/// offending value.
pub fn parse_text<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    parse_text_at(text, "")
}

/// [`parse_text`] for a fragment that sits at `prefix` in the scenario.
pub fn parse_text_at<T: DeserializeOwned>(text: &str, prefix: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| schema_error(prefix, e))
}

/// Parses an already-decoded value found at `prefix`.
pub fn parse_value<T: DeserializeOwned>(value: Value, prefix: &str) -> CliResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| schema_error(prefix, e))
}

/// A scenario file's text and the directory relative paths resolve against.
pub struct ScenarioFile {
    pub text: String,
    pub dir: PathBuf,
}

pub fn read_scenario(path: &Path) -> CliResult<ScenarioFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(ScenarioFile { text, dir })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatoonRef {
    platoon: PlatoonSpec,
}

/// Resolves the `graph` field: a path to a graph file, an inline
/// `{"n", "edges"}` object, or `{"platoon": {"n", "k"}}`.
pub fn resolve_graph(value: &Value, dir: &Path) -> CliResult<Graph> {
    match value {
        Value::String(path) => {
            let full = dir.join(path);
            let text = fs::read_to_string(&full)
                .map_err(|e| CliError::Validation(format!("cannot read graph {}: {e}", full.display())))?;
            Graph::from_json(&text)
                .map_err(|e| CliError::Validation(format!("graph {}: {e}", full.display())))
        }
        Value::Object(map) if map.contains_key("platoon") => {
            let r: PlatoonRef = parse_value(value.clone(), "/graph")?;
            Ok(build_knn_platoon(r.platoon)?)
        }
        Value::Object(_) => {
            let file: GraphFile = parse_value(value.clone(), "/graph")?;
            Ok(file.into_graph()?)
        }
        _ => Err(CliError::Validation(
            "schema error at /graph: expected a path, {\"n\", \"edges\"} or {\"platoon\": {\"n\", \"k\"}}"
                .into(),
        )),
    }
}

/// The seed from the command line, else the scenario's; one is required.
pub fn effective_seed(cli: Option<u64>, scenario: Option<u64>) -> CliResult<u64> {
    cli.or(scenario).ok_or_else(|| {
        CliError::Validation(
            "a seed is required: set \"seed\" in the scenario or pass --seed".into(),
        )
    })
}
