use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use treebag::graph::{complete_graph, cycle_graph, parse_edge_list, WeightedGraph};

use crate::args::{Experiment, Format, Output};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Verification(String),
    SelfCheck(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
            Failure::Verification(_) => 3,
            Failure::SelfCheck(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Io(msg) => write!(f, "i/o error: {msg}"),
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
            Failure::SelfCheck(msg) => write!(f, "self-check failed: {msg}"),
        }
    }
}

pub fn usage(err: impl std::fmt::Display) -> Failure {
    Failure::Usage(err.to_string())
}

/// The fully resolved parameters of a run, embedded in every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExperimentConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_grid: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub verify: bool,
    pub self_check: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    result: &'a T,
}

pub fn json<T: Serialize>(config: &ExperimentConfig, result: &T) -> String {
    let mut text = serde_json::to_string_pretty(&Envelope { config, result }).expect("reports serialize");
    text.push('\n');
    text
}

/// CSV preceded by a `#` line holding the config as JSON.
pub fn csv(config: &ExperimentConfig, header: &str, rows: &[String]) -> String {
    let mut text = format!("# {}\n{header}\n", serde_json::to_string(config).expect("config serializes"));
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    text
}

pub fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.output {
        Some(path) => write_file(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// `K2`, `K<k>`, `cycle-<k>` or an edge-list file.
pub fn fiber(spec: &str) -> Result<WeightedGraph<f64>, Failure> {
    if let Some(k) = spec.strip_prefix('K').and_then(|k| k.parse::<usize>().ok()) {
        if k < 2 {
            return Err(Failure::Usage(format!("K{k} needs at least two vertices")));
        }
        return Ok(complete_graph(k));
    }
    if let Some(k) = spec.strip_prefix("cycle-").and_then(|k| k.parse::<usize>().ok()) {
        if k < 3 {
            return Err(Failure::Usage(format!("cycle-{k} needs at least three vertices")));
        }
        return Ok(cycle_graph(k));
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("fiber {spec:?}: {e}")))?;
    parse_edge_list(&text).map_err(usage)
}
