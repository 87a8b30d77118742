//! File formats. Structured outputs are JSON objects carrying a
//! `format_version` and a `kind`; time series are CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::graph::{GraphState, GridSpec};
use crate::stability::StabilityReport;
use crate::variational::ThresholdRow;

pub const FORMAT_VERSION: u32 = 1;

/// Serialized layout of a [`GraphState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    #[serde(rename = "N")]
    pub edges: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "M")]
    pub points: usize,
    pub vertex_re: f64,
    pub vertex_im: f64,
    /// `samples[i][j] = [re, im]` of edge `i` at `x = (j + 1) h`.
    pub samples: Vec<Vec<[f64; 2]>>,
}

impl From<GraphState> for StateRecord {
    fn from(u: GraphState) -> Self {
        let g = u.grid();
        Self {
            edges: g.edges(),
            length: g.length(),
            points: g.points(),
            vertex_re: u.vertex().re,
            vertex_im: u.vertex().im,
            samples: u.edges().map(|e| e.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }
}

impl TryFrom<StateRecord> for GraphState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        let grid = GridSpec::new(r.edges, r.length, r.points)?;
        let samples = r
            .samples
            .into_iter()
            .map(|e| e.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        GraphState::from_parts(grid, Complex64::new(r.vertex_re, r.vertex_im), samples)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Wraps `value` (which must serialize to an object) with version and kind.
pub fn to_document<T: Serialize>(kind: &str, value: &T) -> Result<Value> {
    let mut map = Map::new();
    map.insert("format_version".into(), Value::from(FORMAT_VERSION));
    map.insert("kind".into(), Value::from(kind));
    match serde_json::to_value(value)? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    Ok(Value::Object(map))
}

pub fn write_document<T: Serialize>(path: &Path, kind: &str, value: &T) -> Result<()> {
    let doc = to_document(kind, value)?;
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// A parsed document: its kind and the remaining payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub path: PathBuf,
    pub kind: String,
    pub body: Value,
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format_err(path, format!("invalid JSON: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(format_err(path, "expected a JSON object"));
    };
    let version = map
        .remove("format_version")
        .ok_or_else(|| format_err(path, "missing format_version"))?;
    if version.as_u64() != Some(u64::from(FORMAT_VERSION)) {
        return Err(format_err(
            path,
            format!("unsupported format_version {version} (this build reads version {FORMAT_VERSION})"),
        ));
    }
    let kind = match map.remove("kind") {
        Some(Value::String(k)) => k,
        _ => return Err(format_err(path, "missing kind")),
    };
    let body = match map.remove("data") {
        Some(data) if map.is_empty() => data,
        Some(data) => {
            map.insert("data".into(), data);
            Value::Object(map)
        }
        None => Value::Object(map),
    };
    Ok(Document {
        path: path.to_path_buf(),
        kind,
        body,
    })
}

/// Reads a document of the expected kind into `T`.
pub fn read_typed<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let doc = read_document(path)?;
    if doc.kind != kind {
        return Err(format_err(
            path,
            format!("expected a {kind} document, found {}", doc.kind),
        ));
    }
    serde_json::from_value(doc.body).map_err(|e| format_err(path, e.to_string()))
}

pub const STATE_KIND: &str = "graph_state";

pub fn save_state(path: &Path, u: &GraphState) -> Result<()> {
    write_document(path, STATE_KIND, u)
}

pub fn load_state(path: &Path) -> Result<GraphState> {
    read_typed(path, STATE_KIND)
}

/// Columns `edge,x,re,im`; the vertex appears as `x = 0` on every edge.
pub fn state_csv(u: &GraphState) -> String {
    let g = u.grid();
    let mut out = String::from("edge,x,re,im\n");
    for (i, edge) in u.edges().enumerate() {
        let _ = writeln!(out, "{i},0,{},{}", u.vertex().re, u.vertex().im);
        for (j, z) in edge.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{},{}", g.position(j), z.re, z.im);
        }
    }
    out
}

/// Columns `t,mass,E_m,mass_drift,energy_drift`, one row per step.
pub fn conservation_csv(t: &Trajectory) -> String {
    let mut out = String::from("t,mass,E_m,mass_drift,energy_drift\n");
    for k in 0..t.step_times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t.step_times[k], t.mass[k], t.energy[k], t.mass_drift[k], t.energy_drift[k]
        );
    }
    out
}

pub fn stability_csv(r: &StabilityReport) -> String {
    let mut out = String::from("t,dist_l2,dist_w\n");
    for s in &r.samples {
        let _ = writeln!(out, "{},{},{}", s.t, s.dist_l2, s.dist_w);
    }
    out
}

pub fn threshold_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from("gamma,action_phi0,d_kirchhoff,difference\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.gamma, r.action_phi0, r.d_kirchhoff, r.difference);
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}
