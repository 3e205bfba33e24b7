//! JSON model files.
//!
//! ```json
//! {
//!   "label": "two-server",
//!   "service_times": [0.5, 1.0],
//!   "think_time": 0.0,
//!   "transactions": 1,
//!   "host_index": 2
//! }
//! ```
//!
//! Only `service_times` is required. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ServiceProfile, WorkloadSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    label: String,
    service_times: Option<Vec<f64>>,
    #[serde(default)]
    think_time: f64,
    #[serde(default = "one")]
    transactions: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    host_index: Option<usize>,
}

fn one() -> u64 {
    1
}

/// A validated model: the cycle, its workload, and the host position.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub label: String,
    pub profile: ServiceProfile,
    pub workload: WorkloadSpec,
    /// 1-based host position; `K` unless the file says otherwise.
    pub host_index: usize,
}

impl Model {
    pub fn new(label: impl Into<String>, profile: ServiceProfile, workload: WorkloadSpec) -> Model {
        let host_index = profile.len();
        Model {
            label: label.into(),
            profile,
            workload,
            host_index,
        }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| Error::ParseError {
        line: e.line(),
        message: e.to_string(),
    })?;
    let times = raw
        .service_times
        .ok_or(Error::MissingField("service_times"))?;
    let profile = ServiceProfile::new(times)?;
    let workload = WorkloadSpec::new(None, None, raw.think_time, raw.transactions)?;
    let host_index = raw.host_index.unwrap_or(profile.len());
    profile.check_index(host_index)?;
    Ok(Model {
        label: raw.label,
        profile,
        workload,
        host_index,
    })
}

/// Serializes a model in the format [`parse_model`] reads.
pub fn emit_model(model: &Model) -> String {
    let raw = RawModel {
        label: model.label.clone(),
        service_times: Some(model.profile.times().to_vec()),
        think_time: model.workload.think_time,
        transactions: model.workload.transactions,
        host_index: (model.host_index != model.profile.len()).then_some(model.host_index),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("model serializes");
    out.push('\n');
    out
}

const BUNDLED: &[(&str, &str)] = &[
    ("table1", include_str!("../models/table1.json")),
    (
        "table1-swapped",
        include_str!("../models/table1-swapped.json"),
    ),
    ("two-server", include_str!("../models/two-server.json")),
    (
        "single-server",
        include_str!("../models/single-server.json"),
    ),
];

/// Names accepted by [`bundled`].
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Source text of a bundled model. `single` and `two` are accepted as short names.
pub fn bundled(name: &str) -> Option<&'static str> {
    let name = match name {
        "single" => "single-server",
        "two" => "two-server",
        other => other,
    };
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Loads a bundled model by name, or else reads `source` as a file path.
pub fn load_model(source: &str) -> Result<Model> {
    if let Some(text) = bundled(source) {
        return parse_model(text);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}
