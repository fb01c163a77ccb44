use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::AwarenessReport;
use crate::model::Graph;
use crate::scheduler::RunResult;

pub const TREE_VERSION: u32 = 1;

/// Types with a committed JSON schema under `schemas/`.
pub trait Exportable: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;
}

impl Exportable for Graph {
    const SCHEMA: &'static str = "ntm.graph";
}

impl Exportable for RunResult {
    const SCHEMA: &'static str = "ntm.run-result";
}

impl Exportable for AwarenessReport {
    const SCHEMA: &'static str = "ntm.awareness-report";
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: &'static str,
    version: u32,
    data: &'a T,
}

#[derive(Deserialize)]
struct OwnedEnvelope {
    schema: String,
    version: u32,
    data: serde_json::Value,
}

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("malformed tree: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected schema {expected:?}, found {found:?}")]
    SchemaMismatch { expected: &'static str, found: String },
    #[error("unsupported tree version {0}")]
    UnsupportedVersion(u32),
}

/// Pretty-printed JSON `{"schema", "version", "data"}`, newline-terminated.
pub fn to_tree<T: Exportable>(value: &T) -> String {
    let envelope = Envelope { schema: T::SCHEMA, version: TREE_VERSION, data: value };
    let mut out = serde_json::to_string_pretty(&envelope).expect("exportable types serialize");
    out.push('\n');
    out
}

pub fn from_tree<T: Exportable>(text: &str) -> Result<T, TreeError> {
    let envelope: OwnedEnvelope = serde_json::from_str(text)?;
    if envelope.schema != T::SCHEMA {
        return Err(TreeError::SchemaMismatch { expected: T::SCHEMA, found: envelope.schema });
    }
    if envelope.version != TREE_VERSION {
        return Err(TreeError::UnsupportedVersion(envelope.version));
    }
    Ok(serde_json::from_value(envelope.data)?)
}
