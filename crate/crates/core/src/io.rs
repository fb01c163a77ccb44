//! Loading machine, network, trace, model and mapping files.
//!
//! A network file is JSON:
//!
//! ```json
//! {
//!   "machines": [
//!     "copy.json",
//!     {"file": "copy.json", "id": "copy2", "speed": 2},
//!     {"id": "inline", "states": ["q0", "qf"], "...": "..."}
//!   ],
//!   "connections": [{"from": "copy.0", "to": "copy2.0"}],
//!   "sources": [{"id": "in", "to": "copy.0", "schedule": [{"at": 0, "symbol": "a"}]}],
//!   "sinks": [{"id": "out", "from": "copy2.0"}]
//! }
//! ```
//!
//! Machine paths are relative to the network file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::context::ContextTrace;
use crate::machine::{MachineId, MachineSpec};
use crate::model::{self, Mapping, SystemModel};
use crate::network::{Connection, Injection, Network, Schedules, SinkBinding, SourceBinding, TapeRef};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Model { path: PathBuf, source: model::ParseError },
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Read { path: path.to_path_buf(), source })
}

fn json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|source| LoadError::Json { path: path.to_path_buf(), source })
}

pub fn load_machine(path: &Path) -> Result<MachineSpec, LoadError> {
    json(path, &read(path)?)
}

#[derive(Deserialize)]
struct MachineRef {
    file: PathBuf,
    id: Option<MachineId>,
    speed: Option<u32>,
}

#[derive(Deserialize)]
struct SourceEntry {
    id: String,
    to: TapeRef,
    #[serde(default)]
    schedule: Vec<Injection>,
}

#[derive(Deserialize)]
struct NetworkFile {
    machines: Vec<serde_json::Value>,
    #[serde(default)]
    connections: Vec<Connection>,
    #[serde(default)]
    sources: Vec<SourceEntry>,
    #[serde(default)]
    sinks: Vec<SinkBinding>,
}

/// Loads a network and the schedules of its sources. The network is not
/// validated beyond machine ids being unique.
pub fn load_network(path: &Path) -> Result<(Network, Schedules), LoadError> {
    let file: NetworkFile = json(path, &read(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let invalid = |message: String| LoadError::Invalid { path: path.to_path_buf(), message };

    let mut network = Network::new();
    for entry in file.machines {
        let spec = match entry {
            serde_json::Value::String(rel) => load_machine(&base.join(rel))?,
            serde_json::Value::Object(ref map) if map.contains_key("file") => {
                let r: MachineRef = serde_json::from_value(entry).map_err(|e| invalid(format!("machine reference: {e}")))?;
                let mut spec = load_machine(&base.join(&r.file))?;
                if let Some(id) = r.id {
                    spec.id = id;
                }
                if let Some(speed) = r.speed {
                    spec.speed = speed;
                }
                spec
            }
            other => serde_json::from_value(other).map_err(|e| invalid(format!("inline machine: {e}")))?,
        };
        let id = spec.id.clone();
        network.add_machine(spec).map_err(|_| invalid(format!("machine id {id} is used twice")))?;
    }
    network.connections = file.connections;
    network.sinks = file.sinks;
    let mut schedules = Schedules::new();
    for source in file.sources {
        if !source.schedule.is_empty() {
            schedules.insert(source.id.clone(), source.schedule);
        }
        network.sources.push(SourceBinding { id: source.id, to: source.to });
    }
    Ok((network, schedules))
}

pub fn load_trace(path: &Path) -> Result<ContextTrace, LoadError> {
    json(path, &read(path)?)
}

pub fn load_mapping(path: &Path) -> Result<Mapping, LoadError> {
    json(path, &read(path)?)
}

pub fn load_model(path: &Path) -> Result<SystemModel, LoadError> {
    model::parse(&read(path)?).map_err(|source| LoadError::Model { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::passthrough;

    fn temp_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("ntm-io-{name}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn machine_entries_in_all_forms() {
        let dir = temp_dir("forms");
        let copy = passthrough("copy", 1, 1, &["a"]);
        fs::write(dir.join("copy.json"), serde_json::to_string(&copy).unwrap()).unwrap();
        let inline = serde_json::to_value(passthrough("tail", 1, 0, &["a"])).unwrap();
        let net = serde_json::json!({
            "machines": ["copy.json", {"file": "copy.json", "id": "copy2", "speed": 3}, inline],
            "connections": [{"from": "copy.0", "to": "copy2.0"}],
            "sources": [{"id": "in", "to": "copy.0", "schedule": [{"at": 0, "symbol": "a"}, {"at": 0, "offset": 1, "symbol": "a"}]}],
            "sinks": [{"id": "out", "from": "copy2.0"}]
        });
        fs::write(dir.join("net.json"), net.to_string()).unwrap();

        let (network, schedules) = load_network(&dir.join("net.json")).unwrap();
        assert_eq!(network.machines.len(), 3);
        assert_eq!(network.machines[&MachineId::from("copy2")].speed, 3);
        assert_eq!(network.sources[0].to, TapeRef::new("copy", 0));
        assert_eq!(schedules["in"].len(), 2);
        assert_eq!(schedules["in"][1].offset, 1);
    }

    #[test]
    fn errors_name_the_file() {
        let dir = temp_dir("errors");
        let missing = dir.join("missing.json");
        let err = load_network(&missing).unwrap_err();
        assert!(err.to_string().contains("missing.json"));

        fs::write(dir.join("dup.json"), serde_json::to_string(&passthrough("m", 0, 1, &["a"])).unwrap()).unwrap();
        fs::write(dir.join("net.json"), r#"{"machines": ["dup.json", "dup.json"]}"#).unwrap();
        assert!(matches!(load_network(&dir.join("net.json")), Err(LoadError::Invalid { .. })));

        fs::write(dir.join("bad.json"), "{").unwrap();
        assert!(matches!(load_trace(&dir.join("bad.json")), Err(LoadError::Json { .. })));
    }
}
