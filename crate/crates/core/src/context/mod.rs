//! Environment model and context-awareness checks.
//!
//! An environment is described by variables; each variable has an
//! evaluation vector holding its value at successive global steps. The set
//! of all vectors is `C`; a declared subset `C_A` is the system's context.
//! Vectors enter the network through input-tape bindings and may be affected
//! by the system through output-port bindings.
//!
//! A system is context-aware when every evaluation of every vector in `C_A`
//! is read in full by the machine it is bound to and that machine emits
//! something at or after finishing the read. It is effectively
//! context-aware for a subset `C_A' ⊂ C_A` when its sink output with only
//! `C_A'` injected stays similar to its output with all of `C_A`.

mod awareness;
mod effective;
mod encode;
mod similarity;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::awareness::{check_awareness, AwarenessReport, VectorReport, VectorStatus};
pub use self::effective::{check_effective, run_trace, EffectiveConfig, EffectiveError, EffectivenessReport, TraceRunError};
pub use self::encode::{encode_trace, prepare_network, EncodeError, Encoding, DEFAULT_DELIMITER};
pub use self::similarity::{EditSimilarity, StreamSimilarity};

use crate::network::{Network, PortRef, TapeRef};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextVariable {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

/// Time series of one variable: `(global step, value)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationVector {
    pub var: String,
    pub evals: Vec<(u64, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextTrace {
    #[serde(default)]
    pub variables: Vec<ContextVariable>,
    pub vectors: Vec<EvaluationVector>,
    pub c_a: Vec<String>,
    #[serde(default)]
    pub bindings_in: BTreeMap<String, TapeRef>,
    #[serde(default)]
    pub bindings_out: BTreeMap<PortRef, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("duplicate variable id {0:?}")]
    DuplicateVariable(String),
    #[error("vector for undeclared variable {0:?}")]
    UndeclaredVariable(String),
    #[error("variable {0:?} has more than one vector")]
    DuplicateVector(String),
    #[error("vector {vector:?}: evaluation times must be strictly increasing")]
    UnorderedEvaluations { vector: String },
    #[error("vector {vector:?}: empty value at step {time}")]
    EmptyValue { vector: String, time: u64 },
    #[error("context set names {0:?}, which has no vector")]
    UnboundVector(String),
    #[error("binding for unknown vector {0:?}")]
    UnknownBinding(String),
    #[error("vector {vector:?} is bound to missing endpoint {endpoint}")]
    MissingEndpoint { vector: String, endpoint: String },
}

impl ContextTrace {
    pub fn vector(&self, id: &str) -> Option<&EvaluationVector> {
        self.vectors.iter().find(|v| v.var == id)
    }

    /// Checks the trace on its own and, if given, against a network.
    pub fn validate(&self, network: Option<&Network>) -> Result<(), TraceError> {
        let mut declared = BTreeSet::new();
        for v in &self.variables {
            if !declared.insert(v.id.as_str()) {
                return Err(TraceError::DuplicateVariable(v.id.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for vector in &self.vectors {
            if !self.variables.is_empty() && !declared.contains(vector.var.as_str()) {
                return Err(TraceError::UndeclaredVariable(vector.var.clone()));
            }
            if !seen.insert(vector.var.as_str()) {
                return Err(TraceError::DuplicateVector(vector.var.clone()));
            }
            if vector.evals.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(TraceError::UnorderedEvaluations { vector: vector.var.clone() });
            }
            if let Some((time, _)) = vector.evals.iter().find(|(_, value)| value.is_empty()) {
                return Err(TraceError::EmptyValue { vector: vector.var.clone(), time: *time });
            }
        }
        if let Some(id) = self.c_a.iter().find(|id| !seen.contains(id.as_str())) {
            return Err(TraceError::UnboundVector(id.clone()));
        }
        let bound_ids = self.bindings_in.keys().chain(self.bindings_out.values());
        if let Some(id) = bound_ids.into_iter().find(|id| !seen.contains(id.as_str())) {
            return Err(TraceError::UnknownBinding(id.clone()));
        }
        if let Some(network) = network {
            for (vector, tape) in &self.bindings_in {
                if network.machines.get(&tape.machine).is_none_or(|m| tape.tape >= m.num_inputs) {
                    return Err(TraceError::MissingEndpoint { vector: vector.clone(), endpoint: tape.to_string() });
                }
            }
            for (port, vector) in &self.bindings_out {
                if network.machines.get(&port.machine).is_none_or(|m| port.port >= m.num_outputs) {
                    return Err(TraceError::MissingEndpoint { vector: vector.clone(), endpoint: port.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn context_set(&self) -> BTreeSet<String> {
        self.c_a.iter().cloned().collect()
    }
}
