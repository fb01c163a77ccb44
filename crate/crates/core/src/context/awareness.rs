use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{ContextTrace, TraceError};
use crate::network::{Network, PortRef, TapeRef};
use crate::scheduler::{EventKind, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorStatus {
    ConsumedAndProduced,
    ConsumedNoOutput,
    Unconsumed,
}

impl fmt::Display for VectorStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorStatus::ConsumedAndProduced => "consumed-and-produced",
            VectorStatus::ConsumedNoOutput => "consumed-no-output",
            VectorStatus::Unconsumed => "unconsumed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorReport {
    pub vector: String,
    pub status: VectorStatus,
    pub bound_to: Option<TapeRef>,
    pub evaluations: usize,
    /// Evaluations read in full by the bound machine.
    pub consumed: usize,
    /// Evaluations followed (at or after the completing read) by an emission.
    pub answered: usize,
    /// Whether the declared output bindings of this vector saw any symbol;
    /// `None` when the vector has no output binding.
    pub outbound_observed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwarenessReport {
    pub aware: bool,
    pub vacuous: bool,
    pub vectors: Vec<VectorReport>,
}

impl AwarenessReport {
    pub fn status_of(&self, vector: &str) -> Option<VectorStatus> {
        self.vectors.iter().find(|v| v.vector == vector).map(|v| v.status)
    }

    pub fn to_table(&self) -> String {
        let bound: Vec<String> =
            self.vectors.iter().map(|v| v.bound_to.as_ref().map_or("-".to_string(), |t| t.to_string())).collect();
        let width = self.vectors.iter().map(|v| v.vector.len()).chain(["vector".len()]).max().unwrap_or(0);
        let bound_width = bound.iter().map(String::len).chain(["bound to".len()]).max().unwrap_or(0);
        let mut out = format!("{:<width$}  {:<21}  {:<bound_width$}  consumed  answered\n", "vector", "status", "bound to");
        for (v, bound) in self.vectors.iter().zip(&bound) {
            let consumed = format!("{}/{}", v.consumed, v.evaluations);
            let answered = format!("{}/{}", v.answered, v.evaluations);
            out.push_str(&format!(
                "{:<width$}  {:<21}  {:<bound_width$}  {consumed:>8}  {answered:>8}\n",
                v.vector,
                v.status.to_string(),
                bound
            ));
        }
        let verdict = match (self.aware, self.vacuous) {
            (_, true) => "not context-aware (empty context set)",
            (true, false) => "context-aware",
            (false, false) => "not context-aware",
        };
        out.push_str(&format!("verdict: {verdict}\n"));
        out
    }
}

/// Checks the context-awareness definition on a finished run.
///
/// The run must have been produced from the network prepared for `trace`
/// with the schedules of [`super::encode_trace`]. An evaluation counts as
/// accepted once the reader head of its bound tape has moved past all its
/// symbols including the delimiter; it counts as answered when the bound
/// machine emits at least one symbol in that transition or a later one.
/// Vectors of the context set without an input binding are unconsumed.
pub fn check_awareness(network: &Network, run: &RunResult, trace: &ContextTrace) -> Result<AwarenessReport, TraceError> {
    trace.validate(Some(network))?;
    let mut vectors = Vec::with_capacity(trace.c_a.len());
    for id in &trace.c_a {
        let vector = trace.vector(id).expect("validated context set");
        let outbound_ports: Vec<&PortRef> =
            trace.bindings_out.iter().filter(|(_, v)| *v == id).map(|(p, _)| p).collect();
        let outbound_observed = (!outbound_ports.is_empty()).then(|| {
            run.log.events.iter().any(|e| match &e.kind {
                EventKind::Route { machine, port, .. } => {
                    outbound_ports.iter().any(|p| &p.machine == machine && p.port == *port)
                }
                _ => false,
            })
        });

        let Some(tape) = trace.bindings_in.get(id) else {
            vectors.push(VectorReport {
                vector: id.clone(),
                status: VectorStatus::Unconsumed,
                bound_to: None,
                evaluations: vector.evals.len(),
                consumed: 0,
                answered: 0,
                outbound_observed,
            });
            continue;
        };

        // Reader position just past each evaluation's delimiter.
        let mut ends = Vec::with_capacity(vector.evals.len());
        let mut position = 0;
        for (_, value) in &vector.evals {
            position += value.chars().count() + 1;
            ends.push(position);
        }

        // Walk the bound machine's transitions in order.
        let mut reads = 0;
        let mut completed_at: Vec<Option<usize>> = vec![None; ends.len()];
        let mut emission_events: Vec<usize> = Vec::new();
        let mut transition_index = 0;
        for event in &run.log.events {
            let EventKind::Transition { machine, consumed, emitted, .. } = &event.kind else { continue };
            if machine != &tape.machine {
                continue;
            }
            reads += consumed.iter().filter(|(k, _)| *k == tape.tape).count();
            for (slot, end) in completed_at.iter_mut().zip(&ends) {
                if slot.is_none() && reads >= *end {
                    *slot = Some(transition_index);
                }
            }
            if !emitted.is_empty() {
                emission_events.push(transition_index);
            }
            transition_index += 1;
        }

        let consumed = completed_at.iter().filter(|c| c.is_some()).count();
        let answered = completed_at
            .iter()
            .flatten()
            .filter(|&&at| emission_events.last().is_some_and(|&last| last >= at))
            .count();
        let status = if consumed < ends.len() {
            VectorStatus::Unconsumed
        } else if answered < ends.len() {
            VectorStatus::ConsumedNoOutput
        } else {
            VectorStatus::ConsumedAndProduced
        };
        vectors.push(VectorReport {
            vector: id.clone(),
            status,
            bound_to: Some(tape.clone()),
            evaluations: ends.len(),
            consumed,
            answered,
            outbound_observed,
        });
    }

    let vacuous = trace.c_a.is_empty();
    let aware = !vacuous && vectors.iter().all(|v| v.status == VectorStatus::ConsumedAndProduced);
    Ok(AwarenessReport { aware, vacuous, vectors })
}
