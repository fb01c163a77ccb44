use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_model, Endpoint, ModelReport, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Procedure,
    Context,
}

/// A procedure node has its numeric id, a context node its letter id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("model has errors:\n{0}")]
    InvalidModel(ModelReport),
}

/// Builds the directed graph of a model. `↔` statements give two edges and
/// repeated statements collapse. Declared entities that take part in no
/// connection are left out unless `include_isolated` is set.
pub fn build_graph(model: &SystemModel, include_isolated: bool) -> Result<Graph, GraphError> {
    let report = validate_model(model);
    if report.has_errors() {
        return Err(GraphError::InvalidModel(report));
    }

    let mut procedures: Vec<_> = model.procedures.iter().collect();
    procedures.sort_by_key(|p| p.id);
    let mut contexts: Vec<_> = model.contexts.iter().collect();
    contexts.sort_by(|a, b| (a.id.len(), &a.id).cmp(&(b.id.len(), &b.id)));

    let mut all: Vec<(Endpoint, Node)> = procedures
        .into_iter()
        .map(|p| {
            (
                Endpoint::Procedure(p.label.clone()),
                Node { id: p.id.to_string(), kind: NodeKind::Procedure, label: p.label.clone() },
            )
        })
        .collect();
    all.extend(contexts.into_iter().map(|c| {
        (Endpoint::Context(c.label.clone()), Node { id: c.id.clone(), kind: NodeKind::Context, label: c.label.clone() })
    }));

    let index = |e: &Endpoint| all.iter().position(|(k, _)| k == e).expect("validated endpoint");
    let pairs: BTreeSet<(usize, usize)> = model
        .connections
        .iter()
        .flat_map(|c| c.directed())
        .map(|(a, b)| (index(a), index(b)))
        .collect();
    let used: BTreeSet<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();

    let edges = pairs.iter().map(|&(a, b)| Edge { from: all[a].1.id.clone(), to: all[b].1.id.clone() }).collect();
    let nodes = all
        .into_iter()
        .enumerate()
        .filter(|(i, _)| include_isolated || used.contains(i))
        .map(|(_, (_, node))| node)
        .collect();
    Ok(Graph { nodes, edges })
}
