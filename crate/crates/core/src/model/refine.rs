use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_model, Endpoint, ModelReport, SystemModel};

/// Coarse procedure label to the fine procedure labels refining it.
pub type Mapping = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub from: Endpoint,
    pub to: Endpoint,
}

impl fmt::Display for LabeledEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} → {}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("{which} model has errors:\n{report}")]
    InvalidModel { which: &'static str, report: ModelReport },
    #[error("mapping does not cover coarse procedures {0:?}")]
    IncompleteMapping(Vec<String>),
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementReport {
    /// Coarse edges with at least one fine edge between their groups.
    pub realized: Vec<LabeledEdge>,
    pub unrealized: Vec<LabeledEdge>,
    /// Fine edges between groups whose coarse procedures are not connected
    /// that way.
    pub extraneous: Vec<LabeledEdge>,
    /// Fine edges touching a context entity the coarse model lacks.
    pub extraneous_context: Vec<LabeledEdge>,
    /// Fine procedures no coarse procedure maps to; their edges are ignored.
    pub unmapped_fine: Vec<String>,
}

impl RefinementReport {
    pub fn is_valid(&self) -> bool {
        self.unrealized.is_empty() && self.extraneous.is_empty() && self.extraneous_context.is_empty()
    }
}

impl fmt::Display for RefinementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let total = self.realized.len() + self.unrealized.len();
        writeln!(f, "realized {}/{} coarse edges", self.realized.len(), total)?;
        for e in &self.unrealized {
            writeln!(f, "unrealized: {e}")?;
        }
        for e in &self.extraneous {
            writeln!(f, "extraneous: {e}")?;
        }
        for e in &self.extraneous_context {
            writeln!(f, "extraneous context edge: {e}")?;
        }
        for p in &self.unmapped_fine {
            writeln!(f, "unmapped fine procedure: [{p}]")?;
        }
        writeln!(f, "verdict: {}", if self.is_valid() { "valid refinement" } else { "not a valid refinement" })
    }
}

fn edges(m: &SystemModel) -> BTreeSet<LabeledEdge> {
    m.connections
        .iter()
        .flat_map(|c| c.directed())
        .map(|(a, b)| LabeledEdge { from: a.clone(), to: b.clone() })
        .collect()
}

/// Checks that `fine` refines `coarse` when each coarse procedure is
/// replaced by its group of fine procedures. Context entities are matched
/// by label.
pub fn refine_check(coarse: &SystemModel, fine: &SystemModel, mapping: &Mapping) -> Result<RefinementReport, RefineError> {
    for (which, m) in [("coarse", coarse), ("fine", fine)] {
        let report = validate_model(m);
        if report.has_errors() {
            return Err(RefineError::InvalidModel { which, report });
        }
    }

    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for (coarse_label, group) in mapping {
        if coarse.procedure(coarse_label).is_none() {
            return Err(RefineError::InvalidMapping(format!("[{coarse_label}] is not a coarse procedure")));
        }
        for fine_label in group {
            if fine.procedure(fine_label).is_none() {
                return Err(RefineError::InvalidMapping(format!("[{fine_label}] is not a fine procedure")));
            }
            if let Some(previous) = owner.insert(fine_label, coarse_label) {
                return Err(RefineError::InvalidMapping(format!(
                    "[{fine_label}] is mapped from both [{previous}] and [{coarse_label}]"
                )));
            }
        }
    }
    let missing: Vec<String> =
        coarse.procedures.iter().filter(|p| !mapping.contains_key(&p.label)).map(|p| p.label.clone()).collect();
    if !missing.is_empty() {
        return Err(RefineError::IncompleteMapping(missing));
    }

    let coarse_edges = edges(coarse);
    let mut hit = BTreeSet::new();
    let mut extraneous = Vec::new();
    let mut extraneous_context = Vec::new();
    for edge in edges(fine) {
        let image = |e: &Endpoint| match e {
            Endpoint::Procedure(l) => owner.get(l.as_str()).map(|c| Endpoint::Procedure(c.to_string())),
            Endpoint::Context(l) => Some(Endpoint::Context(l.clone())),
        };
        let (Some(from), Some(to)) = (image(&edge.from), image(&edge.to)) else { continue };
        let foreign = |e: &Endpoint| matches!(e, Endpoint::Context(l) if coarse.context(l).is_none());
        if foreign(&from) || foreign(&to) {
            extraneous_context.push(edge);
            continue;
        }
        if from == to {
            continue;
        }
        let image = LabeledEdge { from, to };
        if coarse_edges.contains(&image) {
            hit.insert(image);
        } else {
            extraneous.push(edge);
        }
    }

    let (realized, unrealized) = coarse_edges.into_iter().partition(|e| hit.contains(e));
    let unmapped_fine =
        fine.procedures.iter().filter(|p| !owner.contains_key(p.label.as_str())).map(|p| p.label.clone()).collect();
    Ok(RefinementReport { realized, unrealized, extraneous, extraneous_context, unmapped_fine })
}
