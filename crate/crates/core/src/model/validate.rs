use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Endpoint, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "finding", rename_all = "kebab-case")]
pub enum FindingKind {
    /// Connection `statement` (0-based) names an endpoint that is not declared.
    UndeclaredLabel { statement: usize, endpoint: Endpoint },
    DuplicateDeclaration { what: String },
    ConMismatch { statement: usize },
    ContextToContext { statement: usize },
    UnconnectedProcedure { label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: FindingKind,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{severity}: ")?;
        match &self.kind {
            FindingKind::UndeclaredLabel { statement, endpoint } => {
                write!(f, "undeclared label {endpoint} in connection {}", statement + 1)
            }
            FindingKind::DuplicateDeclaration { what } => write!(f, "duplicate declaration of {what}"),
            FindingKind::ConMismatch { statement } => {
                write!(f, "con-clause/arrow mismatch in connection {}", statement + 1)
            }
            FindingKind::ContextToContext { statement } => {
                write!(f, "connection {} joins two context entities", statement + 1)
            }
            FindingKind::UnconnectedProcedure { label } => write!(f, "procedure [{label}] is never connected"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReport {
    pub findings: Vec<Finding>,
}

impl ModelReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }
}

impl fmt::Display for ModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            return writeln!(f, "no findings");
        }
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}

fn duplicates<'a>(items: impl Iterator<Item = String> + 'a) -> Vec<String> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for item in items {
        *counts.entry(item).or_default() += 1;
    }
    counts.into_iter().filter(|(_, n)| *n > 1).map(|(k, _)| k).collect()
}

pub fn validate_model(m: &SystemModel) -> ModelReport {
    let mut findings = Vec::new();
    let mut error = |kind| findings.push(Finding { severity: Severity::Error, kind });

    let dups = duplicates(m.procedures.iter().map(|p| format!("procedure id {}", p.id)))
        .into_iter()
        .chain(duplicates(m.procedures.iter().map(|p| format!("[{}]", p.label))))
        .chain(duplicates(m.contexts.iter().map(|c| format!("context id {}", c.id))))
        .chain(duplicates(m.contexts.iter().map(|c| format!("({})", c.label))));
    for what in dups {
        error(FindingKind::DuplicateDeclaration { what });
    }

    for (statement, c) in m.connections.iter().enumerate() {
        for endpoint in [&c.left, &c.right] {
            if !m.declares(endpoint) {
                error(FindingKind::UndeclaredLabel { statement, endpoint: endpoint.clone() });
            }
        }
        if c.left.is_context() && c.right.is_context() {
            error(FindingKind::ContextToContext { statement });
        }
        if let Some(terms) = &c.con {
            let written: BTreeSet<_> = terms.iter().collect();
            let implied = c.implied_con();
            if written != implied.iter().collect() {
                error(FindingKind::ConMismatch { statement });
            }
        }
    }

    let connected: BTreeSet<&str> = m
        .connections
        .iter()
        .flat_map(|c| [&c.left, &c.right])
        .filter_map(|e| match e {
            Endpoint::Procedure(l) => Some(l.as_str()),
            Endpoint::Context(_) => None,
        })
        .collect();
    for p in &m.procedures {
        if !connected.contains(p.label.as_str()) {
            findings.push(Finding {
                severity: Severity::Warning,
                kind: FindingKind::UnconnectedProcedure { label: p.label.clone() },
            });
        }
    }
    ModelReport { findings }
}
