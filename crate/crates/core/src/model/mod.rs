//! The textual system-modeling language.
//!
//! A document has up to five sections, each opened by a header word ending
//! in `.` at the start of a line:
//!
//! ```text
//! abstract. Free text describing the system.
//!
//! procedures.
//! 1 : [input]          // user input
//! 2 : [screen_display]
//!
//! context.
//! a : (location) // user or device location
//!
//! connections.
//! con(input, screen_display) : [input] → [screen_display]
//! [screen_display] ← (location)
//!
//! graph.
//! (figures, kept verbatim)
//! ```
//!
//! `//` starts a comment. A line holding only a comment belongs to the
//! declaration or statement above it. Arrows may be written in ASCII
//! (`->`, `<-`, `<->`) and `∧` as `/\` or `&`.

mod graph;
mod parse;
mod print;
mod refine;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use self::graph::{build_graph, Edge, Graph, GraphError, Node, NodeKind};
pub use self::parse::{parse, ParseError};
pub use self::refine::{refine_check, LabeledEdge, Mapping, RefineError, RefinementReport};
pub use self::validate::{validate_model, Finding, FindingKind, ModelReport, Severity};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemModel {
    pub abstract_text: String,
    pub procedures: Vec<Procedure>,
    pub contexts: Vec<ContextEntity>,
    pub connections: Vec<ConnectionStmt>,
    /// Raw content of the graph section, if the document has one.
    pub graph_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Procedure {
    pub id: u32,
    pub label: String,
    pub comment: Option<String>,
    /// Fenced documentation block following the declaration, verbatim.
    pub documentation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntity {
    pub id: String,
    pub label: String,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Procedure(String),
    Context(String),
}

impl Endpoint {
    pub fn label(&self) -> &str {
        match self {
            Endpoint::Procedure(l) | Endpoint::Context(l) => l,
        }
    }

    pub fn is_context(&self) -> bool {
        matches!(self, Endpoint::Context(_))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Procedure(l) => write!(f, "[{l}]"),
            Endpoint::Context(l) => write!(f, "({l})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrow {
    /// `→`: left writes to right.
    Right,
    /// `←`: right writes to left.
    Left,
    /// `↔`
    Both,
}

impl Arrow {
    pub fn symbol(self) -> &'static str {
        match self {
            Arrow::Right => "→",
            Arrow::Left => "←",
            Arrow::Both => "↔",
        }
    }
}

/// One `con(x, y)` term: `x` may print on an input tape of `y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Con {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionStmt {
    pub con: Option<Vec<Con>>,
    pub left: Endpoint,
    pub arrow: Arrow,
    pub right: Endpoint,
    pub comment: Option<String>,
}

impl ConnectionStmt {
    /// Directed `(writer, reader)` pairs of this statement.
    pub fn directed(&self) -> Vec<(&Endpoint, &Endpoint)> {
        match self.arrow {
            Arrow::Right => vec![(&self.left, &self.right)],
            Arrow::Left => vec![(&self.right, &self.left)],
            Arrow::Both => vec![(&self.left, &self.right), (&self.right, &self.left)],
        }
    }

    /// The con-terms the arrow implies, in the order they would be written.
    pub fn implied_con(&self) -> Vec<Con> {
        self.directed()
            .into_iter()
            .map(|(a, b)| Con { from: a.label().to_string(), to: b.label().to_string() })
            .collect()
    }
}

impl SystemModel {
    pub fn procedure(&self, label: &str) -> Option<&Procedure> {
        self.procedures.iter().find(|p| p.label == label)
    }

    pub fn context(&self, label: &str) -> Option<&ContextEntity> {
        self.contexts.iter().find(|c| c.label == label)
    }

    pub fn declares(&self, endpoint: &Endpoint) -> bool {
        match endpoint {
            Endpoint::Procedure(l) => self.procedure(l).is_some(),
            Endpoint::Context(l) => self.context(l).is_some(),
        }
    }

    /// Number of directed edges the connection statements expand to.
    pub fn directed_edge_count(&self) -> usize {
        self.connections.iter().map(|c| c.directed().len()).sum()
    }
}

pub(crate) fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}
