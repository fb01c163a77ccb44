use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::model::{Graph, NodeKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Procedures become boxes, context entities ellipses; both are labeled
/// `<id>: <label>`.
pub fn to_dot(graph: &Graph) -> String {
    let mut out = String::from("digraph G {\n");
    for node in &graph.nodes {
        let shape = match node.kind {
            NodeKind::Procedure => "box",
            NodeKind::Context => "ellipse",
        };
        let label = quote(&format!("{}: {}", node.id, node.label));
        writeln!(out, "  {} [shape={shape}, label={label}];", quote(&node.id)).unwrap();
    }
    for edge in &graph.edges {
        writeln!(out, "  {} -> {};", quote(&edge.from), quote(&edge.to)).unwrap();
    }
    out.push_str("}\n");
    out
}

pub type Attributes = BTreeMap<String, String>;

/// What [`read_dot`] understood of a document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub directed: bool,
    pub name: Option<String>,
    /// Explicit node statements, in order.
    pub nodes: Vec<(String, Attributes)>,
    /// Edges, with `a -> b -> c` chains split into pairs.
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DOT syntax error at byte {offset}: {message}")]
pub struct DotError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Id(String),
    Punct(&'static str),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, DotError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let rest = &src[i..];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if rest.starts_with("//") || (c == b'#' && (i == 0 || bytes[i - 1] == b'\n')) {
            i += rest.find('\n').unwrap_or(rest.len());
        } else if let Some(body) = rest.strip_prefix("/*") {
            let end = body.find("*/").ok_or(DotError { offset: i, message: "unterminated comment".into() })?;
            i += end + 4;
        } else if let Some(p) = ["->", "--", "{", "}", "[", "]", "=", ",", ";"].into_iter().find(|p| rest.starts_with(p)) {
            tokens.push((i, Token::Punct(p)));
            i += p.len();
        } else if c == b'"' {
            let mut value = String::new();
            let mut chars = rest[1..].char_indices();
            loop {
                match chars.next() {
                    Some((_, '\\')) => match chars.next() {
                        Some((_, '"')) => value.push('"'),
                        Some((_, other)) => {
                            value.push('\\');
                            value.push(other);
                        }
                        None => return Err(DotError { offset: i, message: "unterminated string".into() }),
                    },
                    Some((at, '"')) => {
                        tokens.push((i, Token::Id(value.replace("\\\\", "\\"))));
                        i += at + 2;
                        break;
                    }
                    Some((_, ch)) => value.push(ch),
                    None => return Err(DotError { offset: i, message: "unterminated string".into() }),
                }
            }
        } else if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c >= 0x80 {
            let len = rest.find(|ch: char| !(ch.is_alphanumeric() || ch == '_' || ch == '.')).unwrap_or(rest.len());
            tokens.push((i, Token::Id(rest[..len].to_string())));
            i += len;
        } else {
            return Err(DotError { offset: i, message: format!("unexpected character {:?}", c as char) });
        }
    }
    Ok(tokens)
}

struct Reader {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, message: &str) -> DotError {
        let offset = self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o);
        DotError { offset, message: message.into() }
    }

    fn punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Token::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), DotError> {
        if self.punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{p}`")))
        }
    }

    fn id(&mut self) -> Option<String> {
        match self.peek() {
            Some(Token::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn attributes(&mut self) -> Result<Attributes, DotError> {
        let mut attrs = Attributes::new();
        while self.punct("[") {
            while !self.punct("]") {
                let key = self.id().ok_or_else(|| self.error("expected attribute name"))?;
                self.expect("=")?;
                let value = self.id().ok_or_else(|| self.error("expected attribute value"))?;
                attrs.insert(key, value);
                let _ = self.punct(",") || self.punct(";");
            }
        }
        Ok(attrs)
    }
}

/// Reads the common subset of DOT: one `graph`/`digraph` with node, edge,
/// attribute and `a = b` statements. Subgraphs and ports are not supported.
pub fn read_dot(src: &str) -> Result<DotGraph, DotError> {
    let mut r = Reader { tokens: tokenize(src)?, pos: 0, end: src.len() };
    let mut graph = DotGraph::default();
    let mut keyword = r.id().map(|k| k.to_ascii_lowercase());
    if keyword.as_deref() == Some("strict") {
        keyword = r.id().map(|k| k.to_ascii_lowercase());
    }
    match keyword {
        Some(k) if k == "digraph" => graph.directed = true,
        Some(k) if k == "graph" => graph.directed = false,
        _ => return Err(r.error("expected `graph` or `digraph`")),
    }
    graph.name = r.id();
    r.expect("{")?;
    let edge_op = if graph.directed { "->" } else { "--" };
    loop {
        if r.punct("}") {
            break;
        }
        let Some(first) = r.id() else { return Err(r.error("expected a statement")) };
        let keyword = first.to_ascii_lowercase();
        if matches!(keyword.as_str(), "graph" | "node" | "edge") && r.peek() == Some(&Token::Punct("[")) {
            r.attributes()?;
        } else if r.punct("=") {
            r.id().ok_or_else(|| r.error("expected a value"))?;
        } else if r.peek() == Some(&Token::Punct(edge_op)) {
            let mut from = first;
            while r.punct(edge_op) {
                let to = r.id().ok_or_else(|| r.error("expected an edge target"))?;
                graph.edges.push((from, to.clone()));
                from = to;
            }
            r.attributes()?;
        } else {
            let attrs = r.attributes()?;
            graph.nodes.push((first, attrs));
        }
        let _ = r.punct(";");
    }
    if r.pos != r.tokens.len() {
        return Err(r.error("trailing content after graph"));
    }
    Ok(graph)
}
