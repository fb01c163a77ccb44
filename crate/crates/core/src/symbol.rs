//! Tape symbols, rule patterns and head moves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Token of the blank symbol.
pub const BLANK: &str = "_";

/// Token reserved for wildcard patterns in rule tables. It can never be a symbol.
pub const WILDCARD: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("symbol must not be empty")]
    Empty,
    #[error("symbol {0:?} contains whitespace or control characters")]
    NotPrintable(String),
    #[error("`*` is reserved for wildcards")]
    Wildcard,
}

/// A tape symbol: a short printable token compared by exact equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(token: impl Into<String>) -> Result<Self, SymbolError> {
        let token = token.into();
        if token.is_empty() {
            return Err(SymbolError::Empty);
        }
        if token == WILDCARD {
            return Err(SymbolError::Wildcard);
        }
        if token.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(SymbolError::NotPrintable(token));
        }
        Ok(Symbol(token))
    }

    pub fn blank() -> Self {
        Symbol(BLANK.to_string())
    }

    pub fn is_blank(&self) -> bool {
        self.0 == BLANK
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Symbol {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Symbol::new(s)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Symbol::new(s).map_err(serde::de::Error::custom)
    }
}

/// Left-hand side of a rule entry: a concrete symbol or `*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Any,
    Exact(Symbol),
}

impl Pattern {
    pub fn matches(&self, symbol: &Symbol) -> bool {
        match self {
            Pattern::Any => true,
            Pattern::Exact(s) => s == symbol,
        }
    }

    pub fn is_concrete(&self) -> bool {
        matches!(self, Pattern::Exact(_))
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Pattern::Any => None,
            Pattern::Exact(s) => Some(s),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Any => f.write_str(WILDCARD),
            Pattern::Exact(s) => s.fmt(f),
        }
    }
}

impl From<Symbol> for Pattern {
    fn from(s: Symbol) -> Self {
        Pattern::Exact(s)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Pattern::Any => serializer.serialize_str(WILDCARD),
            Pattern::Exact(s) => s.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == WILDCARD {
            Ok(Pattern::Any)
        } else {
            Symbol::new(s)
                .map(Pattern::Exact)
                .map_err(serde::de::Error::custom)
        }
    }
}

/// Working-tape head move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeadMove {
    L,
    R,
    S,
}

/// Input-tape read head and output head action: they only move right or stay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Advance {
    R,
    S,
}

impl From<Advance> for HeadMove {
    fn from(a: Advance) -> Self {
        match a {
            Advance::R => HeadMove::R,
            Advance::S => HeadMove::S,
        }
    }
}
