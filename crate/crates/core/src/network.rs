//! Networks of machines: connections, external sources and sinks, the
//! networking predicate and per-tick routing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::machine::{MachineId, MachineSpec};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid port reference {0:?}: expected `machineId.index`")]
pub struct PortSyntaxError(pub String);

fn split_port(s: &str) -> Result<(MachineId, usize), PortSyntaxError> {
    let err = || PortSyntaxError(s.to_string());
    let (machine, index) = s.rsplit_once('.').ok_or_else(err)?;
    if machine.is_empty() || index.is_empty() || !index.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    Ok((MachineId::new(machine), index.parse().map_err(|_| err())?))
}

macro_rules! port_ref {
    ($name:ident, $field:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name {
            pub machine: MachineId,
            pub $field: usize,
        }

        impl $name {
            pub fn new(machine: impl Into<String>, $field: usize) -> Self {
                $name { machine: MachineId::new(machine), $field }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}.{}", self.machine, self.$field)
            }
        }

        impl FromStr for $name {
            type Err = PortSyntaxError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let (machine, $field) = split_port(s)?;
                Ok($name { machine, $field })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

port_ref!(TapeRef, tape);
port_ref!(PortRef, port);

/// `from` may print on the input tape `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub from: PortRef,
    pub to: TapeRef,
}

/// External source writing into one input tape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceBinding {
    pub id: String,
    pub to: TapeRef,
}

/// External sink recording everything emitted on one output port.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkBinding {
    pub id: String,
    pub from: PortRef,
}

/// Where an output port delivers its symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Destination {
    Tape(TapeRef),
    Sink(String),
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Destination::Tape(t) => t.fmt(f),
            Destination::Sink(s) => write!(f, "sink:{s}"),
        }
    }
}

/// One scheduled symbol of an external source.
///
/// The symbol is due at micro-tick `at * resolution + offset`; a source
/// never overtakes itself, so an entry is injected no earlier than the one
/// before it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    pub at: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: u64,
    pub symbol: Symbol,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl Injection {
    pub fn new(at: u64, offset: u64, symbol: Symbol) -> Self {
        Injection { at, offset, symbol }
    }
}

/// Schedules keyed by source id.
pub type Schedules = BTreeMap<String, Vec<Injection>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("port {0} does not exist")]
    PortNotFound(String),
    #[error("input tape {0} already has a writer")]
    DoubleWriter(TapeRef),
    #[error("output port {0} is already wired")]
    PortInUse(PortRef),
    #[error("machine id {0} is already taken")]
    DuplicateMachine(MachineId),
    #[error("external id {0:?} is already taken")]
    DuplicateExternal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    InvalidMachine { machine: MachineId, reason: String },
    IsolatedMachine { machine: MachineId },
    DanglingEndpoint { endpoint: String },
    ArityViolation { endpoint: String },
    DoubleWriter { tape: TapeRef, writers: Vec<String> },
    PortReused { port: PortRef },
    UnboundExternalPort { id: String, endpoint: String },
    DuplicateExternalId { id: String },
    UnconnectedOutput { port: PortRef },
    AlphabetMismatch { from: String, to: TapeRef, symbol: Symbol },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidMachine { reason, .. } => write!(f, "invalid machine: {reason}"),
            Violation::IsolatedMachine { machine } => write!(f, "isolated machine {machine}"),
            Violation::DanglingEndpoint { endpoint } => write!(f, "dangling endpoint {endpoint}"),
            Violation::ArityViolation { endpoint } => write!(f, "port index out of range: {endpoint}"),
            Violation::DoubleWriter { tape, writers } => {
                write!(f, "double writer on {tape}: {}", writers.join(", "))
            }
            Violation::PortReused { port } => write!(f, "output port {port} feeds more than one destination"),
            Violation::UnboundExternalPort { id, endpoint } => {
                write!(f, "external port {id:?} is bound to missing endpoint {endpoint}")
            }
            Violation::DuplicateExternalId { id } => write!(f, "duplicate external id {id:?}"),
            Violation::UnconnectedOutput { port } => write!(f, "output port {port} emits but is not wired"),
            Violation::AlphabetMismatch { from, to, symbol } => {
                write!(f, "{from} may write {symbol} which {to} does not accept")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Symbols routed during one tick.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Routed {
    pub tapes: BTreeMap<TapeRef, Symbol>,
    pub sinks: BTreeMap<String, Symbol>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub machines: BTreeMap<MachineId, MachineSpec>,
    #[serde(default)]
    pub connections: Vec<Connection>,
    #[serde(default)]
    pub sources: Vec<SourceBinding>,
    #[serde(default)]
    pub sinks: Vec<SinkBinding>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_machine(&mut self, spec: MachineSpec) -> Result<(), WireError> {
        if self.machines.contains_key(&spec.id) {
            return Err(WireError::DuplicateMachine(spec.id));
        }
        self.machines.insert(spec.id.clone(), spec);
        Ok(())
    }

    fn has_port(&self, port: &PortRef) -> bool {
        self.machines.get(&port.machine).is_some_and(|m| port.port < m.num_outputs)
    }

    fn has_tape(&self, tape: &TapeRef) -> bool {
        self.machines.get(&tape.machine).is_some_and(|m| tape.tape < m.num_inputs)
    }

    /// Ids of everything writing into `tape`: connections by port, sources by id.
    pub fn writers(&self, tape: &TapeRef) -> Vec<String> {
        let from_machines = self.connections.iter().filter(|c| &c.to == tape).map(|c| c.from.to_string());
        let from_sources = self.sources.iter().filter(|s| &s.to == tape).map(|s| format!("source:{}", s.id));
        from_machines.chain(from_sources).collect()
    }

    pub fn destination(&self, port: &PortRef) -> Option<Destination> {
        if let Some(c) = self.connections.iter().find(|c| &c.from == port) {
            return Some(Destination::Tape(c.to.clone()));
        }
        self.sinks.iter().find(|s| &s.from == port).map(|s| Destination::Sink(s.id.clone()))
    }

    fn external_id_taken(&self, id: &str) -> bool {
        self.sources.iter().any(|s| s.id == id) || self.sinks.iter().any(|s| s.id == id)
    }

    /// Adds a connection from an output port to an input tape or a sink.
    pub fn wire(&mut self, from: PortRef, to: Destination) -> Result<(), WireError> {
        if !self.has_port(&from) {
            return Err(WireError::PortNotFound(from.to_string()));
        }
        if self.destination(&from).is_some() {
            return Err(WireError::PortInUse(from));
        }
        match to {
            Destination::Tape(tape) => {
                if !self.has_tape(&tape) {
                    return Err(WireError::PortNotFound(tape.to_string()));
                }
                if !self.writers(&tape).is_empty() {
                    return Err(WireError::DoubleWriter(tape));
                }
                self.connections.push(Connection { from, to: tape });
            }
            Destination::Sink(id) => {
                if self.external_id_taken(&id) {
                    return Err(WireError::DuplicateExternal(id));
                }
                self.sinks.push(SinkBinding { id, from });
            }
        }
        Ok(())
    }

    /// Binds an external source to an input tape.
    pub fn attach_source(&mut self, id: impl Into<String>, to: TapeRef) -> Result<(), WireError> {
        let id = id.into();
        if !self.has_tape(&to) {
            return Err(WireError::PortNotFound(to.to_string()));
        }
        if self.external_id_taken(&id) {
            return Err(WireError::DuplicateExternal(id));
        }
        if !self.writers(&to).is_empty() {
            return Err(WireError::DoubleWriter(to));
        }
        self.sources.push(SourceBinding { id, to });
        Ok(())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        for spec in self.machines.values() {
            if let Err(e) = spec.validate() {
                violations.push(Violation::InvalidMachine { machine: spec.id.clone(), reason: e.to_string() });
            }
        }

        let mut check_port = |endpoint: String, machine: &MachineId, index: usize, arity: fn(&MachineSpec) -> usize| {
            match self.machines.get(machine) {
                None => {
                    violations.push(Violation::DanglingEndpoint { endpoint });
                    false
                }
                Some(m) if index >= arity(m) => {
                    violations.push(Violation::ArityViolation { endpoint });
                    false
                }
                Some(_) => true,
            }
        };
        let mut live_connections = Vec::new();
        for c in &self.connections {
            let from_ok = check_port(c.from.to_string(), &c.from.machine, c.from.port, |m| m.num_outputs);
            let to_ok = check_port(c.to.to_string(), &c.to.machine, c.to.tape, |m| m.num_inputs);
            if from_ok && to_ok {
                live_connections.push(c);
            }
        }

        let mut unbound = Vec::new();
        for s in &self.sources {
            if !self.has_tape(&s.to) {
                unbound.push(Violation::UnboundExternalPort { id: s.id.clone(), endpoint: s.to.to_string() });
            }
        }
        for s in &self.sinks {
            if !self.has_port(&s.from) {
                unbound.push(Violation::UnboundExternalPort { id: s.id.clone(), endpoint: s.from.to_string() });
            }
        }
        violations.extend(unbound);

        let mut ids = BTreeSet::new();
        for id in self.sources.iter().map(|s| &s.id).chain(self.sinks.iter().map(|s| &s.id)) {
            if !ids.insert(id) {
                violations.push(Violation::DuplicateExternalId { id: id.clone() });
            }
        }

        let mut participating: BTreeSet<&MachineId> = BTreeSet::new();
        for c in &live_connections {
            participating.insert(&c.from.machine);
            participating.insert(&c.to.machine);
        }
        participating.extend(self.sources.iter().filter(|s| self.has_tape(&s.to)).map(|s| &s.to.machine));
        participating.extend(self.sinks.iter().filter(|s| self.has_port(&s.from)).map(|s| &s.from.machine));
        for id in self.machines.keys() {
            if !participating.contains(id) {
                violations.push(Violation::IsolatedMachine { machine: id.clone() });
            }
        }

        let mut writers: BTreeMap<&TapeRef, Vec<String>> = BTreeMap::new();
        for c in &self.connections {
            writers.entry(&c.to).or_default().push(c.from.to_string());
        }
        for s in &self.sources {
            writers.entry(&s.to).or_default().push(format!("source:{}", s.id));
        }
        for (tape, w) in writers {
            if w.len() > 1 {
                violations.push(Violation::DoubleWriter { tape: tape.clone(), writers: w });
            }
        }

        let mut fanout: BTreeMap<&PortRef, usize> = BTreeMap::new();
        for port in self.connections.iter().map(|c| &c.from).chain(self.sinks.iter().map(|s| &s.from)) {
            *fanout.entry(port).or_default() += 1;
        }
        for (port, n) in &fanout {
            if *n > 1 {
                violations.push(Violation::PortReused { port: (*port).clone() });
            }
        }

        for spec in self.machines.values() {
            for port in 0..spec.num_outputs {
                let port_ref = PortRef { machine: spec.id.clone(), port };
                if !fanout.contains_key(&port_ref) && !spec.port_symbols(port).is_empty() {
                    violations.push(Violation::UnconnectedOutput { port: port_ref });
                }
            }
        }

        for c in live_connections {
            let (from, to) = (&self.machines[&c.from.machine], &self.machines[&c.to.machine]);
            for symbol in from.port_symbols(c.from.port) {
                if !to.tape_alphabet.contains(symbol) || symbol.is_blank() {
                    violations.push(Violation::AlphabetMismatch {
                        from: c.from.to_string(),
                        to: c.to.clone(),
                        symbol: symbol.clone(),
                    });
                }
            }
        }

        ValidationReport { violations }
    }

    /// Maps this tick's emissions to their destinations. Emissions on
    /// unwired ports are dropped; validation rejects networks where that
    /// can happen.
    pub fn route(&self, emissions: &BTreeMap<MachineId, Vec<Option<Symbol>>>) -> Routed {
        let mut routed = Routed::default();
        for (machine, outs) in emissions {
            for (port, symbol) in outs.iter().enumerate() {
                let Some(symbol) = symbol else { continue };
                let port = PortRef { machine: machine.clone(), port };
                match self.destination(&port) {
                    Some(Destination::Tape(t)) => {
                        routed.tapes.insert(t, symbol.clone());
                    }
                    Some(Destination::Sink(s)) => {
                        routed.sinks.insert(s, symbol.clone());
                    }
                    None => {}
                }
            }
        }
        routed
    }
}
