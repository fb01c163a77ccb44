use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{MachineId, StateId};
use crate::network::Destination;
use crate::scheduler::HaltReason;
use crate::symbol::Symbol;

pub const LOG_FORMAT: &str = "ntm-event-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    Inject {
        source: String,
        machine: MachineId,
        tape: usize,
        symbol: Symbol,
    },
    Transition {
        machine: MachineId,
        from: StateId,
        to: StateId,
        rule: usize,
        consumed: Vec<(usize, Symbol)>,
        emitted: Vec<(usize, Symbol)>,
    },
    ReadBlank {
        machine: MachineId,
        tape: usize,
    },
    Idle {
        machine: MachineId,
        state: StateId,
    },
    Halt {
        machine: MachineId,
    },
    Route {
        machine: MachineId,
        port: usize,
        to: Destination,
        symbol: Symbol,
    },
    Stop {
        reason: HaltReason,
    },
}

impl EventKind {
    pub fn machine(&self) -> Option<&MachineId> {
        match self {
            EventKind::Inject { machine, .. }
            | EventKind::Transition { machine, .. }
            | EventKind::ReadBlank { machine, .. }
            | EventKind::Idle { machine, .. }
            | EventKind::Halt { machine }
            | EventKind::Route { machine, .. } => Some(machine),
            EventKind::Stop { .. } => None,
        }
    }
}

/// Ordered record of a run. Ticks are micro-ticks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLog {
    /// Micro-ticks per global step of the run that produced the log.
    pub resolution: u64,
    pub events: Vec<Event>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    resolution: u64,
}

#[derive(Debug, Error)]
pub enum LogFormatError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("missing log header")]
    MissingHeader,
    #[error("unsupported log format {format:?} version {version}")]
    Unsupported { format: String, version: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EventLog {
    pub fn push(&mut self, tick: u64, kind: EventKind) {
        self.events.push(Event { tick, kind });
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events strictly before micro-tick `tick`.
    pub fn truncated(&self, tick: u64) -> EventLog {
        EventLog {
            resolution: self.resolution,
            events: self.events.iter().filter(|e| e.tick < tick).cloned().collect(),
        }
    }

    /// JSON lines: a header object, then one event per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = Header { format: LOG_FORMAT.into(), version: LOG_VERSION, resolution: self.resolution };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for event in &self.events {
            serde_json::to_writer(&mut out, event)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<EventLog, LogFormatError> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(l) if l.trim().is_empty()));
        let (_, first) = lines.next().ok_or(LogFormatError::MissingHeader)?;
        let header: Header =
            serde_json::from_str(&first?).map_err(|source| LogFormatError::Json { line: 1, source })?;
        if header.format != LOG_FORMAT || header.version != LOG_VERSION {
            return Err(LogFormatError::Unsupported { format: header.format, version: header.version });
        }
        let mut log = EventLog { resolution: header.resolution, events: Vec::new() };
        for (idx, line) in lines {
            let event = serde_json::from_str(&line?).map_err(|source| LogFormatError::Json { line: idx + 1, source })?;
            log.events.push(event);
        }
        Ok(log)
    }
}
