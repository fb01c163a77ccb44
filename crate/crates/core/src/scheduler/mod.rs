//! Discrete-time execution of a network.
//!
//! Global time advances in whole steps. A machine with speed σ performs σ
//! transitions per step, so every step is split into `resolution` micro-ticks
//! where `resolution` is the lcm of all speeds, and the machine fires on every
//! `resolution / σ`-th micro-tick. Inside a micro-tick the phases are:
//!
//! 1. external injections that are due,
//! 2. every firing machine samples the symbols under its reader heads,
//! 3. every firing machine computes its transition,
//! 4. emissions are routed and written.
//!
//! Writes of phase 4 are therefore only visible from the next micro-tick on.
//!
//! [`run`] is the production engine; [`run_reference`] is an independent,
//! deliberately naive interpreter used as an oracle for it; [`replay`]
//! rebuilds a result from its event log.

mod engine;
mod log;
mod reference;
mod replay;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::engine::run;
pub use self::log::{Event, EventKind, EventLog, LogFormatError, LOG_FORMAT, LOG_VERSION};
pub use self::reference::run_reference;
pub use self::replay::{replay, ReplayError};

use crate::machine::{MachineId, MachineState};
use crate::network::{Network, ValidationReport};
use crate::symbol::Symbol;

/// Budget used when none is given.
pub const DEFAULT_BUDGET: u64 = 10_000;

/// Per-machine speeds for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockConfig {
    pub speeds: BTreeMap<MachineId, u32>,
}

impl ClockConfig {
    /// Speeds as declared in the machine specs.
    pub fn for_network(network: &Network) -> Self {
        ClockConfig { speeds: network.machines.values().map(|m| (m.id.clone(), m.speed)).collect() }
    }

    pub fn with_speed(mut self, machine: impl Into<MachineId>, speed: u32) -> Self {
        self.speeds.insert(machine.into(), speed);
        self
    }

    /// Micro-ticks per global step: the lcm of all speeds (1 when empty).
    pub fn resolution(&self) -> u64 {
        self.speeds.values().fold(1, |acc, &s| lcm(acc, u64::from(s)))
    }

    fn check(&self, network: &Network) -> Result<(), RunError> {
        for id in network.machines.keys() {
            match self.speeds.get(id) {
                None => return Err(RunError::MissingSpeed(id.clone())),
                Some(0) => return Err(RunError::ZeroSpeed(id.clone())),
                Some(_) => {}
            }
        }
        if let Some(id) = self.speeds.keys().find(|id| !network.machines.contains_key(*id)) {
            return Err(RunError::UnknownMachine(id.clone()));
        }
        Ok(())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    AllHalted,
    Quiescent,
    BudgetExhausted,
}

/// One symbol delivered to an external sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkRecord {
    pub tick: u64,
    pub symbol: Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub machines: BTreeMap<MachineId, MachineState>,
    pub sinks: BTreeMap<String, Vec<SinkRecord>>,
    pub log: EventLog,
    pub halt_reason: HaltReason,
    /// Number of micro-ticks executed.
    pub micro_ticks: u64,
}

impl RunResult {
    /// Symbols delivered to `sink`, without timestamps.
    pub fn sink_stream(&self, sink: &str) -> Vec<Symbol> {
        self.sinks.get(sink).map(|r| r.iter().map(|r| r.symbol.clone()).collect()).unwrap_or_default()
    }

    /// All sink streams concatenated in sink-id order.
    pub fn concatenated_sinks(&self) -> Vec<Symbol> {
        self.sinks.values().flatten().map(|r| r.symbol.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("network is invalid: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetwork(ValidationReport),
    #[error("no speed configured for machine {0}")]
    MissingSpeed(MachineId),
    #[error("speed of machine {0} must be positive")]
    ZeroSpeed(MachineId),
    #[error("speed given for unknown machine {0}")]
    UnknownMachine(MachineId),
    #[error("schedule given for unknown source {0:?}")]
    UnknownSource(String),
    #[error("source {source_id:?} cannot inject {symbol}: {reason}")]
    InvalidInjection { source_id: String, symbol: Symbol, reason: String },
    #[error("budget of {0} global steps overflows the micro-tick counter")]
    BudgetOverflow(u64),
}

/// Shared precondition checks for both engines.
fn check_inputs(
    network: &Network,
    clocks: &ClockConfig,
    schedules: &crate::network::Schedules,
    budget: u64,
) -> Result<u64, RunError> {
    let report = network.validate();
    if !report.is_valid() {
        return Err(RunError::InvalidNetwork(report));
    }
    clocks.check(network)?;
    for (source, entries) in schedules {
        let Some(binding) = network.sources.iter().find(|s| &s.id == source) else {
            return Err(RunError::UnknownSource(source.clone()));
        };
        let spec = &network.machines[&binding.to.machine];
        for entry in entries {
            let reason = if entry.symbol.is_blank() {
                Some("blank cannot be written")
            } else if !spec.tape_alphabet.contains(&entry.symbol) {
                Some("symbol is not in the target tape alphabet")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(RunError::InvalidInjection {
                    source_id: source.clone(),
                    symbol: entry.symbol.clone(),
                    reason: reason.to_string(),
                });
            }
        }
    }
    budget.checked_mul(clocks.resolution()).ok_or(RunError::BudgetOverflow(budget))
}
