//! Networked Turing machines and the context-awareness framework built on
//! them.
//!
//! * [`machine`]: machine descriptions, two-headed input tapes and the
//!   single-transition semantics.
//! * [`product`]: folding a producer and a consumer into one multi-tape machine.
//! * [`network`]: wiring machines together with external sources and sinks.
//! * [`scheduler`]: running a network under per-machine speeds, plus an
//!   independent reference interpreter and log replay.
//! * [`context`]: evaluation vectors, context-awareness and effective
//!   context-awareness checks.
//! * [`model`]: the textual system-modeling language, its validator, graph
//!   builder and refinement checker.
//! * [`export`]: DOT and JSON tree renderings.
//! * [`io`]: loading machine, network, trace and mapping files.

pub mod context;
pub mod export;
pub mod io;
pub mod machine;
pub mod model;
pub mod network;
pub mod product;
pub mod scheduler;
pub mod symbol;

#[cfg(test)]
pub(crate) mod testutil;

pub use machine::{InputTape, MachineId, MachineSpec, MachineState, TransitionRule, WorkTape};
pub use network::{Connection, Destination, Injection, Network, PortRef, Schedules, TapeRef};
pub use scheduler::{replay, run, run_reference, ClockConfig, EventLog, HaltReason, RunResult};
pub use symbol::{Advance, HeadMove, Pattern, Symbol};
