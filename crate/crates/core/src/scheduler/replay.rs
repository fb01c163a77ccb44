use std::collections::BTreeMap;

use thiserror::Error;

use crate::machine::{MachineId, MachineState};
use crate::network::{Destination, Network, PortRef};
use crate::scheduler::{EventKind, EventLog, HaltReason, RunResult, SinkRecord};
use crate::symbol::Advance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("event {index} (tick {tick}) does not fit the network: {reason}")]
    LogMismatch { index: usize, tick: u64, reason: String },
}

/// Rebuilds a run from its log. A truncated log yields the state of the run
/// at the truncation point; without a trailing `stop` event the halt reason
/// is reported as budget-exhausted.
pub fn replay(log: &EventLog, network: &Network) -> Result<RunResult, ReplayError> {
    let mut machines: BTreeMap<MachineId, MachineState> =
        network.machines.values().map(|spec| (spec.id.clone(), MachineState::new(spec))).collect();
    let mut sinks: BTreeMap<String, Vec<SinkRecord>> =
        network.sinks.iter().map(|s| (s.id.clone(), Vec::new())).collect();
    let mut stop = None;
    let mut last_tick = None;

    for (index, event) in log.events.iter().enumerate() {
        let tick = event.tick;
        let fail = |reason: String| ReplayError::LogMismatch { index, tick, reason };
        if last_tick.is_some_and(|t| tick < t) {
            return Err(fail("ticks go backwards".into()));
        }
        if stop.is_some() {
            return Err(fail("event after stop".into()));
        }
        last_tick = Some(tick);

        if let Some(machine) = event.kind.machine() {
            if !network.machines.contains_key(machine) {
                return Err(fail(format!("unknown machine {machine}")));
            }
        }
        match &event.kind {
            EventKind::Inject { source, machine, tape, symbol } => {
                let bound = network.sources.iter().any(|s| &s.id == source && &s.to.machine == machine && s.to.tape == *tape);
                if !bound {
                    return Err(fail(format!("source {source:?} is not bound to {machine}.{tape}")));
                }
                let spec = &network.machines[machine];
                let Some(input) = machines.get_mut(machine).unwrap().inputs.get_mut(*tape) else {
                    return Err(fail(format!("{machine} has no input tape {tape}")));
                };
                input
                    .write(symbol.clone(), &spec.tape_alphabet)
                    .map_err(|e| fail(e.to_string()))?;
            }
            EventKind::Transition { machine, from, to, rule, consumed, emitted } => {
                let spec = &network.machines[machine];
                let state = machines.get_mut(machine).unwrap();
                if state.halted {
                    return Err(fail(format!("{machine} fires after halting")));
                }
                if &state.current != from {
                    return Err(fail(format!("{machine} is in {}, not {from}", state.current)));
                }
                let Some(r) = spec.rules.get(*rule) else {
                    return Err(fail(format!("{machine} has no rule {rule}")));
                };
                if &r.state != from || &r.next != to {
                    return Err(fail(format!("rule {rule} of {machine} does not go {from} -> {to}")));
                }
                let expected_emissions: Vec<_> =
                    r.outputs.iter().enumerate().filter_map(|(p, s)| Some((p, s.clone()?))).collect();
                if &expected_emissions != emitted {
                    return Err(fail(format!("emissions differ from rule {rule}")));
                }
                let mut reads = Vec::new();
                for (k, mv) in r.input_moves.iter().enumerate() {
                    if *mv == Advance::R && !state.inputs[k].scan().is_blank() {
                        reads.push((k, state.inputs[k].read()));
                    }
                }
                if &reads != consumed {
                    return Err(fail(format!("{machine} consumed {reads:?}, log says {consumed:?}")));
                }
                state.working.write(r.write.clone());
                state.working.shift(r.work_move);
                state.current = to.clone();
                state.transitions_executed += 1;
                state.halted = state.current == spec.halt;
            }
            EventKind::ReadBlank { machine, tape } => {
                if machines[machine].inputs.get(*tape).is_none_or(|t| !t.scan().is_blank()) {
                    return Err(fail(format!("{machine}.{tape} is not blank")));
                }
            }
            EventKind::Idle { machine, state } => {
                if &machines[machine].current != state {
                    return Err(fail(format!("{machine} idles in {state} but is in {}", machines[machine].current)));
                }
            }
            EventKind::Halt { machine } => {
                if !machines[machine].halted {
                    return Err(fail(format!("{machine} is not in its halting state")));
                }
            }
            EventKind::Route { machine, port, to, symbol } => {
                let from = PortRef { machine: machine.clone(), port: *port };
                if network.destination(&from).as_ref() != Some(to) {
                    return Err(fail(format!("{from} is not wired to {to}")));
                }
                match to {
                    Destination::Tape(t) => {
                        let Some(spec) = network.machines.get(&t.machine) else {
                            return Err(fail(format!("{t} does not exist")));
                        };
                        let Some(input) = machines.get_mut(&t.machine).and_then(|m| m.inputs.get_mut(t.tape)) else {
                            return Err(fail(format!("{t} does not exist")));
                        };
                        input
                            .write(symbol.clone(), &spec.tape_alphabet)
                            .map_err(|e| fail(e.to_string()))?;
                    }
                    Destination::Sink(s) => sinks.get_mut(s).unwrap().push(SinkRecord { tick, symbol: symbol.clone() }),
                }
            }
            EventKind::Stop { reason } => stop = Some((*reason, tick)),
        }
    }

    let (halt_reason, micro_ticks) = match stop {
        Some(s) => s,
        None => (HaltReason::BudgetExhausted, last_tick.map_or(0, |t| t + 1)),
    };
    Ok(RunResult { machines, sinks, log: log.clone(), halt_reason, micro_ticks })
}
