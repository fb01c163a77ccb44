use std::collections::{BTreeMap, HashMap};

use crate::machine::{MachineSpec, MachineState};
use crate::network::{Destination, Injection, Network, Schedules};
use crate::scheduler::{check_inputs, ClockConfig, EventKind, EventLog, HaltReason, RunError, RunResult, SinkRecord};
use crate::symbol::Symbol;

struct Slot<'n> {
    spec: &'n MachineSpec,
    state: MachineState,
    period: u64,
    /// Destination per output port, indexed into `slots` for tapes.
    routes: Vec<Option<Target>>,
}

#[derive(Clone)]
enum Target {
    Tape { slot: usize, tape: usize, dest: Destination },
    Sink { sink: usize, dest: Destination },
}

struct Feed<'s> {
    id: &'s str,
    slot: usize,
    tape: usize,
    entries: &'s [Injection],
    next: usize,
}

/// Runs `network` for at most `budget` global steps.
pub fn run(network: &Network, clocks: &ClockConfig, schedules: &Schedules, budget: u64) -> Result<RunResult, RunError> {
    let horizon = check_inputs(network, clocks, schedules, budget)?;
    let resolution = clocks.resolution();

    let index: HashMap<_, _> = network.machines.keys().enumerate().map(|(i, id)| (id, i)).collect();
    let sink_ids: Vec<&str> = {
        let mut ids: Vec<&str> = network.sinks.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        ids
    };
    let mut slots: Vec<Slot> = network
        .machines
        .values()
        .map(|spec| Slot {
            spec,
            state: MachineState::new(spec),
            period: resolution / u64::from(clocks.speeds[&spec.id]),
            routes: vec![None; spec.num_outputs],
        })
        .collect();
    for c in &network.connections {
        let slot = index[&c.from.machine];
        slots[slot].routes[c.from.port] =
            Some(Target::Tape { slot: index[&c.to.machine], tape: c.to.tape, dest: Destination::Tape(c.to.clone()) });
    }
    for s in &network.sinks {
        let sink = sink_ids.binary_search(&s.id.as_str()).expect("sink id is indexed");
        slots[index[&s.from.machine]].routes[s.from.port] =
            Some(Target::Sink { sink, dest: Destination::Sink(s.id.clone()) });
    }

    let mut feeds: Vec<Feed> = network
        .sources
        .iter()
        .filter_map(|s| {
            let entries = schedules.get(&s.id)?;
            Some(Feed { id: &s.id, slot: index[&s.to.machine], tape: s.to.tape, entries, next: 0 })
        })
        .collect();
    feeds.sort_by(|a, b| a.id.cmp(b.id));

    let mut sinks: Vec<Vec<SinkRecord>> = vec![Vec::new(); sink_ids.len()];
    let mut log = EventLog { resolution, events: Vec::new() };
    let mut emissions: Vec<(usize, usize, Symbol)> = Vec::new();

    let mut tick = 0;
    let reason = loop {
        if let Some(reason) = terminated(&slots, &feeds) {
            break reason;
        }
        if tick >= horizon {
            break HaltReason::BudgetExhausted;
        }

        for feed in &mut feeds {
            while let Some(entry) = feed.entries.get(feed.next) {
                if entry.at.saturating_mul(resolution).saturating_add(entry.offset) > tick {
                    break;
                }
                let slot = &mut slots[feed.slot];
                slot.state.inputs[feed.tape]
                    .write(entry.symbol.clone(), &slot.spec.tape_alphabet)
                    .expect("injections are checked before the run");
                log.push(
                    tick,
                    EventKind::Inject {
                        source: feed.id.to_string(),
                        machine: slot.spec.id.clone(),
                        tape: feed.tape,
                        symbol: entry.symbol.clone(),
                    },
                );
                feed.next += 1;
            }
        }

        for (idx, slot) in slots.iter_mut().enumerate() {
            if slot.state.halted || tick % slot.period != 0 {
                continue;
            }
            let machine = &slot.spec.id;
            let scanned = slot.state.scanned();
            let outcome = slot.spec.step(&mut slot.state, &scanned).expect("live machine with matching arity");
            let Some(fired) = outcome.fired else {
                log.push(tick, EventKind::Idle { machine: machine.clone(), state: slot.state.current.clone() });
                continue;
            };
            let emitted: Vec<(usize, Symbol)> = outcome
                .emissions
                .iter()
                .enumerate()
                .filter_map(|(p, s)| Some((p, s.clone()?)))
                .collect();
            log.push(
                tick,
                EventKind::Transition {
                    machine: machine.clone(),
                    from: fired.from,
                    to: fired.to,
                    rule: fired.rule,
                    consumed: outcome.consumed,
                    emitted: emitted.clone(),
                },
            );
            for tape in outcome.read_blank {
                log.push(tick, EventKind::ReadBlank { machine: machine.clone(), tape });
            }
            if outcome.halted {
                log.push(tick, EventKind::Halt { machine: machine.clone() });
            }
            emissions.extend(emitted.into_iter().map(|(port, symbol)| (idx, port, symbol)));
        }

        for (idx, port, symbol) in emissions.drain(..) {
            let Some(target) = slots[idx].routes[port].clone() else { continue };
            let machine = slots[idx].spec.id.clone();
            let dest = match target {
                Target::Tape { slot, tape, dest } => {
                    let slot = &mut slots[slot];
                    slot.state.inputs[tape]
                        .write(symbol.clone(), &slot.spec.tape_alphabet)
                        .expect("validated networks only route accepted symbols");
                    dest
                }
                Target::Sink { sink, dest } => {
                    sinks[sink].push(SinkRecord { tick, symbol: symbol.clone() });
                    dest
                }
            };
            log.push(tick, EventKind::Route { machine, port, to: dest, symbol });
        }
        tick += 1;
    };
    log.push(tick, EventKind::Stop { reason });

    Ok(RunResult {
        machines: slots.into_iter().map(|s| (s.spec.id.clone(), s.state)).collect(),
        sinks: sink_ids.iter().map(|id| id.to_string()).zip(sinks).collect::<BTreeMap<_, _>>(),
        log,
        halt_reason: reason,
        micro_ticks: tick,
    })
}

fn terminated(slots: &[Slot], feeds: &[Feed]) -> Option<HaltReason> {
    if !slots.is_empty() && slots.iter().all(|s| s.state.halted) {
        return Some(HaltReason::AllHalted);
    }
    if feeds.iter().any(|f| f.next < f.entries.len()) {
        return None;
    }
    let stuck = slots.iter().filter(|s| !s.state.halted).all(|s| {
        s.spec.find_rule(&s.state.current, s.state.working.scan(), &s.state.scanned()).is_none()
    });
    stuck.then_some(HaltReason::Quiescent)
}
