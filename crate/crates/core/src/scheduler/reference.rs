//! Naive sequential interpreter.
//!
//! Nothing here reuses the tape, rule-matching or routing code of the main
//! engine: tapes are plain maps, rules are matched by collecting and sorting
//! candidates, and routing scans the connection list.

use std::collections::BTreeMap;

use crate::machine::{InputTape, MachineId, MachineSpec, MachineState, WorkTape};
use crate::network::{Destination, Network, Schedules};
use crate::scheduler::{check_inputs, ClockConfig, EventKind, EventLog, HaltReason, RunError, RunResult, SinkRecord};
use crate::symbol::{Advance, HeadMove, Pattern, Symbol};

struct Naive {
    state: String,
    work: BTreeMap<usize, Symbol>,
    head: usize,
    /// (written symbols, reader position) per input tape
    tapes: Vec<(Vec<Symbol>, usize)>,
    halted: bool,
    count: u64,
}

fn blank() -> Symbol {
    Symbol::blank()
}

impl Naive {
    fn scan_work(&self) -> Symbol {
        self.work.get(&self.head).cloned().unwrap_or_else(blank)
    }

    fn scan_inputs(&self) -> Vec<Symbol> {
        self.tapes.iter().map(|(cells, r)| cells.get(*r).cloned().unwrap_or_else(blank)).collect()
    }
}

fn pick_rule(spec: &MachineSpec, state: &str, work: &Symbol, inputs: &[Symbol]) -> Option<usize> {
    let fits = |p: &Pattern, s: &Symbol| match p {
        Pattern::Any => true,
        Pattern::Exact(x) => x == s,
    };
    let mut candidates: Vec<(std::cmp::Reverse<usize>, usize)> = Vec::new();
    for (i, r) in spec.rules.iter().enumerate() {
        if r.state != state || !fits(&r.work, work) {
            continue;
        }
        if r.inputs.len() != inputs.len() || !r.inputs.iter().zip(inputs).all(|(p, s)| fits(p, s)) {
            continue;
        }
        let mut score = 0;
        if let Pattern::Exact(_) = r.work {
            score += 1;
        }
        for p in &r.inputs {
            if let Pattern::Exact(_) = p {
                score += 1;
            }
        }
        candidates.push((std::cmp::Reverse(score), i));
    }
    candidates.sort();
    candidates.first().map(|c| c.1)
}

fn destination_of(network: &Network, machine: &MachineId, port: usize) -> Option<Destination> {
    for c in &network.connections {
        if &c.from.machine == machine && c.from.port == port {
            return Some(Destination::Tape(c.to.clone()));
        }
    }
    for s in &network.sinks {
        if &s.from.machine == machine && s.from.port == port {
            return Some(Destination::Sink(s.id.clone()));
        }
    }
    None
}

/// Same contract as [`super::run`], computed by a straightforward loop.
pub fn run_reference(
    network: &Network,
    clocks: &ClockConfig,
    schedules: &Schedules,
    budget: u64,
) -> Result<RunResult, RunError> {
    let last_tick = check_inputs(network, clocks, schedules, budget)?;

    let mut resolution: u64 = 1;
    for &speed in clocks.speeds.values() {
        let speed = u64::from(speed);
        let mut multiple = resolution;
        while !multiple.is_multiple_of(speed) {
            multiple += resolution;
        }
        resolution = multiple;
    }

    let mut machines: BTreeMap<MachineId, Naive> = BTreeMap::new();
    for (id, spec) in &network.machines {
        machines.insert(
            id.clone(),
            Naive {
                state: spec.start.clone(),
                work: BTreeMap::new(),
                head: 0,
                tapes: vec![(Vec::new(), 0); spec.num_inputs],
                halted: spec.start == spec.halt,
                count: 0,
            },
        );
    }
    let mut sinks: BTreeMap<String, Vec<SinkRecord>> =
        network.sinks.iter().map(|s| (s.id.clone(), Vec::new())).collect();
    let mut cursors: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &network.sources {
        if schedules.contains_key(&s.id) {
            cursors.insert(&s.id, 0);
        }
    }
    let mut log = EventLog { resolution, events: Vec::new() };

    let mut tick: u64 = 0;
    let reason = loop {
        let everyone_halted = !machines.is_empty() && machines.values().all(|m| m.halted);
        let feeds_left = cursors.iter().any(|(id, &c)| c < schedules[*id].len());
        let nobody_can_move = machines.iter().all(|(id, m)| {
            m.halted || pick_rule(&network.machines[id], &m.state, &m.scan_work(), &m.scan_inputs()).is_none()
        });
        if everyone_halted {
            break HaltReason::AllHalted;
        }
        if !feeds_left && nobody_can_move {
            break HaltReason::Quiescent;
        }
        if tick == last_tick {
            break HaltReason::BudgetExhausted;
        }

        // injections
        for (source, cursor) in cursors.iter_mut() {
            let binding = network.sources.iter().find(|s| s.id == *source).unwrap();
            let entries = &schedules[*source];
            while *cursor < entries.len() {
                let entry = &entries[*cursor];
                if entry.at.saturating_mul(resolution).saturating_add(entry.offset) > tick {
                    break;
                }
                let m = machines.get_mut(&binding.to.machine).unwrap();
                m.tapes[binding.to.tape].0.push(entry.symbol.clone());
                log.push(
                    tick,
                    EventKind::Inject {
                        source: source.to_string(),
                        machine: binding.to.machine.clone(),
                        tape: binding.to.tape,
                        symbol: entry.symbol.clone(),
                    },
                );
                *cursor += 1;
            }
        }

        // sample and compute
        let mut outbox: Vec<(MachineId, usize, Symbol)> = Vec::new();
        for (id, m) in machines.iter_mut() {
            let spec = &network.machines[id];
            let every = resolution / u64::from(clocks.speeds[id]);
            if m.halted || !tick.is_multiple_of(every) {
                continue;
            }
            let scanned = m.scan_inputs();
            let Some(idx) = pick_rule(spec, &m.state, &m.scan_work(), &scanned) else {
                log.push(tick, EventKind::Idle { machine: id.clone(), state: m.state.clone() });
                continue;
            };
            let rule = &spec.rules[idx];

            if rule.write.is_blank() {
                m.work.remove(&m.head);
            } else {
                m.work.insert(m.head, rule.write.clone());
            }
            match rule.work_move {
                HeadMove::L if m.head > 0 => m.head -= 1,
                HeadMove::L | HeadMove::S => {}
                HeadMove::R => m.head += 1,
            }

            let mut consumed = Vec::new();
            let mut blanks = Vec::new();
            for (k, mv) in rule.input_moves.iter().enumerate() {
                if let Advance::R = mv {
                    if scanned[k].is_blank() {
                        blanks.push(k);
                    } else {
                        m.tapes[k].1 += 1;
                        consumed.push((k, scanned[k].clone()));
                    }
                }
            }

            let from = m.state.clone();
            m.state = rule.next.clone();
            m.count += 1;
            m.halted = m.state == spec.halt;

            let mut emitted = Vec::new();
            for (port, out) in rule.outputs.iter().enumerate() {
                if let Some(symbol) = out {
                    emitted.push((port, symbol.clone()));
                    outbox.push((id.clone(), port, symbol.clone()));
                }
            }
            log.push(
                tick,
                EventKind::Transition { machine: id.clone(), from, to: rule.next.clone(), rule: idx, consumed, emitted },
            );
            for tape in blanks {
                log.push(tick, EventKind::ReadBlank { machine: id.clone(), tape });
            }
            if m.halted {
                log.push(tick, EventKind::Halt { machine: id.clone() });
            }
        }

        // route and write
        for (machine, port, symbol) in outbox {
            let Some(to) = destination_of(network, &machine, port) else { continue };
            match &to {
                Destination::Tape(t) => machines.get_mut(&t.machine).unwrap().tapes[t.tape].0.push(symbol.clone()),
                Destination::Sink(s) => sinks.get_mut(s).unwrap().push(SinkRecord { tick, symbol: symbol.clone() }),
            }
            log.push(tick, EventKind::Route { machine, port, to, symbol });
        }

        tick += 1;
    };
    log.push(tick, EventKind::Stop { reason });

    let mut finals = BTreeMap::new();
    for (id, m) in machines {
        let extent = m.work.keys().next_back().map_or(0, |k| k + 1);
        let cells = (0..extent).map(|i| m.work.get(&i).cloned().unwrap_or_else(blank)).collect();
        let inputs = m
            .tapes
            .into_iter()
            .map(|(cells, r)| InputTape::from_parts(cells, r).expect("reader never passes writer"))
            .collect();
        finals.insert(
            id.clone(),
            MachineState {
                machine: id,
                current: m.state,
                working: WorkTape::from_parts(cells, m.head),
                inputs,
                halted: m.halted,
                transitions_executed: m.count,
            },
        );
    }

    Ok(RunResult { machines: finals, sinks, log, halt_reason: reason, micro_ticks: tick })
}
