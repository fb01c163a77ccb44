#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use ntm::machine::MachineSpec;
use ntm::network::{Connection, SinkBinding, SourceBinding};
use ntm::product::Wiring;
use ntm::{Advance, ClockConfig, HeadMove, Injection, Network, Pattern, PortRef, Schedules, Symbol, TapeRef, TransitionRule};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

/// A stream of pre-drawn numbers that structured generators consume; the
/// numbers come from proptest so failing cases shrink and replay.
#[derive(Debug, Clone)]
pub struct Choices {
    values: Vec<u32>,
    at: usize,
}

impl Choices {
    pub fn new(values: Vec<u32>) -> Self {
        assert!(!values.is_empty());
        Choices { values, at: 0 }
    }

    pub fn below(&mut self, n: usize) -> usize {
        let v = self.values[self.at % self.values.len()];
        self.at += 1;
        v as usize % n.max(1)
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

pub fn choices() -> impl Strategy<Value = Choices> {
    prop::collection::vec(any::<u32>(), 256..=256).prop_map(Choices::new)
}

pub const SYMBOLS: [&str; 3] = ["a", "b", "c"];

/// Random machine with at most `max_states` states over `_` plus `symbols`.
pub fn random_machine(c: &mut Choices, id: &str, symbols: &[Symbol], inputs: usize, outputs: usize, max_states: usize) -> MachineSpec {
    let n_states = 2 + c.below(max_states - 1);
    let states: Vec<String> = (0..n_states).map(|i| format!("q{i}")).collect();
    let halt = states[n_states - 1].clone();
    let gamma: Vec<Symbol> = std::iter::once(Symbol::blank()).chain(symbols.iter().cloned()).collect();

    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..c.below(10) {
        let state = c.pick(&states[..n_states - 1]).clone();
        let work = if c.chance(50) { Pattern::Any } else { Pattern::Exact(c.pick(&gamma).clone()) };
        let patterns: Vec<Pattern> =
            (0..inputs).map(|_| if c.chance(40) { Pattern::Any } else { Pattern::Exact(c.pick(&gamma).clone()) }).collect();
        let input_moves = patterns
            .iter()
            .map(|p| match p.symbol() {
                Some(s) if s.is_blank() => Advance::S,
                _ if c.chance(70) => Advance::R,
                _ => Advance::S,
            })
            .collect();
        if !seen.insert((state.clone(), format!("{work:?}"), format!("{patterns:?}"))) {
            continue;
        }
        rules.push(TransitionRule {
            state,
            work,
            inputs: patterns,
            next: c.pick(&states).clone(),
            write: c.pick(&gamma).clone(),
            work_move: *c.pick(&[HeadMove::L, HeadMove::R, HeadMove::S]),
            input_moves,
            outputs: (0..outputs).map(|_| c.chance(60).then(|| c.pick(symbols).clone())).collect(),
        });
    }
    let alphabet: BTreeSet<Symbol> = gamma.into_iter().collect();
    MachineSpec {
        id: id.into(),
        states: states.iter().cloned().collect(),
        input_alphabet: alphabet.clone(),
        tape_alphabet: alphabet,
        num_inputs: inputs,
        num_outputs: outputs,
        start: "q0".into(),
        halt,
        speed: 1,
        rules,
    }
}

pub struct Case {
    pub network: Network,
    pub schedules: Schedules,
    pub clocks: ClockConfig,
    pub budget: u64,
}

/// Random valid network: ≤4 machines, ≤4 states, ≤3 symbols, ≤30 steps.
pub fn random_case(c: &mut Choices) -> Case {
    let symbols: Vec<Symbol> = SYMBOLS[..1 + c.below(3)].iter().map(|s| sym(s)).collect();
    let n = 1 + c.below(4);
    let mut network = Network::new();
    for i in 0..n {
        let inputs = c.below(3);
        let outputs = if inputs == 0 { 1 + c.below(2) } else { c.below(3) };
        let spec = random_machine(c, &format!("m{i}"), &symbols, inputs, outputs, 4);
        network.add_machine(spec).unwrap();
    }

    let mut free: Vec<TapeRef> = network
        .machines
        .values()
        .flat_map(|m| (0..m.num_inputs).map(move |k| TapeRef::new(m.id.as_str(), k)))
        .collect();
    let ports: Vec<PortRef> = network
        .machines
        .values()
        .flat_map(|m| (0..m.num_outputs).map(move |p| PortRef::new(m.id.as_str(), p)))
        .collect();
    for (i, port) in ports.into_iter().enumerate() {
        if !free.is_empty() && c.chance(60) {
            let to = free.remove(c.below(free.len()));
            network.connections.push(Connection { from: port, to });
        } else {
            network.sinks.push(SinkBinding { id: format!("out{i}"), from: port });
        }
    }

    let mut schedules = Schedules::new();
    let connected: BTreeSet<String> = network
        .connections
        .iter()
        .flat_map(|c| [c.from.machine.to_string(), c.to.machine.to_string()])
        .chain(network.sinks.iter().map(|s| s.from.machine.to_string()))
        .collect();
    for (i, tape) in free.into_iter().enumerate() {
        let isolated = !connected.contains(tape.machine.as_str()) && !network.sources.iter().any(|s| s.to.machine == tape.machine);
        if !isolated && !c.chance(60) {
            continue;
        }
        let id = format!("in{i}");
        let mut entries: Vec<Injection> = (0..c.below(7))
            .map(|_| Injection::new(c.below(10) as u64, c.below(3) as u64, c.pick(&symbols).clone()))
            .collect();
        entries.sort_by_key(|e| (e.at, e.offset));
        schedules.insert(id.clone(), entries);
        network.sources.push(SourceBinding { id, to: tape });
    }

    let mut clocks = ClockConfig::default();
    for id in network.machines.keys() {
        clocks = clocks.with_speed(id.clone(), 1 + c.below(3) as u32);
    }
    let budget = 1 + c.below(30) as u64;
    assert!(network.validate().is_valid(), "{:?}", network.validate());
    Case { network, schedules, clocks, budget }
}

pub struct Pair {
    pub producer: MachineSpec,
    pub consumer: MachineSpec,
    pub wiring: Wiring,
    pub network: Network,
    pub steps: u64,
}

/// Input-less producer `h` feeding consumer `m`, whose outputs go to sinks
/// `out0`, `out1`, ...
pub fn random_pair(c: &mut Choices) -> Pair {
    let symbols: Vec<Symbol> = SYMBOLS[..1 + c.below(3)].iter().map(|s| sym(s)).collect();
    let h_outputs = 1 + c.below(2);
    let m_inputs = h_outputs + c.below(2);
    let m_outputs = 1 + c.below(2);
    let producer = random_machine(c, "h", &symbols, 0, h_outputs, 4);
    let consumer = random_machine(c, "m", &symbols, m_inputs, m_outputs, 4);
    let wiring: Wiring = (0..h_outputs).map(|p| (p, p)).collect();

    let mut network = Network::new();
    network.add_machine(producer.clone()).unwrap();
    network.add_machine(consumer.clone()).unwrap();
    for (&port, &tape) in &wiring {
        network.connections.push(Connection { from: PortRef::new("h", port), to: TapeRef::new("m", tape) });
    }
    for p in 0..m_outputs {
        network.sinks.push(SinkBinding { id: format!("out{p}"), from: PortRef::new("m", p) });
    }
    let steps = 1 + c.below(30) as u64;
    Pair { producer, consumer, wiring, network, steps }
}

/// Every bundled network fixture, with its trace merged in when one exists.
pub fn network_fixtures() -> Vec<(String, Network, Schedules)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture(""))
        .unwrap()
        .filter_map(|e| e.unwrap().file_name().into_string().ok())
        .filter_map(|n| n.strip_suffix(".net.json").map(str::to_string))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let (network, mut schedules) = ntm::io::load_network(&fixture(&format!("{name}.net.json"))).unwrap();
            let trace_path = fixture(&format!("{name}.trace.json"));
            if !trace_path.exists() {
                return (name, network, schedules);
            }
            let trace = ntm::io::load_trace(&trace_path).unwrap();
            let encoding = ntm::context::Encoding::default();
            let prepared = ntm::context::prepare_network(&network, &trace, &encoding).unwrap();
            schedules.extend(ntm::context::encode_trace(&trace, &prepared, &encoding, None).unwrap());
            (name, prepared, schedules)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum TapeOp {
    Write(usize),
    Read,
    Scan,
}

/// Index into `["_", "a", "b", "c", "z"]`; `z` is outside the alphabet.
pub const TAPE_SYMBOLS: [&str; 5] = ["_", "a", "b", "c", "z"];

pub fn tape_ops() -> impl Strategy<Value = Vec<TapeOp>> {
    let op = prop_oneof![
        3 => (0..TAPE_SYMBOLS.len()).prop_map(TapeOp::Write),
        3 => Just(TapeOp::Read),
        1 => Just(TapeOp::Scan),
    ];
    prop::collection::vec(op, 0..64)
}

/// FIFO order against a queue model, blank reads that change nothing, and
/// heads that only move right with the reader never passing the writer.
pub fn check_tape_law(ops: &[TapeOp]) -> Result<(), String> {
    use ntm::machine::TapeError;
    use std::collections::VecDeque;

    let alphabet: BTreeSet<Symbol> = TAPE_SYMBOLS[..4].iter().map(|s| sym(s)).collect();
    let mut tape = ntm::InputTape::new();
    let mut model: VecDeque<Symbol> = VecDeque::new();
    for (i, op) in ops.iter().enumerate() {
        let before = tape.clone();
        match op {
            TapeOp::Write(k) => {
                let s = sym(TAPE_SYMBOLS[*k]);
                match tape.write(s.clone(), &alphabet) {
                    Ok(()) if !s.is_blank() && alphabet.contains(&s) => model.push_back(s),
                    Err(TapeError::BlankWriteRejected) if s.is_blank() => {}
                    Err(TapeError::SymbolNotInAlphabet(_)) if !alphabet.contains(&s) => {}
                    other => return Err(format!("op {i}: writing {s} gave {other:?}")),
                }
            }
            TapeOp::Read => {
                let got = tape.read();
                match model.pop_front() {
                    Some(expected) if got == expected => {}
                    None if got.is_blank() => {
                        if tape != before {
                            return Err(format!("op {i}: blank read changed the tape"));
                        }
                        if !tape.read().is_blank() || tape != before {
                            return Err(format!("op {i}: second blank read differs"));
                        }
                    }
                    expected => return Err(format!("op {i}: read {got}, expected {expected:?}")),
                }
            }
            TapeOp::Scan => {
                let expected = model.front().cloned().unwrap_or_else(Symbol::blank);
                if *tape.scan() != expected || tape != before {
                    return Err(format!("op {i}: scan gave {}, expected {expected}", tape.scan()));
                }
            }
        }
        if tape.read_head() < before.read_head() || tape.write_head() < before.write_head() {
            return Err(format!("op {i}: a head moved left"));
        }
        if tape.read_head() > tape.write_head() {
            return Err(format!("op {i}: reader passed the writer"));
        }
        if tape.pending() != model.iter().cloned().collect::<Vec<_>>().as_slice() {
            return Err(format!("op {i}: pending cells differ from the queue model"));
        }
    }
    Ok(())
}

/// Machine that fires on every tick and never halts.
pub fn spinner(id: &str) -> MachineSpec {
    let alphabet: BTreeSet<Symbol> = [Symbol::blank(), sym("a")].into();
    MachineSpec {
        id: id.into(),
        states: ["q0".to_string(), "qf".to_string()].into(),
        input_alphabet: alphabet.clone(),
        tape_alphabet: alphabet,
        num_inputs: 0,
        num_outputs: 1,
        start: "q0".into(),
        halt: "qf".into(),
        speed: 1,
        rules: vec![TransitionRule {
            state: "q0".into(),
            work: Pattern::Any,
            inputs: vec![],
            next: "q0".into(),
            write: sym("a"),
            work_move: HeadMove::R,
            input_moves: vec![],
            outputs: vec![None],
        }],
    }
}

/// Transition counts of two always-busy machines `b` and `c` after `steps`
/// global steps at speeds `sb` and `sc`.
pub fn speed_counts(sb: u32, sc: u32, steps: u64) -> (u64, u64) {
    let mut network = Network::new();
    network.add_machine(spinner("b")).unwrap();
    network.add_machine(spinner("c")).unwrap();
    network.sinks.push(SinkBinding { id: "b_out".into(), from: PortRef::new("b", 0) });
    network.sinks.push(SinkBinding { id: "c_out".into(), from: PortRef::new("c", 0) });
    let clocks = ClockConfig::default().with_speed("b", sb).with_speed("c", sc);
    let result = ntm::run(&network, &clocks, &Schedules::new(), steps).unwrap();
    let count = |id: &str| result.machines[&ntm::MachineId::from(id)].transitions_executed;
    (count("b"), count("c"))
}

/// `run` and `run_reference` agree on everything, errors included.
pub fn check_dual(network: &Network, clocks: &ClockConfig, schedules: &Schedules, budget: u64) -> Result<(), String> {
    let fast = ntm::run(network, clocks, schedules, budget);
    let slow = ntm::run_reference(network, clocks, schedules, budget);
    if fast == slow {
        Ok(())
    } else {
        Err(format!("run and run_reference differ:\n{fast:?}\n{slow:?}"))
    }
}

/// The product machine's output tapes equal the network's sink streams.
pub fn check_pair(pair: &Pair) -> Result<(), String> {
    let product = ntm::product::compose_product(&pair.consumer, Some(&pair.producer), &pair.wiring)
        .map_err(|e| format!("compose_product: {e}"))?;
    let mut machine = product.start();
    machine.run(pair.steps);
    let clocks = ClockConfig::for_network(&pair.network);
    let result = ntm::run(&pair.network, &clocks, &Schedules::new(), pair.steps).map_err(|e| format!("run: {e}"))?;
    for (p, tape) in machine.outputs.iter().enumerate() {
        let stream = result.sink_stream(&format!("out{p}"));
        if *tape != stream {
            return Err(format!("port {p}: product {tape:?}, network {stream:?}"));
        }
    }
    Ok(())
}
