//! Folding a producer `h` and a consumer `m` into one multi-tape machine.
//!
//! The product machine's tapes are `m`'s input tapes (written by `h`'s
//! transitions instead of by a network), `m`'s working tape, `h`'s working
//! tape and one output tape per output port of `m`. One product transition
//! performs one transition of each component, which is exactly what a
//! network does in one global step when both machines run at the same speed.
//!
//! The transition table is built by enumerating every configuration the two
//! components can be in, so the construction is meant for small machines.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::machine::{Alphabet, InputTape, MachineSpec, SpecError, WorkTape};
use crate::symbol::{Advance, HeadMove, Symbol};

/// Producer output port → consumer input tape.
pub type Wiring = BTreeMap<usize, usize>;

/// Upper bound on enumerated table entries.
pub const MAX_TABLE_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("incompatible wiring: {0}")]
    IncompatibleWiring(String),
    #[error(transparent)]
    InvalidComponent(#[from] SpecError),
    #[error("product table would need more than {MAX_TABLE_ENTRIES} entries")]
    TooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    state: usize,
    consumer_work: Symbol,
    producer_work: Symbol,
    scans: Vec<Symbol>,
}

/// Action of one product transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAction {
    pub next: usize,
    pub consumer_write: Symbol,
    pub consumer_move: HeadMove,
    pub producer_write: Symbol,
    pub producer_move: HeadMove,
    /// Reader-head advances on the internal tapes; only set where the scan was non-blank.
    pub input_moves: Vec<Advance>,
    /// Symbol the producer prints on each internal tape this step.
    pub internal_writes: Vec<Option<Symbol>>,
    pub outputs: Vec<Option<Symbol>>,
}

#[derive(Debug, Clone)]
pub struct ProductSpec {
    /// `(consumer state, producer state)` pairs followed by the halting state.
    pub states: Vec<String>,
    pub start: usize,
    pub halt: usize,
    pub num_internal: usize,
    pub num_outputs: usize,
    alphabet: Alphabet,
    table: HashMap<Key, ProductAction>,
}

impl ProductSpec {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn start(&self) -> ProductRun<'_> {
        ProductRun {
            spec: self,
            state: self.start,
            consumer_work: WorkTape::new(),
            producer_work: WorkTape::new(),
            internal: vec![InputTape::new(); self.num_internal],
            outputs: vec![Vec::new(); self.num_outputs],
            steps: 0,
        }
    }
}

/// Execution of a product machine.
#[derive(Debug, Clone)]
pub struct ProductRun<'a> {
    spec: &'a ProductSpec,
    pub state: usize,
    pub consumer_work: WorkTape,
    pub producer_work: WorkTape,
    pub internal: Vec<InputTape>,
    pub outputs: Vec<Vec<Symbol>>,
    pub steps: u64,
}

impl ProductRun<'_> {
    pub fn halted(&self) -> bool {
        self.state == self.spec.halt
    }

    /// Performs one transition; returns false when the machine is halted or
    /// no entry applies.
    pub fn step(&mut self) -> bool {
        if self.halted() {
            return false;
        }
        let key = Key {
            state: self.state,
            consumer_work: self.consumer_work.scan().clone(),
            producer_work: self.producer_work.scan().clone(),
            scans: self.internal.iter().map(|t| t.scan().clone()).collect(),
        };
        let Some(action) = self.spec.table.get(&key) else {
            return false;
        };
        self.state = action.next;
        self.consumer_work.write(action.consumer_write.clone());
        self.consumer_work.shift(action.consumer_move);
        self.producer_work.write(action.producer_write.clone());
        self.producer_work.shift(action.producer_move);
        for (tape, mv) in self.internal.iter_mut().zip(&action.input_moves) {
            if *mv == Advance::R {
                tape.read();
            }
        }
        for (tape, symbol) in self.internal.iter_mut().zip(&action.internal_writes) {
            if let Some(symbol) = symbol {
                tape.write(symbol.clone(), &self.spec.alphabet).expect("producer symbols are checked at construction");
            }
        }
        for (out, symbol) in self.outputs.iter_mut().zip(&action.outputs) {
            if let Some(symbol) = symbol {
                out.push(symbol.clone());
            }
        }
        self.steps += 1;
        true
    }

    /// Runs `steps` global steps (idle steps included).
    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// Stand-in for an absent producer: one state that is already halted.
fn idle_producer() -> MachineSpec {
    MachineSpec {
        id: "-".into(),
        states: BTreeSet::from(["-".to_string()]),
        input_alphabet: BTreeSet::from([Symbol::blank()]),
        tape_alphabet: BTreeSet::from([Symbol::blank()]),
        num_inputs: 0,
        num_outputs: 0,
        start: "-".into(),
        halt: "-".into(),
        speed: 1,
        rules: Vec::new(),
    }
}

fn cartesian(alphabet: &[Symbol], len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Builds the product of consumer `m` and producer `h`.
///
/// `wiring` must send every output port of `h` to a distinct input tape of
/// `m`, and `h` must have no input tapes. Passing `None` for `h` yields a
/// product that behaves like `m` alone.
pub fn compose_product(m: &MachineSpec, h: Option<&MachineSpec>, wiring: &Wiring) -> Result<ProductSpec, ProductError> {
    m.validate()?;
    let phantom = idle_producer();
    let h = match h {
        Some(h) => {
            h.validate()?;
            h
        }
        None if wiring.is_empty() => &phantom,
        None => return Err(ProductError::IncompatibleWiring("wiring given without a producer".into())),
    };
    if h.num_inputs != 0 {
        return Err(ProductError::IncompatibleWiring(format!("producer {} has input tapes", h.id)));
    }
    let mut used = BTreeSet::new();
    for (&port, &tape) in wiring {
        if port >= h.num_outputs {
            return Err(ProductError::IncompatibleWiring(format!("producer has no output port {port}")));
        }
        if tape >= m.num_inputs {
            return Err(ProductError::IncompatibleWiring(format!("consumer has no input tape {tape}")));
        }
        if !used.insert(tape) {
            return Err(ProductError::IncompatibleWiring(format!("input tape {tape} is wired twice")));
        }
    }
    for port in 0..h.num_outputs {
        let symbols = h.port_symbols(port);
        if !wiring.contains_key(&port) && !symbols.is_empty() {
            return Err(ProductError::IncompatibleWiring(format!("producer port {port} emits but is not wired")));
        }
        if let Some(s) = symbols.iter().find(|s| s.is_blank() || !m.tape_alphabet.contains(**s)) {
            return Err(ProductError::IncompatibleWiring(format!("consumer cannot accept {s} from port {port}")));
        }
    }

    let m_states: Vec<&String> = m.states.iter().collect();
    let h_states: Vec<&String> = h.states.iter().collect();
    let pair = |i: usize, j: usize| i * h_states.len() + j;
    let halt = m_states.len() * h_states.len();
    let mut states: Vec<String> = Vec::with_capacity(halt + 1);
    for qm in &m_states {
        for qh in &h_states {
            states.push(format!("({qm},{qh})"));
        }
    }
    states.push("halt".into());
    let m_index: HashMap<&str, usize> = m_states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let h_index: HashMap<&str, usize> = h_states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let resolve = |qm: &str, qh: &str| {
        if qm == m.halt && qh == h.halt {
            halt
        } else {
            pair(m_index[qm], h_index[qh])
        }
    };

    let m_symbols: Vec<Symbol> = m.tape_alphabet.iter().cloned().collect();
    let h_symbols: Vec<Symbol> = h.tape_alphabet.iter().cloned().collect();
    let entries = halt
        .saturating_mul(m_symbols.len())
        .saturating_mul(h_symbols.len())
        .saturating_mul(m_symbols.len().saturating_pow(m.num_inputs as u32));
    if entries > MAX_TABLE_ENTRIES {
        return Err(ProductError::TooLarge);
    }
    let scan_space = cartesian(&m_symbols, m.num_inputs);

    let mut table = HashMap::new();
    for qm in &m_states {
        for qh in &h_states {
            let m_live = **qm != m.halt;
            let h_live = **qh != h.halt;
            if !m_live && !h_live {
                continue;
            }
            for mw in &m_symbols {
                for hw in &h_symbols {
                    let h_rule = h_live.then(|| h.find_rule(qh, hw, &[])).flatten().map(|i| &h.rules[i]);
                    for scans in &scan_space {
                        let m_rule = m_live.then(|| m.find_rule(qm, mw, scans)).flatten().map(|i| &m.rules[i]);
                        if m_rule.is_none() && h_rule.is_none() {
                            continue;
                        }
                        let mut internal_writes = vec![None; m.num_inputs];
                        if let Some(r) = h_rule {
                            for (&port, &tape) in wiring {
                                internal_writes[tape] = r.outputs[port].clone();
                            }
                        }
                        let action = ProductAction {
                            next: resolve(
                                m_rule.map_or(qm.as_str(), |r| r.next.as_str()),
                                h_rule.map_or(qh.as_str(), |r| r.next.as_str()),
                            ),
                            consumer_write: m_rule.map_or_else(|| mw.clone(), |r| r.write.clone()),
                            consumer_move: m_rule.map_or(HeadMove::S, |r| r.work_move),
                            producer_write: h_rule.map_or_else(|| hw.clone(), |r| r.write.clone()),
                            producer_move: h_rule.map_or(HeadMove::S, |r| r.work_move),
                            input_moves: match m_rule {
                                Some(r) => r
                                    .input_moves
                                    .iter()
                                    .zip(scans)
                                    .map(|(mv, s)| if s.is_blank() { Advance::S } else { *mv })
                                    .collect(),
                                None => vec![Advance::S; m.num_inputs],
                            },
                            internal_writes,
                            outputs: m_rule.map_or_else(|| vec![None; m.num_outputs], |r| r.outputs.clone()),
                        };
                        let key = Key {
                            state: pair(m_index[qm.as_str()], h_index[qh.as_str()]),
                            consumer_work: mw.clone(),
                            producer_work: hw.clone(),
                            scans: scans.clone(),
                        };
                        table.insert(key, action);
                    }
                }
            }
        }
    }

    Ok(ProductSpec {
        states,
        start: resolve(&m.start, &h.start),
        halt,
        num_internal: m.num_inputs,
        num_outputs: m.num_outputs,
        alphabet: m.tape_alphabet.clone(),
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn producer_ab() -> MachineSpec {
        serde_json::from_str(
            r#"{
                "id": "h", "states": ["p0", "p1", "pf"],
                "input_alphabet": ["_"], "tape_alphabet": ["_", "a", "b"],
                "num_inputs": 0, "num_outputs": 1, "start": "p0", "halt": "pf",
                "rules": [
                    {"state": "p0", "work": "*", "inputs": [], "next": "p1",
                     "write": "_", "move": "S", "input_moves": [], "outputs": ["a"]},
                    {"state": "p1", "work": "*", "inputs": [], "next": "pf",
                     "write": "_", "move": "S", "input_moves": [], "outputs": ["b"]}
                ]
            }"#,
        )
        .unwrap()
    }

    fn copier() -> MachineSpec {
        serde_json::from_str(
            r#"{
                "id": "m", "states": ["q0", "qf"],
                "input_alphabet": ["_", "a", "b"], "tape_alphabet": ["_", "a", "b"],
                "num_inputs": 1, "num_outputs": 1, "start": "q0", "halt": "qf",
                "rules": [
                    {"state": "q0", "work": "*", "inputs": ["a"], "next": "q0",
                     "write": "a", "move": "R", "input_moves": ["R"], "outputs": ["a"]},
                    {"state": "q0", "work": "*", "inputs": ["b"], "next": "q0",
                     "write": "b", "move": "R", "input_moves": ["R"], "outputs": ["b"]}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn state_count_is_product_plus_halt() {
        let p = compose_product(&copier(), Some(&producer_ab()), &Wiring::from([(0, 0)])).unwrap();
        assert_eq!(p.state_count(), 2 * 3 + 1);
        assert_eq!(p.states[p.start], "(q0,p0)");
    }

    #[test]
    fn copies_producer_output() {
        let p = compose_product(&copier(), Some(&producer_ab()), &Wiring::from([(0, 0)])).unwrap();
        let mut run = p.start();
        run.run(20);
        let ab: Vec<Symbol> = ["a", "b"].iter().map(|s| Symbol::new(*s).unwrap()).collect();
        assert_eq!(run.outputs, vec![ab.clone()]);
        assert_eq!(run.internal[0].cells(), ab.as_slice());
        assert_eq!(run.internal[0].read_head(), 2);
        assert_eq!(run.consumer_work.cells(), ab.as_slice());
    }

    #[test]
    fn wiring_errors() {
        let (m, h) = (copier(), producer_ab());
        for wiring in [Wiring::from([(1, 0)]), Wiring::from([(0, 3)]), Wiring::new()] {
            assert!(matches!(compose_product(&m, Some(&h), &wiring), Err(ProductError::IncompatibleWiring(_))));
        }
        let mut narrow = copier();
        narrow.tape_alphabet.remove(&Symbol::new("b").unwrap());
        narrow.input_alphabet.remove(&Symbol::new("b").unwrap());
        narrow.rules.pop();
        assert!(matches!(
            compose_product(&narrow, Some(&h), &Wiring::from([(0, 0)])),
            Err(ProductError::IncompatibleWiring(_))
        ));
    }

    #[test]
    fn absent_producer() {
        let p = compose_product(&copier(), None, &Wiring::new()).unwrap();
        assert_eq!(p.state_count(), 2 + 1);
        let mut run = p.start();
        assert!(!run.step());
    }
}
