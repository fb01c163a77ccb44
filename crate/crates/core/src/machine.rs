//! Single networked Turing machine: static description, tapes and the
//! one-transition semantics.
//!
//! A machine owns one working tape and `num_inputs` input tapes. Each input
//! tape has two heads: the writer head is driven by whoever is wired to the
//! tape, the reader head by this machine's rules. Rules match on the current
//! state, the working-tape symbol and the vector of symbols under the input
//! reader heads; they emit at most one symbol per output port.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol::{Advance, HeadMove, Pattern, Symbol};

pub type StateId = String;
pub type Alphabet = BTreeSet<Symbol>;

/// Identifier of a machine within a network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MachineId(pub String);

impl MachineId {
    pub fn new(id: impl Into<String>) -> Self {
        MachineId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MachineId {
    fn from(s: &str) -> Self {
        MachineId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub state: StateId,
    pub work: Pattern,
    pub inputs: Vec<Pattern>,
    pub next: StateId,
    pub write: Symbol,
    #[serde(rename = "move")]
    pub work_move: HeadMove,
    pub input_moves: Vec<Advance>,
    /// One entry per output port; `None` means no emission (head stands still).
    pub outputs: Vec<Option<Symbol>>,
}

impl TransitionRule {
    /// Number of concrete (non-wildcard) entries on the left-hand side.
    pub fn specificity(&self) -> usize {
        usize::from(self.work.is_concrete()) + self.inputs.iter().filter(|p| p.is_concrete()).count()
    }

    pub fn matches(&self, state: &str, work: &Symbol, scanned: &[Symbol]) -> bool {
        self.state == state
            && self.work.matches(work)
            && self.inputs.len() == scanned.len()
            && self.inputs.iter().zip(scanned).all(|(p, s)| p.matches(s))
    }
}

fn default_speed() -> u32 {
    1
}

/// Static description of one machine: the six-tuple plus arities and speed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub id: MachineId,
    pub states: BTreeSet<StateId>,
    pub input_alphabet: Alphabet,
    pub tape_alphabet: Alphabet,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub start: StateId,
    pub halt: StateId,
    /// Transitions per global time step.
    #[serde(default = "default_speed")]
    pub speed: u32,
    pub rules: Vec<TransitionRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("machine {machine}: start state {state:?} is not in Q")]
    StartNotInStates { machine: MachineId, state: StateId },
    #[error("machine {machine}: halt state {state:?} is not in Q")]
    HaltNotInStates { machine: MachineId, state: StateId },
    #[error("machine {machine}: input alphabet lacks the blank symbol")]
    BlankMissing { machine: MachineId },
    #[error("machine {machine}: input symbol {symbol} is not in the tape alphabet")]
    InputNotInTapeAlphabet { machine: MachineId, symbol: Symbol },
    #[error("machine {machine}: speed must be positive")]
    ZeroSpeed { machine: MachineId },
    #[error("machine {machine}, rule {rule}: unknown state {state:?}")]
    UnknownState { machine: MachineId, rule: usize, state: StateId },
    #[error("machine {machine}, rule {rule}: symbol {symbol} is not in the tape alphabet")]
    UnknownSymbol { machine: MachineId, rule: usize, symbol: Symbol },
    #[error("machine {machine}, rule {rule}: {field} has length {found}, expected {expected}")]
    Arity {
        machine: MachineId,
        rule: usize,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("machine {machine}, rule {rule}: input {tape} moves right on a blank scan")]
    AdvanceOnBlank { machine: MachineId, rule: usize, tape: usize },
    #[error("machine {machine}: rules {first} and {second} have identical left-hand sides")]
    DuplicatePattern { machine: MachineId, first: usize, second: usize },
}

impl MachineSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let machine = || self.id.clone();
        if !self.states.contains(&self.start) {
            return Err(SpecError::StartNotInStates { machine: machine(), state: self.start.clone() });
        }
        if !self.states.contains(&self.halt) {
            return Err(SpecError::HaltNotInStates { machine: machine(), state: self.halt.clone() });
        }
        if !self.input_alphabet.contains(&Symbol::blank()) {
            return Err(SpecError::BlankMissing { machine: machine() });
        }
        if let Some(symbol) = self.input_alphabet.difference(&self.tape_alphabet).next() {
            return Err(SpecError::InputNotInTapeAlphabet { machine: machine(), symbol: symbol.clone() });
        }
        if self.speed == 0 {
            return Err(SpecError::ZeroSpeed { machine: machine() });
        }

        let mut seen: HashMap<(&str, &Pattern, &[Pattern]), usize> = HashMap::new();
        for (idx, rule) in self.rules.iter().enumerate() {
            for state in [&rule.state, &rule.next] {
                if !self.states.contains(state) {
                    return Err(SpecError::UnknownState { machine: machine(), rule: idx, state: state.clone() });
                }
            }
            let arity = |field, expected, found| {
                if expected == found {
                    Ok(())
                } else {
                    Err(SpecError::Arity { machine: machine(), rule: idx, field, expected, found })
                }
            };
            arity("inputs", self.num_inputs, rule.inputs.len())?;
            arity("input_moves", self.num_inputs, rule.input_moves.len())?;
            arity("outputs", self.num_outputs, rule.outputs.len())?;

            let symbols = rule
                .work
                .symbol()
                .into_iter()
                .chain(rule.inputs.iter().filter_map(Pattern::symbol))
                .chain(std::iter::once(&rule.write))
                .chain(rule.outputs.iter().flatten());
            for symbol in symbols {
                if !self.tape_alphabet.contains(symbol) {
                    return Err(SpecError::UnknownSymbol { machine: machine(), rule: idx, symbol: symbol.clone() });
                }
            }
            for (tape, (pattern, mv)) in rule.inputs.iter().zip(&rule.input_moves).enumerate() {
                if *mv == Advance::R && pattern.symbol().is_some_and(Symbol::is_blank) {
                    return Err(SpecError::AdvanceOnBlank { machine: machine(), rule: idx, tape });
                }
            }
            if let Some(first) = seen.insert((rule.state.as_str(), &rule.work, &rule.inputs), idx) {
                return Err(SpecError::DuplicatePattern { machine: machine(), first, second: idx });
            }
        }
        Ok(())
    }

    /// Index of the rule that fires for this configuration, if any.
    ///
    /// The most specific matching rule wins; among equally specific matches
    /// the earliest in the rule list wins.
    pub fn find_rule(&self, state: &str, work: &Symbol, scanned: &[Symbol]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (idx, rule) in self.rules.iter().enumerate() {
            if !rule.matches(state, work, scanned) {
                continue;
            }
            let spec = rule.specificity();
            if best.is_none_or(|(_, s)| spec > s) {
                best = Some((idx, spec));
            }
        }
        best.map(|(idx, _)| idx)
    }

    /// Symbols this machine may ever emit on `port`.
    pub fn port_symbols(&self, port: usize) -> BTreeSet<&Symbol> {
        self.rules.iter().filter_map(|r| r.outputs.get(port)?.as_ref()).collect()
    }

    /// Executes one transition. The scanned vector must be the symbols under
    /// the reader heads of `state`'s input tapes.
    pub fn step(&self, state: &mut MachineState, scanned: &[Symbol]) -> Result<StepOutcome, StepError> {
        if state.halted {
            return Err(StepError::AlreadyHalted(self.id.clone()));
        }
        if scanned.len() != self.num_inputs {
            return Err(StepError::ScanArity { expected: self.num_inputs, found: scanned.len() });
        }
        let work = state.working.scan().clone();
        let Some(idx) = self.find_rule(&state.current, &work, scanned) else {
            return Ok(StepOutcome {
                fired: None,
                consumed: Vec::new(),
                read_blank: Vec::new(),
                emissions: vec![None; self.num_outputs],
                halted: false,
            });
        };
        let rule = &self.rules[idx];

        state.working.write(rule.write.clone());
        state.working.shift(rule.work_move);

        let mut consumed = Vec::new();
        let mut read_blank = Vec::new();
        for (k, mv) in rule.input_moves.iter().enumerate() {
            if *mv == Advance::S {
                continue;
            }
            let tape = &mut state.inputs[k];
            debug_assert_eq!(tape.scan(), &scanned[k]);
            let symbol = tape.read();
            if symbol.is_blank() {
                read_blank.push(k);
            } else {
                consumed.push((k, symbol));
            }
        }

        let from = std::mem::replace(&mut state.current, rule.next.clone());
        state.transitions_executed += 1;
        state.halted = state.current == self.halt;
        Ok(StepOutcome {
            fired: Some(FiredRule { rule: idx, from, to: rule.next.clone() }),
            consumed,
            read_blank,
            emissions: rule.outputs.clone(),
            halted: state.halted,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("machine {0} has already halted")]
    AlreadyHalted(MachineId),
    #[error("scanned vector has length {found}, machine has {expected} input tapes")]
    ScanArity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapeError {
    #[error("symbol {0} is not in the tape alphabet")]
    SymbolNotInAlphabet(Symbol),
    #[error("the blank symbol cannot be written to an input tape")]
    BlankWriteRejected,
}

/// Two-headed input tape.
///
/// Cells at and beyond the writer head are blank, so only the written prefix
/// is stored; `write_head` is its length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputTape {
    cells: Vec<Symbol>,
    read_head: usize,
}

impl InputTape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a tape from its written cells and reader position.
    pub fn from_parts(cells: Vec<Symbol>, read_head: usize) -> Option<Self> {
        (read_head <= cells.len() && !cells.iter().any(Symbol::is_blank)).then_some(InputTape { cells, read_head })
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn write_head(&self) -> usize {
        self.cells.len()
    }

    pub fn read_head(&self) -> usize {
        self.read_head
    }

    /// Writer head prints `symbol` and moves right.
    pub fn write(&mut self, symbol: Symbol, alphabet: &Alphabet) -> Result<(), TapeError> {
        if symbol.is_blank() {
            return Err(TapeError::BlankWriteRejected);
        }
        if !alphabet.contains(&symbol) {
            return Err(TapeError::SymbolNotInAlphabet(symbol));
        }
        self.cells.push(symbol);
        Ok(())
    }

    /// Symbol under the reader head.
    pub fn scan(&self) -> &Symbol {
        static BLANK: std::sync::OnceLock<Symbol> = std::sync::OnceLock::new();
        self.cells
            .get(self.read_head)
            .unwrap_or_else(|| BLANK.get_or_init(Symbol::blank))
    }

    /// Reader head reads; it stands still on blank and otherwise moves right.
    pub fn read(&mut self) -> Symbol {
        match self.cells.get(self.read_head) {
            Some(s) => {
                self.read_head += 1;
                s.clone()
            }
            None => Symbol::blank(),
        }
    }

    /// Symbols written but not yet read.
    pub fn pending(&self) -> &[Symbol] {
        &self.cells[self.read_head..]
    }
}

/// One-way infinite working tape. Trailing blanks are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkTape {
    cells: Vec<Symbol>,
    head: usize,
}

impl WorkTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(mut cells: Vec<Symbol>, head: usize) -> Self {
        while cells.last().is_some_and(Symbol::is_blank) {
            cells.pop();
        }
        WorkTape { cells, head }
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn scan(&self) -> &Symbol {
        static BLANK: std::sync::OnceLock<Symbol> = std::sync::OnceLock::new();
        self.cells.get(self.head).unwrap_or_else(|| BLANK.get_or_init(Symbol::blank))
    }

    pub fn write(&mut self, symbol: Symbol) {
        if self.head < self.cells.len() {
            self.cells[self.head] = symbol;
        } else if !symbol.is_blank() {
            self.cells.resize(self.head, Symbol::blank());
            self.cells.push(symbol);
        }
        while self.cells.last().is_some_and(Symbol::is_blank) {
            self.cells.pop();
        }
    }

    pub fn shift(&mut self, mv: HeadMove) {
        match mv {
            HeadMove::L => self.head = self.head.saturating_sub(1),
            HeadMove::R => self.head += 1,
            HeadMove::S => {}
        }
    }
}

/// Runtime configuration of one machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineState {
    pub machine: MachineId,
    pub current: StateId,
    pub working: WorkTape,
    pub inputs: Vec<InputTape>,
    pub halted: bool,
    pub transitions_executed: u64,
}

impl MachineState {
    pub fn new(spec: &MachineSpec) -> Self {
        MachineState {
            machine: spec.id.clone(),
            current: spec.start.clone(),
            working: WorkTape::new(),
            inputs: vec![InputTape::new(); spec.num_inputs],
            halted: spec.start == spec.halt,
            transitions_executed: 0,
        }
    }

    pub fn scanned(&self) -> Vec<Symbol> {
        self.inputs.iter().map(|t| t.scan().clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiredRule {
    pub rule: usize,
    pub from: StateId,
    pub to: StateId,
}

/// Result of one call to [`MachineSpec::step`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    /// `None` when no rule matched and the machine idled.
    pub fired: Option<FiredRule>,
    /// Input tapes whose reader head advanced, with the symbol read.
    pub consumed: Vec<(usize, Symbol)>,
    /// Input tapes the rule asked to advance while the scan was blank.
    pub read_blank: Vec<usize>,
    pub emissions: Vec<Option<Symbol>>,
    pub halted: bool,
}

impl StepOutcome {
    pub fn is_idle(&self) -> bool {
        self.fired.is_none()
    }
}
