use std::collections::BTreeSet;

use crate::machine::{MachineId, MachineSpec, TransitionRule};
use crate::symbol::{Advance, HeadMove, Pattern, Symbol};

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

/// Single-state machine over `{_} ∪ symbols`. With inputs it forwards every
/// symbol read from tape 0 to all outputs; without inputs it emits the first
/// symbol on every output forever.
pub fn passthrough(id: &str, inputs: usize, outputs: usize, symbols: &[&str]) -> MachineSpec {
    let alphabet: BTreeSet<Symbol> = std::iter::once(Symbol::blank()).chain(symbols.iter().map(|s| sym(s))).collect();
    let rule = |input: Option<Symbol>, out: Option<Symbol>| TransitionRule {
        state: "q0".into(),
        work: Pattern::Any,
        inputs: (0..inputs)
            .map(|k| if k == 0 { input.clone().map_or(Pattern::Any, Pattern::Exact) } else { Pattern::Any })
            .collect(),
        next: "q0".into(),
        write: Symbol::blank(),
        work_move: HeadMove::S,
        input_moves: (0..inputs).map(|k| if k == 0 { Advance::R } else { Advance::S }).collect(),
        outputs: vec![out; outputs],
    };
    let rules = if inputs > 0 {
        symbols.iter().map(|s| rule(Some(sym(s)), Some(sym(s)))).collect()
    } else if let Some(first) = symbols.first() {
        vec![rule(None, Some(sym(first)))]
    } else {
        Vec::new()
    };
    MachineSpec {
        id: MachineId::from(id),
        states: ["q0", "qf"].into_iter().map(String::from).collect(),
        input_alphabet: alphabet.clone(),
        tape_alphabet: alphabet,
        num_inputs: inputs,
        num_outputs: outputs,
        start: "q0".into(),
        halt: "qf".into(),
        speed: 1,
        rules,
    }
}
