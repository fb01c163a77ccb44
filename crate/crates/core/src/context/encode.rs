use std::collections::BTreeSet;

use thiserror::Error;

use crate::context::{ContextTrace, TraceError};
use crate::network::{Injection, Network, Schedules, SourceBinding, WireError};
use crate::symbol::Symbol;

pub const DEFAULT_DELIMITER: &str = "#";

/// How evaluation values become tape symbols: one symbol per character,
/// followed by the delimiter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub delimiter: Symbol,
}

impl Default for Encoding {
    fn default() -> Self {
        Encoding { delimiter: Symbol::new(DEFAULT_DELIMITER).expect("valid token") }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("vector {vector:?} at step {time}: character {character:?} has no symbol in {machine}'s alphabet")]
    UnencodableValue { vector: String, time: u64, character: String, machine: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("cannot attach vector {vector:?} as a source: {source}")]
    Attach { vector: String, source: WireError },
}

/// Copy of `network` with the delimiter added to the alphabets of every
/// machine a vector is bound to, and a source (named after the vector)
/// attached for every input binding.
pub fn prepare_network(network: &Network, trace: &ContextTrace, encoding: &Encoding) -> Result<Network, EncodeError> {
    trace.validate(Some(network))?;
    let mut out = network.clone();
    for (vector, tape) in &trace.bindings_in {
        let spec = out.machines.get_mut(&tape.machine).expect("validated binding");
        spec.input_alphabet.insert(encoding.delimiter.clone());
        spec.tape_alphabet.insert(encoding.delimiter.clone());
        let existing = out.sources.iter().find(|s| &s.id == vector);
        match existing {
            Some(SourceBinding { to, .. }) if to == tape => {}
            _ => out
                .attach_source(vector.clone(), tape.clone())
                .map_err(|source| EncodeError::Attach { vector: vector.clone(), source })?,
        }
    }
    Ok(out)
}

/// Injection schedules for every bound vector, or only those in `only`.
///
/// The symbols of the evaluation at step `t` are injected on consecutive
/// micro-ticks starting at the first micro-tick of step `t`.
pub fn encode_trace(
    trace: &ContextTrace,
    network: &Network,
    encoding: &Encoding,
    only: Option<&BTreeSet<String>>,
) -> Result<Schedules, EncodeError> {
    let mut schedules = Schedules::new();
    for vector in &trace.vectors {
        let Some(tape) = trace.bindings_in.get(&vector.var) else { continue };
        if only.is_some_and(|set| !set.contains(&vector.var)) {
            continue;
        }
        let alphabet = network.machines.get(&tape.machine).map(|m| &m.tape_alphabet);
        let mut entries = Vec::new();
        for (time, value) in &vector.evals {
            let unencodable = |character: String| EncodeError::UnencodableValue {
                vector: vector.var.clone(),
                time: *time,
                character,
                machine: tape.machine.to_string(),
            };
            let mut offset = 0;
            for c in value.chars() {
                let symbol = Symbol::new(c.to_string()).map_err(|_| unencodable(c.to_string()))?;
                if symbol.is_blank() || symbol == encoding.delimiter || alphabet.is_none_or(|a| !a.contains(&symbol)) {
                    return Err(unencodable(c.to_string()));
                }
                entries.push(Injection::new(*time, offset, symbol));
                offset += 1;
            }
            entries.push(Injection::new(*time, offset, encoding.delimiter.clone()));
        }
        schedules.insert(vector.var.clone(), entries);
    }
    Ok(schedules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::EvaluationVector;
    use crate::network::TapeRef;
    use crate::testutil::{passthrough, sym};

    fn setup(evals: Vec<(u64, &str)>) -> (Network, ContextTrace) {
        let mut n = Network::new();
        n.add_machine(passthrough("m0", 0, 1, &["a"])).unwrap();
        n.add_machine(passthrough("m1", 2, 0, &["a"])).unwrap();
        n.connections.push(crate::network::Connection {
            from: crate::network::PortRef::new("m0", 0),
            to: TapeRef::new("m1", 1),
        });
        let trace = ContextTrace {
            vectors: vec![EvaluationVector { var: "v".into(), evals: evals.into_iter().map(|(t, s)| (t, s.into())).collect() }],
            c_a: vec!["v".into()],
            bindings_in: [("v".to_string(), TapeRef::new("m1", 0))].into(),
            ..Default::default()
        };
        (n, trace)
    }

    #[test]
    fn single_evaluation() {
        let (n, trace) = setup(vec![(0, "a")]);
        let prepared = prepare_network(&n, &trace, &Encoding::default()).unwrap();
        let s = encode_trace(&trace, &prepared, &Encoding::default(), None).unwrap();
        assert_eq!(s["v"], vec![Injection::new(0, 0, sym("a")), Injection::new(0, 1, sym("#"))]);
        assert!(prepared.machines[&"m1".into()].tape_alphabet.contains(&sym("#")));
        assert_eq!(prepared.sources.len(), 1);
    }

    #[test]
    fn empty_vector_gives_empty_schedule() {
        let (n, trace) = setup(vec![]);
        let s = encode_trace(&trace, &n, &Encoding::default(), None).unwrap();
        assert_eq!(s["v"], vec![]);
    }

    #[test]
    fn unknown_character() {
        let (n, trace) = setup(vec![(2, "az")]);
        let err = encode_trace(&trace, &n, &Encoding::default(), None).unwrap_err();
        assert!(matches!(err, EncodeError::UnencodableValue { time: 2, ref character, .. } if character == "z"));
    }

    #[test]
    fn binding_onto_written_tape_fails() {
        let (n, mut trace) = setup(vec![(0, "a")]);
        trace.bindings_in.insert("v".into(), TapeRef::new("m1", 1));
        assert!(matches!(
            prepare_network(&n, &trace, &Encoding::default()),
            Err(EncodeError::Attach { .. })
        ));
    }
}
