use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::encode::EncodeError;
use crate::context::{encode_trace, prepare_network, ContextTrace, EditSimilarity, Encoding, StreamSimilarity};
use crate::network::{Network, Schedules};
use crate::scheduler::{run, ClockConfig, RunError, RunResult, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceRunError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// Runs `network` with the vectors of `trace` (all bound ones, or those in
/// `only`) injected next to the `base` schedules of its own sources.
/// Returns the prepared network alongside the result.
pub fn run_trace(
    network: &Network,
    trace: &ContextTrace,
    base: &Schedules,
    clocks: Option<&ClockConfig>,
    budget: u64,
    encoding: &Encoding,
    only: Option<&BTreeSet<String>>,
) -> Result<(Network, RunResult), TraceRunError> {
    let prepared = prepare_network(network, trace, encoding)?;
    let clocks = clocks.cloned().unwrap_or_else(|| ClockConfig::for_network(&prepared));
    let mut schedules = base.clone();
    schedules.extend(encode_trace(trace, &prepared, encoding, only)?);
    let result = run(&prepared, &clocks, &schedules, budget)?;
    Ok((prepared, result))
}

pub struct EffectiveConfig<'m> {
    pub metric: &'m dyn StreamSimilarity,
    pub threshold: f64,
    pub budget: u64,
    /// Speeds; the machine specs' own speeds when `None`.
    pub clocks: Option<ClockConfig>,
    pub encoding: Encoding,
    /// Schedules of the network's own sources, injected in both runs.
    pub base_schedules: Schedules,
}

impl Default for EffectiveConfig<'_> {
    fn default() -> Self {
        EffectiveConfig {
            metric: &EditSimilarity,
            threshold: 0.8,
            budget: DEFAULT_BUDGET,
            clocks: None,
            encoding: Encoding::default(),
            base_schedules: Schedules::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessReport {
    pub context: Vec<String>,
    pub subset: Vec<String>,
    /// The subset equals the whole context set.
    pub degenerate: bool,
    pub metric: String,
    pub per_sink: BTreeMap<String, f64>,
    /// Similarity of the concatenated sink streams.
    pub score: f64,
    pub threshold: f64,
    pub effective: bool,
}

impl EffectivenessReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("context: {{{}}}\n", self.context.join(", ")));
        out.push_str(&format!("subset:  {{{}}}\n", self.subset.join(", ")));
        if self.degenerate {
            out.push_str("warning: subset equals the context set\n");
        }
        for (sink, score) in &self.per_sink {
            out.push_str(&format!("sink {sink:<16} {score:.4}\n"));
        }
        out.push_str(&format!("score ({}) {:.4} threshold {:.4}\n", self.metric, self.score, self.threshold));
        out.push_str(&format!(
            "verdict: {}\n",
            if self.effective { "effectively context-aware" } else { "not effectively context-aware" }
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EffectiveError {
    #[error("{0:?} is not part of the context set")]
    NotASubset(String),
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Simulation(#[from] TraceRunError),
}

/// Runs the network once with the whole context set injected and once with
/// only `subset`, and compares what the sinks received.
pub fn check_effective(
    network: &Network,
    trace: &ContextTrace,
    subset: &BTreeSet<String>,
    config: &EffectiveConfig<'_>,
) -> Result<EffectivenessReport, EffectiveError> {
    if !(0.0..=1.0).contains(&config.threshold) {
        return Err(EffectiveError::InvalidThreshold(config.threshold));
    }
    let context = trace.context_set();
    if let Some(extra) = subset.difference(&context).next() {
        return Err(EffectiveError::NotASubset(extra.clone()));
    }

    let simulate = |only: &BTreeSet<String>| {
        run_trace(network, trace, &config.base_schedules, config.clocks.as_ref(), config.budget, &config.encoding, Some(only))
            .map(|(_, result)| result)
    };
    let (full, partial) = std::thread::scope(|scope| {
        let full = scope.spawn(|| simulate(&context));
        let partial = simulate(subset);
        (full.join().expect("simulation thread panicked"), partial)
    });
    let (full, partial): (RunResult, RunResult) = (full?, partial?);

    let sinks: BTreeSet<&String> = full.sinks.keys().chain(partial.sinks.keys()).collect();
    let per_sink = sinks
        .into_iter()
        .map(|sink| (sink.clone(), config.metric.similarity(&full.sink_stream(sink), &partial.sink_stream(sink))))
        .collect();
    let score = config.metric.similarity(&full.concatenated_sinks(), &partial.concatenated_sinks());

    Ok(EffectivenessReport {
        context: context.iter().cloned().collect(),
        subset: subset.iter().cloned().collect(),
        degenerate: subset == &context,
        metric: config.metric.name().to_string(),
        per_sink,
        score,
        threshold: config.threshold,
        effective: score >= config.threshold,
    })
}
