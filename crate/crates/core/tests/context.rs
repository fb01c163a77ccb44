mod common;

use std::collections::BTreeSet;

use common::*;
use ntm::context::{
    check_awareness, check_effective, run_trace, AwarenessReport, ContextTrace, EditSimilarity, EffectiveConfig,
    Encoding, StreamSimilarity, VectorStatus,
};
use ntm::io::{load_network, load_trace};
use ntm::scheduler::DEFAULT_BUDGET;
use ntm::{Network, Schedules, Symbol};
use proptest::prelude::*;

fn load(name: &str) -> (Network, Schedules, ContextTrace) {
    let (network, schedules) = load_network(&fixture(&format!("{name}.net.json"))).unwrap();
    let trace = load_trace(&fixture(&format!("{name}.trace.json"))).unwrap();
    (network, schedules, trace)
}

fn awareness(network: &Network, schedules: &Schedules, trace: &ContextTrace) -> AwarenessReport {
    let (prepared, result) =
        run_trace(network, trace, schedules, None, DEFAULT_BUDGET, &Encoding::default(), None).unwrap();
    check_awareness(&prepared, &result, trace).unwrap()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn map_service_is_aware() {
    let (network, schedules, trace) = load("wms");
    let report = awareness(&network, &schedules, &trace);
    assert!(report.aware && !report.vacuous);
    assert_eq!(report.vectors.len(), 4);
    for v in &report.vectors {
        assert_eq!(v.status, VectorStatus::ConsumedAndProduced, "{}", v.vector);
        assert_eq!(v.consumed, v.evaluations);
    }
}

#[test]
fn unbinding_location_breaks_awareness() {
    let (network, schedules, mut trace) = load("wms");
    trace.bindings_in.remove("location");
    let report = awareness(&network, &schedules, &trace);
    assert!(!report.aware);
    assert_eq!(report.status_of("location"), Some(VectorStatus::Unconsumed));
    assert_eq!(report.status_of("user"), Some(VectorStatus::ConsumedAndProduced));
}

#[test]
fn machine_that_never_reads_is_not_aware() {
    let (network, schedules, trace) = load("constant");
    let report = awareness(&network, &schedules, &trace);
    assert!(!report.aware);
    assert_eq!(report.status_of("weather"), Some(VectorStatus::Unconsumed));
}

#[test]
fn empty_context_is_vacuous() {
    let (network, schedules, mut trace) = load("wms");
    trace.c_a.clear();
    let report = awareness(&network, &schedules, &trace);
    assert!(report.vacuous && !report.aware);
}

fn renamed(trace: &ContextTrace, f: impl Fn(&str) -> String) -> ContextTrace {
    let mut t = trace.clone();
    for v in &mut t.variables {
        v.id = f(&v.id);
    }
    for v in &mut t.vectors {
        v.var = f(&v.var);
    }
    t.c_a = t.c_a.iter().map(|id| f(id)).collect();
    t.bindings_in = t.bindings_in.into_iter().map(|(k, v)| (f(&k), v)).collect();
    t.bindings_out = t.bindings_out.into_iter().map(|(k, v)| (k, f(&v))).collect();
    t
}

#[test]
fn verdict_ignores_names_and_order() {
    let (network, schedules, trace) = load("wms");
    let base = awareness(&network, &schedules, &trace);
    let statuses = |r: &AwarenessReport, f: &dyn Fn(&str) -> String| -> Vec<(String, VectorStatus)> {
        let mut v: Vec<_> = r.vectors.iter().map(|v| (f(&v.vector), v.status)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    };
    let renames: [&dyn Fn(&str) -> String; 2] = [&|s| format!("zz_{s}"), &|s| s.chars().rev().collect()];
    for f in renames {
        let report = awareness(&network, &schedules, &renamed(&trace, f));
        assert_eq!(report.aware, base.aware);
        assert_eq!(statuses(&report, &|s| s.to_string()), statuses(&base, f));
    }
    let mut reordered = trace.clone();
    reordered.c_a.reverse();
    reordered.vectors.reverse();
    assert_eq!(awareness(&network, &schedules, &reordered).aware, base.aware);
}

#[test]
fn awareness_holds_for_every_subset() {
    let (network, schedules, trace) = load("wms");
    let all = trace.c_a.clone();
    for mask in 1u32..(1 << all.len()) {
        let mut t = trace.clone();
        t.c_a = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, id)| id.clone()).collect();
        assert!(awareness(&network, &schedules, &t).aware, "{:?}", t.c_a);
    }
}

fn config(base_schedules: Schedules) -> EffectiveConfig<'static> {
    EffectiveConfig { base_schedules, ..EffectiveConfig::default() }
}

#[test]
fn full_subset_scores_one() {
    for name in ["wms", "redundant", "constant"] {
        let (network, schedules, trace) = load(name);
        let report = check_effective(&network, &trace, &trace.context_set(), &config(schedules)).unwrap();
        assert!(report.degenerate);
        assert_eq!(report.score, 1.0, "{name}");
        assert!(report.effective);
    }
}

#[test]
fn redundant_vector_can_be_dropped() {
    let (network, schedules, trace) = load("redundant");
    for keep in ["primary", "backup"] {
        let report = check_effective(&network, &trace, &set(&[keep]), &config(schedules.clone())).unwrap();
        assert!(report.score >= 0.8, "{keep}: {}", report.score);
        assert!(report.effective);
    }
}

#[test]
fn constant_output_ignores_its_context() {
    let (network, schedules, trace) = load("constant");
    let report = check_effective(&network, &trace, &set(&[]), &config(schedules)).unwrap();
    assert_eq!(report.score, 1.0);
}

#[test]
fn dropping_location_changes_the_map() {
    let (network, schedules, trace) = load("wms");
    let subset = set(&["user", "screen", "providers"]);
    let cfg = config(schedules);
    let report = check_effective(&network, &trace, &subset, &cfg).unwrap();
    assert!(report.score < 0.8 && !report.effective);
    assert_eq!(check_effective(&network, &trace, &subset, &cfg).unwrap(), report);
}

#[test]
fn subset_must_come_from_the_context() {
    let (network, schedules, trace) = load("wms");
    assert!(check_effective(&network, &trace, &set(&["weather"]), &config(schedules.clone())).is_err());
    let cfg = EffectiveConfig { threshold: 1.5, ..config(schedules) };
    assert!(check_effective(&network, &trace, &set(&[]), &cfg).is_err());
}

/// Wagner-Fischer over whole symbols.
fn edit_distance(a: &[Symbol], b: &[Symbol]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    d[0] = (0..=b.len()).collect();
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

fn stream() -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "10", "#"]), 0..20)
        .prop_map(|v| v.into_iter().map(sym).collect())
}

proptest! {
    #[test]
    fn similarity_matches_edit_distance(a in stream(), b in stream()) {
        let s = EditSimilarity.similarity(&a, &b);
        let longest = a.len().max(b.len());
        let expected = if longest == 0 { 1.0 } else { 1.0 - edit_distance(&a, &b) as f64 / longest as f64 };
        prop_assert_eq!(s, expected);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, EditSimilarity.similarity(&b, &a));
        prop_assert_eq!(EditSimilarity.similarity(&a, &a), 1.0);
    }
}
