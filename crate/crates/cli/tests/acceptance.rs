//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use ntm::context::{check_awareness, check_effective, run_trace, EffectiveConfig, Encoding, VectorStatus};
use ntm::io::{load_mapping, load_model, load_network, load_trace};
use ntm::model::refine_check;
use ntm::scheduler::DEFAULT_BUDGET;
use ntm::ClockConfig;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:.2?}, limit {limit:?}"))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn property<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Result<(), String>) -> Result<(), String> {
    runner(cases).run(&strategy, |v| check(v).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}

fn fixture_counts() -> Outcome {
    let start = Instant::now();
    let m1 = load_model(&fixture("model1.ctx")).map_err(|e| e.to_string())?;
    let m2 = load_model(&fixture("model2.ctx")).map_err(|e| e.to_string())?;
    let ids: Vec<u32> = m1.procedures.iter().map(|p| p.id).collect();
    let got = |m: &ntm::model::SystemModel| (m.procedures.len(), m.contexts.len(), m.connections.len(), m.directed_edge_count());
    ensure(ids == [1, 9], format!("model1 procedure ids {ids:?}"))?;
    ensure(got(&m1) == (2, 4, 5, 8), format!("model1 counts {:?}", got(&m1)))?;
    ensure(got(&m2) == (8, 4, 12, 13), format!("model2 counts {:?}", got(&m2)))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("model1 {:?}, model2 {:?}", got(&m1), got(&m2)))
}

fn tape_semantics() -> Outcome {
    let start = Instant::now();
    property(10_000, tape_ops(), |ops| check_tape_law(&ops))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("10000 interleavings in {:.2?}", start.elapsed()))
}

fn speed_law() -> Outcome {
    for (sb, sc) in [(1, 1), (1, 2), (2, 3), (3, 5)] {
        let (b, c) = speed_counts(sb, sc, 12);
        ensure(b * u64::from(sc) == c * u64::from(sb) && b == 12 * u64::from(sb), format!("speeds ({sb},{sc}): counts ({b},{c})"))?;
    }
    Ok("4 speed pairs exact".into())
}

fn dual_scheduler() -> Outcome {
    let start = Instant::now();
    let fixtures = network_fixtures();
    for (name, network, schedules) in &fixtures {
        check_dual(network, &ClockConfig::for_network(network), schedules, DEFAULT_BUDGET).map_err(|e| format!("{name}: {e}"))?;
    }
    property(1_000, choices(), |mut c| {
        let case = random_case(&mut c);
        check_dual(&case.network, &case.clocks, &case.schedules, case.budget)
    })?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} fixtures and 1000 random networks in {:.2?}", fixtures.len(), start.elapsed()))
}

fn product_equivalence() -> Outcome {
    property(100, choices(), |mut c| check_pair(&random_pair(&mut c)))?;
    Ok("100 producer/consumer pairs".into())
}

fn awareness() -> Outcome {
    let (network, schedules) = load_network(&fixture("wms.net.json")).map_err(|e| e.to_string())?;
    let trace = load_trace(&fixture("wms.trace.json")).map_err(|e| e.to_string())?;
    let check = |trace: &ntm::context::ContextTrace| {
        let (prepared, result) = run_trace(&network, trace, &schedules, None, DEFAULT_BUDGET, &Encoding::default(), None)
            .map_err(|e| e.to_string())?;
        check_awareness(&prepared, &result, trace).map_err(|e| e.to_string())
    };
    let full = check(&trace)?;
    ensure(full.aware && full.vectors.len() == 4, format!("full trace: aware={}", full.aware))?;
    let mut cut = trace.clone();
    cut.bindings_in.remove("location");
    let report = check(&cut)?;
    ensure(!report.aware, "verdict did not flip without the location binding")?;
    ensure(report.status_of("location") == Some(VectorStatus::Unconsumed), format!("location is {:?}", report.status_of("location")))?;
    Ok("aware with 4 vectors; location unbound gives unconsumed".into())
}

fn effective() -> Outcome {
    let load = |name: &str| -> Result<_, String> {
        let (network, base_schedules) = load_network(&fixture(&format!("{name}.net.json"))).map_err(|e| e.to_string())?;
        let trace = load_trace(&fixture(&format!("{name}.trace.json"))).map_err(|e| e.to_string())?;
        Ok((network, trace, EffectiveConfig { base_schedules, ..EffectiveConfig::default() }))
    };
    let (network, trace, config) = load("wms")?;
    let full = check_effective(&network, &trace, &trace.context_set(), &config).map_err(|e| e.to_string())?;
    ensure(full.score == 1.0, format!("degenerate score {}", full.score))?;
    let (network, trace, config) = load("redundant")?;
    let keep = BTreeSet::from(["primary".to_string()]);
    let dropped = check_effective(&network, &trace, &keep, &config).map_err(|e| e.to_string())?;
    ensure(dropped.score >= 0.8, format!("redundant score {}", dropped.score))?;
    Ok(format!("degenerate 1.0, redundant {:.4}", dropped.score))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (name, ..) in network_fixtures() {
        let mut logs = Vec::new();
        for i in 0..2 {
            let log = dir.path().join(format!("{name}.{i}.jsonl"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_ntm"));
            cmd.arg("simulate").arg(fixture(&format!("{name}.net.json"))).arg("--log").arg(&log);
            let trace = fixture(&format!("{name}.trace.json"));
            if trace.exists() {
                cmd.arg("--trace").arg(trace);
            }
            let status = cmd.output().map_err(|e| e.to_string())?.status;
            ensure(status.success(), format!("{name}: simulate exited with {status}"))?;
            logs.push(std::fs::read(&log).map_err(|e| e.to_string())?);
        }
        ensure(!logs[0].is_empty() && logs[0] == logs[1], format!("{name}: logs differ"))?;
        checked += 1;
    }
    Ok(format!("{checked} fixtures byte-identical"))
}

fn refinement() -> Outcome {
    let coarse = load_model(&fixture("model1.ctx")).map_err(|e| e.to_string())?;
    let fine = load_model(&fixture("model2.ctx")).map_err(|e| e.to_string())?;
    let mapping = load_mapping(&fixture("model1_to_model2.map.json")).map_err(|e| e.to_string())?;
    let report = refine_check(&coarse, &fine, &mapping).map_err(|e| e.to_string())?;
    ensure(report.is_valid(), format!("not valid:\n{report}"))?;
    ensure(report.realized.len() == 8 && report.unrealized.is_empty(), format!("realized {}", report.realized.len()))?;
    ensure(report.extraneous_context.is_empty(), "extraneous context edges")?;
    Ok("8/8 coarse edges realized, no extraneous context edges".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixture reproduction", fixture_counts),
        ("tape semantics", tape_semantics),
        ("speed law", speed_law),
        ("dual scheduler", dual_scheduler),
        ("product equivalence", product_equivalence),
        ("awareness checker", awareness),
        ("effective awareness", effective),
        ("end-to-end determinism", determinism),
        ("refinement", refinement),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(criterion).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
