use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ntm::context::{
    check_awareness, check_effective, encode_trace, prepare_network, ContextTrace, EffectiveConfig, EffectiveError,
    Encoding, TraceRunError,
};
use ntm::export::{to_dot, to_tree};
use ntm::io::{load_mapping, load_model, load_network, load_trace, LoadError};
use ntm::model::{build_graph, refine_check, validate_model, GraphError, RefineError};
use ntm::scheduler::{RunError, DEFAULT_BUDGET};
use ntm::{run, run_reference, ClockConfig, Network, RunResult, Schedules};

#[derive(Parser)]
#[command(name = "ntm", version, about = "Networked Turing machines and context-awareness checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Tree,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Global time steps to run before giving up
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    steps: u64,
    /// Speed overrides, e.g. `m0=1,m1=2`
    #[arg(long, value_parser = parse_speed, value_delimiter = ',')]
    speeds: Vec<(String, u32)>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model document and print its canonical form
    Parse {
        file: PathBuf,
        /// Print the parsed model as JSON
        #[arg(long)]
        json: bool,
    },
    /// Validate a model document (.ctx) or a network file (.json)
    Validate { file: PathBuf },
    /// Print the graph of a model
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        /// Keep declared entities that take part in no connection
        #[arg(long)]
        include_isolated: bool,
    },
    /// Run a network and summarize the result
    Simulate {
        network: PathBuf,
        /// Context trace whose bound vectors are injected
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Write the event log (JSON lines) here
        #[arg(long)]
        log: Option<PathBuf>,
        /// Use the reference interpreter
        #[arg(long)]
        reference: bool,
        /// Print the full result as JSON
        #[arg(long)]
        json: bool,
    },
    /// Check that every context vector is consumed and answered
    CheckAwareness {
        network: PathBuf,
        trace: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Compare sink output with the full context set and with a subset
    CheckEffective {
        network: PathBuf,
        trace: PathBuf,
        /// Vectors kept in the reduced run, comma separated (may be empty)
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        subset: Vec<String>,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check that a fine model refines a coarse one
    Refine {
        coarse: PathBuf,
        fine: PathBuf,
        /// JSON object mapping each coarse procedure to its fine procedures
        #[arg(long = "map")]
        mapping: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn parse_speed(s: &str) -> Result<(String, u32), String> {
    let (machine, speed) = s.split_once('=').ok_or_else(|| format!("expected machine=speed, got {s:?}"))?;
    let speed = speed.parse().map_err(|_| format!("invalid speed in {s:?}"))?;
    Ok((machine.to_string(), speed))
}

/// Failures: exit code 1 for findings about the input, 2 for everything else.
enum Failure {
    Findings(String),
    Usage(String),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Model { .. } => Failure::Findings(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::InvalidNetwork(report) => {
                let lines: Vec<String> = report.violations.iter().map(|v| format!("violation: {v}")).collect();
                Failure::Findings(format!("invalid network\n{}", lines.join("\n")))
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<TraceRunError> for Failure {
    fn from(e: TraceRunError) -> Self {
        match e {
            TraceRunError::Run(e) => e.into(),
            TraceRunError::Encode(e) => Failure::Findings(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn clocks(network: &Network, args: &RunArgs) -> ClockConfig {
    args.speeds
        .iter()
        .fold(ClockConfig::for_network(network), |c, (machine, speed)| c.with_speed(machine.as_str(), *speed))
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn cmd_parse(file: &Path, json: bool) -> Outcome {
    let model = load_model(file)?;
    if json {
        emit(&serde_json::to_string_pretty(&model).expect("model serializes"));
    } else {
        emit(&model.to_string());
    }
    Ok(true)
}

fn cmd_validate(file: &Path) -> Outcome {
    if file.extension().is_some_and(|e| e == "json") {
        let (network, _) = load_network(file)?;
        let report = network.validate();
        if report.is_valid() {
            emit("no violations");
        }
        for v in &report.violations {
            emit(&format!("violation: {v}"));
        }
        return Ok(report.is_valid());
    }
    let report = validate_model(&load_model(file)?);
    emit(&report.to_string());
    Ok(report.is_clean())
}

fn cmd_graph(file: &Path, format: GraphFormat, include_isolated: bool) -> Outcome {
    let model = load_model(file)?;
    let graph = build_graph(&model, include_isolated).map_err(|GraphError::InvalidModel(r)| Failure::Findings(r.to_string()))?;
    emit(&match format {
        GraphFormat::Dot => to_dot(&graph),
        GraphFormat::Tree => to_tree(&graph),
    });
    Ok(true)
}

/// Loads a network and, if given, merges a trace into it.
fn setup(network: &Path, trace: Option<&Path>) -> Result<(Network, Schedules, Option<ContextTrace>), Failure> {
    let (network, mut schedules) = load_network(network)?;
    let Some(path) = trace else { return Ok((network, schedules, None)) };
    let trace = load_trace(path)?;
    let encoding = Encoding::default();
    let bad_trace = |e: &dyn std::fmt::Display| Failure::Findings(format!("{}: {e}", path.display()));
    let prepared = prepare_network(&network, &trace, &encoding).map_err(|e| bad_trace(&e))?;
    schedules.extend(encode_trace(&trace, &prepared, &encoding, None).map_err(|e| bad_trace(&e))?);
    Ok((prepared, schedules, Some(trace)))
}

fn summary(result: &RunResult) -> String {
    let mut out = format!(
        "halt: {} after {} micro-ticks (resolution {})\n",
        serde_json::to_value(result.halt_reason).expect("halt reason serializes").as_str().unwrap_or("?"),
        result.micro_ticks,
        result.log.resolution
    );
    for sink in result.sinks.keys() {
        let stream: Vec<String> = result.sink_stream(sink).iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("sink {sink}: {}\n", stream.join(" ")));
    }
    for (id, state) in &result.machines {
        out.push_str(&format!(
            "machine {id}: state {}, {} transitions{}\n",
            state.current,
            state.transitions_executed,
            if state.halted { ", halted" } else { "" }
        ));
    }
    out
}

fn cmd_simulate(network: &Path, trace: Option<&Path>, args: &RunArgs, log: Option<&Path>, reference: bool, json: bool) -> Outcome {
    let (network, schedules, _) = setup(network, trace)?;
    let clocks = clocks(&network, args);
    let runner = if reference { run_reference } else { run };
    let result = runner(&network, &clocks, &schedules, args.steps)?;
    if let Some(path) = log {
        let file = File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        result
            .log
            .write_jsonl(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    emit(&if json { to_tree(&result) } else { summary(&result) });
    Ok(true)
}

fn cmd_check_awareness(network: &Path, trace: &Path, args: &RunArgs, json: bool) -> Outcome {
    let (network, schedules, trace) = setup(network, Some(trace))?;
    let trace = trace.expect("trace loaded");
    let result = run(&network, &clocks(&network, args), &schedules, args.steps)?;
    let report = check_awareness(&network, &result, &trace).map_err(|e| Failure::Findings(e.to_string()))?;
    emit(&if json { to_tree(&report) } else { report.to_table() });
    Ok(report.aware)
}

fn cmd_check_effective(network: &Path, trace: &Path, subset: &[String], threshold: f64, args: &RunArgs, json: bool) -> Outcome {
    let (network, base_schedules) = load_network(network)?;
    let trace = load_trace(trace)?;
    let config = EffectiveConfig {
        threshold,
        budget: args.steps,
        clocks: Some(clocks(&network, args)),
        base_schedules,
        ..EffectiveConfig::default()
    };
    let subset: BTreeSet<String> = subset.iter().filter(|s| !s.is_empty()).cloned().collect();
    let report = check_effective(&network, &trace, &subset, &config).map_err(|e| match e {
        EffectiveError::Simulation(e) => e.into(),
        EffectiveError::InvalidThreshold(_) | EffectiveError::NotASubset(_) => Failure::Usage(e.to_string()),
    })?;
    emit(&if json { serde_json::to_string_pretty(&report).expect("report serializes") } else { report.to_table() });
    Ok(report.effective)
}

fn cmd_refine(coarse: &Path, fine: &Path, mapping: &Path, json: bool) -> Outcome {
    let (coarse, fine) = (load_model(coarse)?, load_model(fine)?);
    let mapping = load_mapping(mapping)?;
    let report = refine_check(&coarse, &fine, &mapping).map_err(|e| match e {
        RefineError::InvalidModel { .. } => Failure::Findings(e.to_string()),
        RefineError::IncompleteMapping(_) | RefineError::InvalidMapping(_) => Failure::Usage(e.to_string()),
    })?;
    emit(&if json { serde_json::to_string_pretty(&report).expect("report serializes") } else { report.to_string() });
    Ok(report.is_valid())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Parse { file, json } => cmd_parse(file, *json),
        Command::Validate { file } => cmd_validate(file),
        Command::Graph { file, format, include_isolated } => cmd_graph(file, *format, *include_isolated),
        Command::Simulate { network, trace, run, log, reference, json } => {
            cmd_simulate(network, trace.as_deref(), run, log.as_deref(), *reference, *json)
        }
        Command::CheckAwareness { network, trace, run, json } => cmd_check_awareness(network, trace, run, *json),
        Command::CheckEffective { network, trace, subset, threshold, run, json } => {
            cmd_check_effective(network, trace, subset, *threshold, run, *json)
        }
        Command::Refine { coarse, fine, mapping, json } => cmd_refine(coarse, fine, mapping, *json),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Findings(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
