//! Scenario runner behind the `kset` binary.

pub mod scenario;
mod topo;

use std::collections::BTreeMap;

use kset_core::campaign::{execute, AdversarySpec, CampaignSummary, RunSummary};
use kset_core::protocol::AgreementRun;
use kset_core::topology::TopologyError;
use kset_core::{validate_config, Config, ProcessId, Value};
use rayon::prelude::*;
use serde_json::{json, Value as Json};
use thiserror::Error;

pub use scenario::{Mode, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Parse(_) | CliError::Config(_) => EXIT_CONFIG,
        }
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> CliError {
        match e {
            TopologyError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            TopologyError::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub tree_dump: bool,
}

/// Line-delimited records ending in a summary, plus the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn summary(&self) -> Json {
        serde_json::from_str(self.lines.last().expect("a report ends in a summary")).expect("summary is JSON")
    }

    fn from_error(mode: &str, e: &CliError) -> Report {
        let summary = json!({"record": "summary", "mode": mode, "verdict": "error", "error": e.to_string(), "exit": e.exit_code()});
        Report { lines: vec![summary.to_string()], exit_code: e.exit_code() }
    }
}

pub(crate) struct Emitter {
    lines: Vec<String>,
}

impl Emitter {
    pub(crate) fn new() -> Emitter {
        Emitter { lines: Vec::new() }
    }

    pub(crate) fn record(&mut self, v: Json) {
        self.lines.push(v.to_string());
    }

    pub(crate) fn raw(&mut self, jsonl: &str) {
        self.lines.extend(jsonl.lines().map(str::to_string));
    }

    pub(crate) fn finish(mut self, mode: Mode, verdict: &str, exit_code: i32, mut extra: Json) -> Report {
        let obj = extra.as_object_mut().expect("summary fields form an object");
        obj.insert("record".into(), json!("summary"));
        obj.insert("mode".into(), json!(mode.name()));
        obj.insert("verdict".into(), json!(verdict));
        obj.insert("exit".into(), json!(exit_code));
        self.lines.push(extra.to_string());
        Report { lines: self.lines, exit_code }
    }
}

/// Executes one scenario. Failures become a summary record with the
/// matching exit code.
pub fn run_scenario(s: &Scenario, opts: Options) -> Report {
    let result = match s.mode {
        Mode::Agree | Mode::Consensus => run_protocol(s, opts),
        _ => topo::run(s, opts),
    };
    result.unwrap_or_else(|e| Report::from_error(s.mode.name(), &e))
}

/// `runs` seeded executions starting at the scenario (or override) seed.
pub fn run_campaign(s: &Scenario, opts: Options, runs: u64) -> Report {
    campaign(s, opts, runs).unwrap_or_else(|e| Report::from_error(s.mode.name(), &e))
}

struct ProtocolSetup {
    cfg: Config,
    adversary: AdversarySpec,
    inputs: Option<BTreeMap<ProcessId, Value>>,
    seed: u64,
}

fn protocol_setup(s: &Scenario, opts: Options) -> Result<ProtocolSetup, CliError> {
    if !s.mode.is_protocol() {
        return Err(CliError::Config(format!("mode {} is not a protocol mode", s.mode.name())));
    }
    let seed = match opts.seed {
        Some(x) => x,
        None => s.seed()?,
    };
    let cfg = validate_config(s.raw_config(seed)?).map_err(|e| CliError::Config(e.to_string()))?;
    if s.mode == Mode::Consensus && cfg.k != 1 {
        return Err(CliError::Config(format!("mode consensus needs k = 1, got {}", cfg.k)));
    }
    let adversary = s.adversary()?;
    let inputs = s.inputs(cfg.n_plus_1)?;
    if let Some(inputs) = &inputs {
        if let Some((p, v)) = inputs.iter().find(|(_, v)| v.within_domain(cfg.d).is_bottom()) {
            return Err(CliError::Config(format!("input {v} of process {p} is outside v0..v{}", cfg.d)));
        }
    }
    adversary.schedule(&cfg).validate(&cfg, cfg.protocol_rounds()).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(ProtocolSetup { cfg, adversary, inputs, seed })
}

fn verdict(r: &RunSummary) -> &'static str {
    if r.passed() {
        "pass"
    } else {
        "violation"
    }
}

fn run_protocol(s: &Scenario, opts: Options) -> Result<Report, CliError> {
    let setup = protocol_setup(s, opts)?;
    let (summary, run) = execute(&setup.cfg, &setup.adversary, setup.inputs.as_ref(), setup.seed);
    let mut out = Emitter::new();
    if let Some(run) = &run {
        out.raw(&run.trace.to_jsonl());
        if opts.tree_dump {
            emit_trees(&mut out, run);
        }
    }
    let code = if summary.passed() { EXIT_OK } else { EXIT_VIOLATION };
    let fields = json!({
        "seed": summary.seed,
        "adversary": summary.adversary,
        "n_plus_1": setup.cfg.n_plus_1, "t": setup.cfg.t, "k": setup.cfg.k, "d": setup.cfg.d,
        "rounds": summary.rounds,
        "expected_rounds": setup.cfg.protocol_rounds(),
        "faulty": summary.faulty,
        "decisions": summary.decisions.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "violations": summary.violations,
        "digest": summary.digest,
        "error": summary.error,
    });
    Ok(out.finish(s.mode, verdict(&summary), code, fields))
}

fn emit_trees(out: &mut Emitter, run: &AgreementRun) {
    for (owner, o) in &run.outcomes {
        let entries: Vec<String> = o.tree.dump().lines().map(str::to_string).collect();
        out.record(json!({"record": "tree", "owner": owner.0, "entries": entries}));
    }
}

fn campaign(s: &Scenario, opts: Options, runs: u64) -> Result<Report, CliError> {
    if runs == 0 {
        return Err(CliError::Config("runs must be at least 1".into()));
    }
    let setup = protocol_setup(s, opts)?;
    let results: Vec<RunSummary> = (setup.seed..setup.seed + runs)
        .into_par_iter()
        .map(|seed| execute(&setup.cfg, &setup.adversary, setup.inputs.as_ref(), seed).0)
        .collect();
    let mut out = Emitter::new();
    for r in &results {
        out.record(json!({
            "record": "run",
            "seed": r.seed,
            "verdict": verdict(r),
            "rounds": r.rounds,
            "decisions": r.decisions.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "digest": r.digest,
            "error": r.error,
        }));
    }
    let agg = CampaignSummary::from_runs(&results);
    let code = if agg.ok() { EXIT_OK } else { EXIT_VIOLATION };
    let fields = json!({
        "first_seed": setup.seed,
        "runs": agg.runs,
        "passed": agg.passed,
        "errors": agg.errors,
        "task_violations": agg.task_violations,
        "lemma_violations": agg.lemma_violations,
        "distinct_decisions": agg.distinct_decisions,
        "decided_values": agg.decided_values,
        "round_counts": agg.round_counts,
    });
    Ok(out.finish(s.mode, if agg.ok() { "pass" } else { "violation" }, code, fields))
}
