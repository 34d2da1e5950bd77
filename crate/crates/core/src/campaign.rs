//! Seeded batches of protocol runs with per-run checks and aggregate counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::model::{Config, ProcessId, Value};
use crate::protocol::checks::{check_run, Violation};
use crate::protocol::{agree, random_inputs, AgreementRun};
use crate::simnet::{crash_schedule, equivocating_schedule, random_byzantine_schedule, AdversarySchedule, Directive};

/// Adversary family for generated runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryChoice {
    Benign,
    Crash,
    Equivocating,
    Random,
}

impl AdversaryChoice {
    pub const ALL: [AdversaryChoice; 4] =
        [AdversaryChoice::Benign, AdversaryChoice::Crash, AdversaryChoice::Equivocating, AdversaryChoice::Random];

    pub fn schedule(self, cfg: &Config) -> AdversarySchedule {
        let rounds = cfg.protocol_rounds();
        match self {
            AdversaryChoice::Benign => AdversarySchedule::benign(cfg.seed),
            AdversaryChoice::Crash => crash_schedule(cfg),
            AdversaryChoice::Equivocating => equivocating_schedule(cfg, rounds),
            AdversaryChoice::Random => random_byzantine_schedule(cfg, rounds),
        }
    }
}

impl fmt::Display for AdversaryChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryChoice::Benign => "benign",
            AdversaryChoice::Crash => "crash",
            AdversaryChoice::Equivocating => "equivocating",
            AdversaryChoice::Random => "random",
        })
    }
}

impl FromStr for AdversaryChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "benign" | "none" => Ok(AdversaryChoice::Benign),
            "crash" => Ok(AdversaryChoice::Crash),
            "equivocating" | "equivocate" => Ok(AdversaryChoice::Equivocating),
            "random" => Ok(AdversaryChoice::Random),
            other => Err(format!("unknown adversary {other:?}")),
        }
    }
}

/// How the faulty processes of a run are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversarySpec {
    Generated(AdversaryChoice),
    /// Fixed directives; the seed only drives run-time choices.
    Scripted(Vec<Directive>),
}

impl AdversarySpec {
    pub fn schedule(&self, cfg: &Config) -> AdversarySchedule {
        match self {
            AdversarySpec::Generated(c) => c.schedule(cfg),
            AdversarySpec::Scripted(d) => AdversarySchedule::scripted(cfg.seed, d.clone()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AdversarySpec::Generated(c) => c.to_string(),
            AdversarySpec::Scripted(_) => "scripted".to_string(),
        }
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub adversary: String,
    pub rounds: usize,
    pub faulty: usize,
    pub decisions: BTreeSet<Value>,
    pub task_violations: usize,
    pub lemma_violations: usize,
    pub violations: Vec<Violation>,
    pub digest: String,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.task_violations == 0 && self.lemma_violations == 0
    }
}

/// Runs `base` under `seed`. Inputs default to the seeded random draw.
pub fn execute(
    base: &Config,
    adversary: &AdversarySpec,
    inputs: Option<&BTreeMap<ProcessId, Value>>,
    seed: u64,
) -> (RunSummary, Option<AgreementRun>) {
    let cfg = base.with_seed(seed);
    let inputs = inputs.cloned().unwrap_or_else(|| random_inputs(&cfg));
    let schedule = adversary.schedule(&cfg);
    let mut summary = RunSummary {
        seed,
        adversary: adversary.name(),
        rounds: 0,
        faulty: schedule.corrupted().len(),
        decisions: BTreeSet::new(),
        task_violations: 0,
        lemma_violations: 0,
        violations: Vec::new(),
        digest: String::new(),
        error: None,
    };
    match agree(&cfg, &inputs, &schedule) {
        Ok(run) => {
            let report = check_run(&run, &cfg);
            summary.rounds = run.trace.round_count();
            summary.decisions = run.trace.distinct_decisions();
            summary.task_violations = report.task_violations();
            summary.lemma_violations = report.lemma_violations();
            summary.violations = report.violations;
            summary.digest = run.trace.digest();
            (summary, Some(run))
        }
        Err(e) => {
            summary.error = Some(e.to_string());
            (summary, None)
        }
    }
}

/// Runs seed `seed` of `base` against a generated adversary, with random inputs.
pub fn run_one(base: &Config, adversary: AdversaryChoice, seed: u64) -> RunSummary {
    execute(base, &AdversarySpec::Generated(adversary), None, seed).0
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CampaignSummary {
    pub runs: usize,
    pub passed: usize,
    pub errors: usize,
    pub task_violations: usize,
    pub lemma_violations: usize,
    /// Runs by number of distinct decisions.
    pub distinct_decisions: BTreeMap<usize, usize>,
    /// Decisions by value, counted once per run.
    pub decided_values: BTreeMap<String, usize>,
    pub round_counts: BTreeMap<usize, usize>,
}

impl CampaignSummary {
    pub fn from_runs<'a, I: IntoIterator<Item = &'a RunSummary>>(runs: I) -> CampaignSummary {
        let mut s = CampaignSummary::default();
        for r in runs {
            s.runs += 1;
            s.passed += r.passed() as usize;
            s.errors += r.error.is_some() as usize;
            s.task_violations += r.task_violations;
            s.lemma_violations += r.lemma_violations;
            if r.error.is_none() {
                *s.distinct_decisions.entry(r.decisions.len()).or_default() += 1;
                *s.round_counts.entry(r.rounds).or_default() += 1;
                for v in &r.decisions {
                    *s.decided_values.entry(v.to_string()).or_default() += 1;
                }
            }
        }
        s
    }

    pub fn ok(&self) -> bool {
        self.passed == self.runs
    }
}

/// Runs seeds `first..first + count` sequentially.
pub fn run_campaign(base: &Config, adversary: AdversaryChoice, first: u64, count: u64) -> Vec<RunSummary> {
    (first..first + count).map(|seed| run_one(base, adversary, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, RawConfig};

    #[test]
    fn small_campaign_passes() {
        let base = validate_config(RawConfig { n_plus_1: 18, t: 2, k: 2, d: 2, seed: 0 }).unwrap();
        for adv in AdversaryChoice::ALL {
            let runs = run_campaign(&base, adv, 0, 10);
            let s = CampaignSummary::from_runs(&runs);
            assert!(s.ok(), "{adv}: {s:?}");
            assert_eq!(s.round_counts, BTreeMap::from([(2, 10)]));
        }
    }

    #[test]
    fn names_round_trip() {
        for adv in AdversaryChoice::ALL {
            assert_eq!(adv.to_string().parse::<AdversaryChoice>().unwrap(), adv);
        }
        assert!("sneaky".parse::<AdversaryChoice>().is_err());
    }
}
