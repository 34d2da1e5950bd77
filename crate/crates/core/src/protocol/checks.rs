//! Post-run invariant checks over every pair of non-faulty processes.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{Config, ProcessId, Value};

use super::AgreementRun;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    RoundCount { expected: usize, got: usize },
    MissingDecision(ProcessId),
    Agreement { distinct: usize, k: usize },
    StrongValidity { process: ProcessId, value: Value },
    ValidatedMismatch { i: ProcessId, j: ProcessId, word: Vec<ProcessId> },
    CompletedMismatch { i: ProcessId, j: ProcessId, word: Vec<ProcessId> },
    PivotalMismatch { i: ProcessId, j: ProcessId, g: usize, p: ProcessId },
    VectorMismatch { i: ProcessId, j: ProcessId },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations of termination, agreement or strong validity.
    pub fn task_violations(&self) -> usize {
        self.violations
            .iter()
            .filter(|v| {
                matches!(
                    v,
                    Violation::RoundCount { .. }
                        | Violation::MissingDecision(_)
                        | Violation::Agreement { .. }
                        | Violation::StrongValidity { .. }
                )
            })
            .count()
    }

    /// Disagreements between validated, completed or pivotal entries.
    pub fn lemma_violations(&self) -> usize {
        self.violations.len() - self.task_violations()
    }
}

/// Checks termination, agreement and strong validity on the trace, then the
/// pairwise tree consistency properties the protocol relies on.
pub fn check_run(run: &AgreementRun, cfg: &Config) -> CheckReport {
    let mut violations = Vec::new();
    let trace = &run.trace;
    let expected = cfg.protocol_rounds();
    if trace.round_count() != expected {
        violations.push(Violation::RoundCount { expected, got: trace.round_count() });
    }
    let correct: Vec<ProcessId> = run.correct().collect();
    for p in &correct {
        if !trace.decisions.contains_key(p) {
            violations.push(Violation::MissingDecision(*p));
        }
    }
    let distinct = trace.distinct_decisions();
    if distinct.len() > cfg.k {
        violations.push(Violation::Agreement { distinct: distinct.len(), k: cfg.k });
    }
    let correct_inputs: BTreeSet<Value> = correct.iter().map(|p| run.inputs[p]).collect();
    for (p, v) in &trace.decisions {
        if !correct_inputs.contains(v) {
            violations.push(Violation::StrongValidity { process: *p, value: *v });
        }
    }

    let r = cfg.big_r();
    let outcomes: Vec<_> = run.outcomes.iter().collect();
    for (a, (i, oi)) in outcomes.iter().enumerate() {
        for (j, oj) in outcomes.iter().skip(a + 1) {
            if let (Some(vi), Some(vj)) = (&oi.vector, &oj.vector) {
                if vi != vj {
                    violations.push(Violation::VectorMismatch { i: **i, j: **j });
                }
            }
            let (Some(si), Some(sj)) = (&oi.validation, &oj.validation) else { continue };
            // Validated at both: all entries w·p with |w| < R agree.
            for p in si.validated.intersection(&sj.validated) {
                if let Some(word) = first_mismatch(&oi.tree, &oj.tree, *p, 1..=r, cfg) {
                    violations.push(Violation::ValidatedMismatch { i: **i, j: **j, word });
                }
            }
            // Completed at one, completed or validated at the other: the
            // level-R entries agree.
            let pairs = [(si, sj, **i, **j, &oi.tree, &oj.tree), (sj, si, **j, **i, &oj.tree, &oi.tree)];
            for (sa, sb, ia, ib, ta, tb) in pairs {
                for p in &sa.completed {
                    if sb.completed.contains(p) || sb.validated.contains(p) {
                        if let Some(word) = first_mismatch(ta, tb, *p, r..=r, cfg) {
                            violations.push(Violation::CompletedMismatch { i: ia, j: ib, word });
                        }
                    }
                }
            }
            if let (Some(ci), Some(cj)) = (oi.choice, oj.choice) {
                if ci.g == cj.g {
                    for p in cfg.group(ci.g) {
                        if oi.tree.get(&[p]) != oj.tree.get(&[p]) {
                            violations.push(Violation::PivotalMismatch { i: **i, j: **j, g: ci.g, p });
                        }
                    }
                }
            }
        }
    }
    CheckReport { violations }
}

fn first_mismatch(
    a: &super::EigTree,
    b: &super::EigTree,
    p: ProcessId,
    levels: std::ops::RangeInclusive<usize>,
    cfg: &Config,
) -> Option<Vec<ProcessId>> {
    let width = cfg.n_plus_1;
    for level in levels {
        let parents = a.level(level - 1).len();
        for w in 0..parents {
            let idx = w * width + p.index();
            if a.level(level)[idx] != b.level(level)[idx] {
                return Some(a.word_of(level, idx));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, RawConfig};
    use crate::protocol::{agree, random_inputs};
    use crate::simnet::{crash_schedule, AdversarySchedule};

    #[test]
    fn benign_and_crash_runs_pass() {
        let cfg = validate_config(RawConfig { n_plus_1: 18, t: 2, k: 2, d: 2, seed: 0 }).unwrap();
        for seed in 0..30 {
            let cfg = cfg.with_seed(seed);
            let inputs = random_inputs(&cfg);
            for sched in [AdversarySchedule::benign(seed), crash_schedule(&cfg)] {
                let run = agree(&cfg, &inputs, &sched).unwrap();
                let report = check_run(&run, &cfg);
                assert!(report.ok(), "{:?}", report.violations);
            }
        }
    }

    #[test]
    fn tampered_decision_is_caught() {
        let cfg = validate_config(RawConfig { n_plus_1: 18, t: 2, k: 2, d: 2, seed: 0 }).unwrap();
        let inputs = cfg.processes().map(|p| (p, Value::V(1))).collect();
        let mut run = agree(&cfg, &inputs, &AdversarySchedule::benign(0)).unwrap();
        run.trace.decisions.insert(ProcessId(0), Value::V(0));
        run.trace.decisions.insert(ProcessId(1), Value::V(2));
        let report = check_run(&run, &cfg);
        assert!(report.violations.contains(&Violation::Agreement { distinct: 3, k: 2 }));
        assert!(report.task_violations() >= 3);
    }
}
