//! Exponential information gathering interactive consistency, used as the
//! consensus subroutine when `k = 1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Config, ProcessId, Value};
use crate::simnet::AdversarySchedule;

use super::{decision, gossip, AgreementRun, EigTree, ProcessOutcome, ProtocolError};

/// Resolved value of node `word`: leaves keep their contents, inner nodes
/// take the strict majority of their distinct-label children, `⊥` if none.
pub fn resolve(tree: &EigTree, word: &mut Vec<ProcessId>, leaf_level: usize) -> Value {
    if word.len() == leaf_level {
        return tree.get(word);
    }
    let mut counts: BTreeMap<Value, usize> = BTreeMap::new();
    let mut total = 0;
    for q in (0..tree.width()).map(ProcessId::from) {
        if word.contains(&q) {
            continue;
        }
        word.push(q);
        *counts.entry(resolve(tree, word, leaf_level)).or_default() += 1;
        word.pop();
        total += 1;
    }
    counts.into_iter().find(|(_, c)| 2 * c > total).map(|(v, _)| v).unwrap_or(Value::Bottom)
}

/// The interactive-consistency vector `(resolve(p))_p` of one process.
pub fn consistency_vector(tree: &EigTree, cfg: &Config) -> Vec<Value> {
    let leaf = cfg.t + 1;
    cfg.processes().map(|p| resolve(tree, &mut vec![p], leaf)).collect()
}

/// `k = 1`: `t + 1` gossip rounds, EIG resolution, then the same decision
/// function (smallest value with multiplicity at least `t + 1`).
pub fn eig_consensus(
    cfg: &Config,
    inputs: &BTreeMap<ProcessId, Value>,
    adversary: &AdversarySchedule,
) -> Result<AgreementRun, ProtocolError> {
    if cfg.k != 1 {
        return Err(ProtocolError::PreconditionUnsatisfied(format!("EIG consensus needs k = 1, got {}", cfg.k)));
    }
    if cfg.n_plus_1 <= 3 * cfg.t {
        return Err(ProtocolError::PreconditionUnsatisfied(format!(
            "EIG consensus needs n+1 > 3t, got n+1 = {} and t = {}",
            cfg.n_plus_1, cfg.t
        )));
    }
    let (mut trace, trees) = gossip(cfg, inputs, adversary)?;
    let faulty: BTreeSet<ProcessId> = trace.faulty_set.clone();
    let mut outcomes = BTreeMap::new();
    for tree in trees {
        let owner = tree.owner();
        if faulty.contains(&owner) {
            continue;
        }
        let vector = consistency_vector(&tree, cfg);
        let value = decision(&vector, cfg.t)?;
        trace.decisions.insert(owner, value);
        outcomes.insert(
            owner,
            ProcessOutcome { tree, validation: None, choice: None, vector: Some(vector), decision: value },
        );
    }
    Ok(AgreementRun { trace, inputs: inputs.clone(), outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, RawConfig};
    use crate::simnet::Directive;

    fn cfg() -> Config {
        validate_config(RawConfig { n_plus_1: 4, t: 1, k: 1, d: 1, seed: 0 }).unwrap()
    }

    fn inputs(vals: [u16; 4]) -> BTreeMap<ProcessId, Value> {
        vals.iter().enumerate().map(|(i, v)| (ProcessId::from(i), Value::V(*v))).collect()
    }

    #[test]
    fn minority_value_is_not_decided() {
        // v0 appears once, below t + 1 = 2.
        let run = eig_consensus(&cfg(), &inputs([0, 1, 1, 1]), &AdversarySchedule::benign(0)).unwrap();
        assert_eq!(run.trace.round_count(), 2);
        assert!(run.trace.decisions.values().all(|v| *v == Value::V(1)));
        for o in run.outcomes.values() {
            assert_eq!(o.vector.as_deref().unwrap(), &[Value::V(0), Value::V(1), Value::V(1), Value::V(1)]);
        }
    }

    #[test]
    fn unanimous_v0() {
        let run = eig_consensus(&cfg(), &inputs([0, 0, 0, 0]), &AdversarySchedule::benign(0)).unwrap();
        assert!(run.trace.decisions.values().all(|v| *v == Value::V(0)));
    }

    #[test]
    fn equivocating_byzantine_cannot_split_vectors() {
        for seed in 0..64 {
            let directives =
                (1..=2).map(|round| Directive::Equivocate { process: ProcessId(2), round, side_b: None }).collect();
            let sched = AdversarySchedule::scripted(seed, directives);
            let run = eig_consensus(&cfg(), &inputs([0, 1, 0, 1]), &sched).unwrap();
            let vectors: BTreeSet<_> = run.outcomes.values().map(|o| o.vector.clone().unwrap()).collect();
            assert_eq!(vectors.len(), 1, "seed {seed}");
            let v = vectors.into_iter().next().unwrap();
            for p in [0usize, 1, 3] {
                assert_eq!(v[p], Value::V([0, 1, 0, 1][p]));
            }
        }
    }

    #[test]
    fn rejects_k_above_one() {
        let c = validate_config(RawConfig { n_plus_1: 18, t: 2, k: 2, d: 2, seed: 0 }).unwrap();
        let inputs = c.processes().map(|p| (p, Value::V(0))).collect();
        assert!(eig_consensus(&c, &inputs, &AdversarySchedule::benign(0)).is_err());
    }
}
