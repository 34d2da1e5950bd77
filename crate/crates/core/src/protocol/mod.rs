//! Byzantine synchronous k-set agreement with strong validity.
//!
//! Processes gossip their full information trees for `⌈t/k⌉ + 1` rounds,
//! validate each process through a quorum of consistent echoes, optionally
//! complete the last level of the identified faulty processes, pick a pivotal
//! group subtree, run the bottom-up consensus rule in it and decide the
//! smallest value seen at least `t + 1` times. With `k = 1` the protocol
//! falls back to exponential information gathering interactive consistency.

pub mod checks;
pub mod eig;
pub mod tree;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Config, ExecutionTrace, ProcessId, Value};
use crate::rng::{self, Purpose};
use crate::simnet::{run_synchronous, AdversarySchedule, RoundProtocol, SimError};

pub use tree::{distinct_words, gossip_round, EigTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("precondition unsatisfied: {0}")]
    PreconditionUnsatisfied(String),
    #[error("process {0}: no pivotal subtree (more than t misbehaving processes?)")]
    NoPivotalSubtree(ProcessId),
    #[error("no value reaches multiplicity {threshold}")]
    NoDecidableValue { threshold: usize },
    #[error("inputs: {0}")]
    BadInputs(String),
}

/// Per-process gossip state machine: broadcasts level `ℓ-1` of its tree in
/// round `ℓ` and files received snapshots under `w·sender`.
#[derive(Clone, Debug)]
pub struct GossipProcess {
    tree: EigTree,
    rounds: usize,
    d: usize,
}

impl GossipProcess {
    pub fn new(cfg: &Config, owner: ProcessId, input: Value) -> GossipProcess {
        let rounds = cfg.protocol_rounds();
        GossipProcess { tree: EigTree::new(owner, cfg.n_plus_1, rounds, input), rounds, d: cfg.d }
    }

    pub fn tree(&self) -> &EigTree {
        &self.tree
    }

    pub fn into_tree(self) -> EigTree {
        self.tree
    }
}

impl RoundProtocol for GossipProcess {
    fn owner(&self) -> ProcessId {
        self.tree.owner()
    }

    fn round_budget(&self) -> usize {
        self.rounds
    }

    fn outgoing(&self, round: usize) -> Vec<Value> {
        self.tree.level(round - 1).to_vec()
    }

    fn incoming(&mut self, round: usize, from: ProcessId, payload: Option<&[Value]>) {
        self.tree.absorb(round, from, payload, self.d);
    }
}

/// Quorums and resolution status seen by one process.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationState {
    pub quorum: Vec<Option<BTreeSet<ProcessId>>>,
    pub validated: BTreeSet<ProcessId>,
    /// Processes whose level-`R` entries were filled by the completion rule.
    pub completed: BTreeSet<ProcessId>,
}

impl ValidationState {
    pub fn resolved(&self) -> BTreeSet<ProcessId> {
        self.validated.union(&self.completed).copied().collect()
    }

    pub fn quorum_less(&self) -> BTreeSet<ProcessId> {
        self.quorum.iter().enumerate().filter(|(_, q)| q.is_none()).map(|(i, _)| ProcessId::from(i)).collect()
    }

    pub fn completion_applied(&self) -> bool {
        !self.completed.is_empty()
    }

    /// Words `w·b` (with `|w·b| = R`) filled by completion.
    pub fn completed_entries(&self, cfg: &Config) -> Vec<Vec<ProcessId>> {
        let r = cfg.big_r();
        let mut out = Vec::new();
        for &b in &self.completed {
            for w in all_words(cfg.n_plus_1, r - 1) {
                let mut word = w;
                word.push(b);
                out.push(word);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PivotalChoice {
    pub g: usize,
    pub completion_applied: bool,
}

fn all_words(width: usize, len: usize) -> Vec<Vec<ProcessId>> {
    let count = width.pow(len as u32);
    (0..count)
        .map(|mut idx| {
            let mut w = vec![ProcessId(0); len];
            for slot in w.iter_mut().rev() {
                *slot = ProcessId::from(idx % width);
                idx /= width;
            }
            w
        })
        .collect()
}

/// Maximal quorum of `p`: `p` together with every `q` such that
/// `cont(w·p·q) = cont(w·p)` for all `|w| < R`. Present only when it has at
/// least `(n+1) - t` members.
pub fn find_quorum(tree: &EigTree, p: ProcessId, cfg: &Config) -> Option<BTreeSet<ProcessId>> {
    let width = cfg.n_plus_1;
    let r = cfg.big_r();
    let mut echoes = vec![true; width];
    for level in 0..r {
        let parents = tree.level(level).len();
        let mid = tree.level(level + 1);
        let leaf = tree.level(level + 2);
        for w in 0..parents {
            let wp = w * width + p.index();
            let told = mid[wp];
            for (q, ok) in echoes.iter_mut().enumerate() {
                if *ok && leaf[wp * width + q] != told {
                    *ok = false;
                }
            }
        }
    }
    echoes[p.index()] = true;
    let quorum: BTreeSet<ProcessId> =
        echoes.iter().enumerate().filter(|(_, ok)| **ok).map(|(q, _)| ProcessId::from(q)).collect();
    (quorum.len() >= width - cfg.t).then_some(quorum)
}

pub fn validate(tree: &EigTree, cfg: &Config) -> ValidationState {
    let quorum: Vec<_> = cfg.processes().map(|p| find_quorum(tree, p, cfg)).collect();
    let validated = quorum.iter().enumerate().filter(|(_, q)| q.is_some()).map(|(i, _)| ProcessId::from(i)).collect();
    ValidationState { quorum, validated, completed: BTreeSet::new() }
}

/// Fills every level-`R` entry `w·b`, `b ∈ faulty`, with the value echoed by
/// at least `(n+1) - 2t` of the remaining processes, or `⊥` if none is.
pub fn apply_completion(tree: &mut EigTree, faulty: &BTreeSet<ProcessId>, cfg: &Config) -> Result<(), ProtocolError> {
    if faulty.len() != cfg.t {
        return Err(ProtocolError::PreconditionUnsatisfied(format!(
            "completion needs exactly t = {} identified faulty processes, got {}",
            cfg.t,
            faulty.len()
        )));
    }
    let width = cfg.n_plus_1;
    let r = cfg.big_r();
    let threshold = width - 2 * cfg.t;
    let parents = tree.level(r - 1).len();
    let mut updates = Vec::new();
    for &b in faulty {
        for w in 0..parents {
            let wb = w * width + b.index();
            let mut counts: BTreeMap<Value, usize> = BTreeMap::new();
            for q in cfg.processes().filter(|q| !faulty.contains(q)) {
                *counts.entry(tree.level(r + 1)[wb * width + q.index()]).or_default() += 1;
            }
            let value = counts.into_iter().find(|(_, c)| *c >= threshold).map(|(v, _)| v).unwrap_or(Value::Bottom);
            updates.push((wb, value));
        }
    }
    let level = tree.level_mut(r);
    for (idx, v) in updates {
        level[idx] = v;
    }
    Ok(())
}

/// Smallest group with fewer than `⌈t/k⌉` unresolved members.
pub fn select_pivotal(
    owner: ProcessId,
    validation: &ValidationState,
    cfg: &Config,
) -> Result<PivotalChoice, ProtocolError> {
    let resolved = validation.resolved();
    let r = cfg.big_r();
    (0..cfg.k)
        .find(|&g| cfg.group(g).iter().filter(|p| !resolved.contains(p)).count() < r)
        .map(|g| PivotalChoice { g, completion_applied: validation.completion_applied() })
        .ok_or(ProtocolError::NoPivotalSubtree(owner))
}

/// Most frequent value, ties going to the smallest in the value order.
pub fn plurality(values: impl IntoIterator<Item = Value>) -> Option<Value> {
    let mut counts: BTreeMap<Value, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let mut best: Option<(Value, usize)> = None;
    for (v, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((v, c));
        }
    }
    best.map(|(v, _)| v)
}

/// Bottom-up consensus inside the pivotal subtree: for levels `R-1` down to
/// 1, every word `w·b` of distinct group-`g` letters whose last letter is not
/// validated takes the plurality of its children `w·b·p`,
/// `p ∈ P(g) \ setproc(w·b)`.
pub fn apply_consensus_rule(tree: &mut EigTree, choice: PivotalChoice, validation: &ValidationState, cfg: &Config) {
    let group = cfg.group(choice.g);
    let r = cfg.big_r();
    for level in (1..r).rev() {
        for word in distinct_words(&group, level) {
            let b = *word.last().expect("level ≥ 1");
            if validation.validated.contains(&b) {
                continue;
            }
            let mut child = word.clone();
            child.push(ProcessId(0));
            let children = group.iter().filter(|p| !word.contains(p)).map(|&p| {
                *child.last_mut().unwrap() = p;
                tree.get(&child)
            });
            let children: Vec<Value> = children.collect();
            if let Some(v) = plurality(children) {
                tree.set(&word, v);
            }
        }
    }
}

/// `min {v ≠ ⊥ : multiplicity(v) ≥ t + 1}`.
pub fn decision(multiset: &[Value], t: usize) -> Result<Value, ProtocolError> {
    let mut counts: BTreeMap<Value, usize> = BTreeMap::new();
    for v in multiset.iter().filter(|v| !v.is_bottom()) {
        *counts.entry(*v).or_default() += 1;
    }
    counts.into_iter().find(|(_, c)| *c > t).map(|(v, _)| v).ok_or(ProtocolError::NoDecidableValue { threshold: t + 1 })
}

pub fn decide(tree: &EigTree, choice: PivotalChoice, cfg: &Config) -> Result<Value, ProtocolError> {
    let multiset: Vec<Value> = cfg.group(choice.g).iter().map(|p| tree.get(&[*p])).collect();
    decision(&multiset, cfg.t)
}

/// What one non-faulty process computed after the gossip phase.
#[derive(Clone, Debug)]
pub struct ProcessOutcome {
    /// The tree after completion and consensus (or the raw gossip tree for
    /// the `k = 1` path).
    pub tree: EigTree,
    pub validation: Option<ValidationState>,
    pub choice: Option<PivotalChoice>,
    /// Interactive-consistency vector for the `k = 1` path.
    pub vector: Option<Vec<Value>>,
    pub decision: Value,
}

#[derive(Clone, Debug)]
pub struct AgreementRun {
    pub trace: ExecutionTrace,
    pub inputs: BTreeMap<ProcessId, Value>,
    pub outcomes: BTreeMap<ProcessId, ProcessOutcome>,
}

impl AgreementRun {
    pub fn correct(&self) -> impl Iterator<Item = ProcessId> + '_ {
        self.inputs.keys().copied().filter(|p| !self.trace.faulty_set.contains(p))
    }

    /// Dump of every non-faulty tree, process by process.
    pub fn tree_dump(&self) -> String {
        self.outcomes.values().map(|o| o.tree.dump()).collect()
    }
}

/// Inputs drawn uniformly from `v_0..=v_d` on the inputs stream.
pub fn random_inputs(cfg: &Config) -> BTreeMap<ProcessId, Value> {
    let mut rng = rng::stream(cfg.seed, Purpose::Inputs, 0, None);
    cfg.processes().map(|p| (p, Value::V(rng.gen_range(0..=cfg.d) as u16))).collect()
}

fn check_inputs(cfg: &Config, inputs: &BTreeMap<ProcessId, Value>) -> Result<(), ProtocolError> {
    if inputs.len() != cfg.n_plus_1 || inputs.keys().any(|p| p.index() >= cfg.n_plus_1) {
        return Err(ProtocolError::BadInputs(format!("expected one input per process, got {}", inputs.len())));
    }
    if let Some((p, v)) = inputs.iter().find(|(_, v)| v.within_domain(cfg.d).is_bottom()) {
        return Err(ProtocolError::BadInputs(format!("process {p} has input {v} outside v0..v{}", cfg.d)));
    }
    Ok(())
}

/// Runs the gossip phase and returns every process's tree plus the trace.
pub fn gossip(
    cfg: &Config,
    inputs: &BTreeMap<ProcessId, Value>,
    adversary: &AdversarySchedule,
) -> Result<(ExecutionTrace, Vec<EigTree>), ProtocolError> {
    check_inputs(cfg, inputs)?;
    let mut procs: Vec<GossipProcess> = cfg.processes().map(|p| GossipProcess::new(cfg, p, inputs[&p])).collect();
    let trace = run_synchronous(cfg, &mut procs, adversary, cfg.protocol_rounds())?;
    Ok((trace, procs.into_iter().map(GossipProcess::into_tree).collect()))
}

/// Decision phase of one process on its gossip tree.
pub fn decide_locally(mut tree: EigTree, cfg: &Config) -> Result<ProcessOutcome, ProtocolError> {
    let owner = tree.owner();
    let mut validation = validate(&tree, cfg);
    if validation.validated.len() == cfg.n_plus_1 - cfg.t && cfg.t > 0 {
        let faulty = validation.quorum_less();
        apply_completion(&mut tree, &faulty, cfg)?;
        validation.completed = faulty;
    }
    let choice = select_pivotal(owner, &validation, cfg)?;
    apply_consensus_rule(&mut tree, choice, &validation, cfg);
    let decision = decide(&tree, choice, cfg)?;
    Ok(ProcessOutcome { tree, validation: Some(validation), choice: Some(choice), vector: None, decision })
}

/// Full protocol run: `⌈t/k⌉ + 1` gossip rounds (`t + 1` for `k = 1`),
/// then a local decision at every non-faulty process.
pub fn agree(
    cfg: &Config,
    inputs: &BTreeMap<ProcessId, Value>,
    adversary: &AdversarySchedule,
) -> Result<AgreementRun, ProtocolError> {
    if cfg.k == 1 {
        return eig::eig_consensus(cfg, inputs, adversary);
    }
    let (mut trace, trees) = gossip(cfg, inputs, adversary)?;
    let mut outcomes = BTreeMap::new();
    for tree in trees {
        let owner = tree.owner();
        if trace.faulty_set.contains(&owner) {
            continue;
        }
        let outcome = decide_locally(tree, cfg)?;
        trace.decisions.insert(owner, outcome.decision);
        outcomes.insert(owner, outcome);
    }
    Ok(AgreementRun { trace, inputs: inputs.clone(), outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_config, RawConfig};
    use crate::simnet::{crash_schedule, Directive};

    fn cfg(n_plus_1: usize, t: usize, k: usize, d: usize) -> Config {
        validate_config(RawConfig { n_plus_1, t, k, d, seed: 3 }).unwrap()
    }

    fn p(i: u32) -> ProcessId {
        ProcessId(i)
    }

    fn mixed_inputs(cfg: &Config) -> BTreeMap<ProcessId, Value> {
        cfg.processes().map(|p| (p, Value::V((p.0 as usize % (cfg.d + 1)) as u16))).collect()
    }

    #[test]
    fn all_correct_quorums_are_everyone() {
        let c = cfg(18, 2, 2, 2);
        let (_, trees) = gossip(&c, &mixed_inputs(&c), &AdversarySchedule::benign(0)).unwrap();
        for q in c.processes() {
            assert_eq!(find_quorum(&trees[0], q, &c).unwrap().len(), 18);
        }
    }

    #[test]
    fn silent_byzantine_processes_are_excluded_from_quorums() {
        let c = cfg(18, 2, 2, 2);
        let silent: BTreeSet<_> = [p(4), p(11)].into_iter().collect();
        let everyone: BTreeSet<_> = c.processes().collect();
        let directives = silent
            .iter()
            .flat_map(|&b| {
                (1..=2).map({
                    let everyone = everyone.clone();
                    move |round| Directive::Omit { process: b, round, receivers: everyone.clone() }
                })
            })
            .collect();
        let (_, trees) = gossip(&c, &mixed_inputs(&c), &AdversarySchedule::scripted(0, directives)).unwrap();
        let correct: BTreeSet<_> = c.processes().filter(|q| !silent.contains(q)).collect();
        let q = find_quorum(&trees[0], p(0), &c).unwrap();
        assert_eq!(q, correct);
    }

    #[test]
    fn equivocation_to_two_halves_has_no_quorum() {
        let c = cfg(18, 2, 2, 2);
        let b = p(5);
        let side_b: BTreeSet<_> = c.processes().filter(|q| *q != b && q.0 % 2 == 0).collect();
        let directives = vec![Directive::Equivocate { process: b, round: 1, side_b: Some(side_b) }];
        let (_, trees) = gossip(&c, &mixed_inputs(&c), &AdversarySchedule::scripted(0, directives)).unwrap();
        for tree in trees.iter().filter(|t| t.owner() != b) {
            assert!(find_quorum(tree, b, &c).is_none());
            // Oracle: brute-force the largest echoing set containing b.
            let told = tree.get(&[b]);
            let echoing = c.processes().filter(|&q| q == b || tree.get(&[b, q]) == told).count();
            assert!(echoing < 16);
        }
        // Different receivers hold different cont(b).
        let seen: BTreeSet<Value> = trees.iter().map(|t| t.get(&[b])).collect();
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn completion_uses_correct_echoes() {
        let c = cfg(18, 2, 2, 2);
        let mut tree = EigTree::new(p(0), 18, 2, Value::V(0));
        let faulty: BTreeSet<_> = [p(3), p(8)].into_iter().collect();
        for q in c.processes().filter(|q| !faulty.contains(q)) {
            tree.set(&[p(3), q], Value::V(1));
            tree.set(&[p(8), q], if q.0 % 2 == 0 { Value::V(0) } else { Value::V(2) });
        }
        tree.set(&[p(3)], Value::V(2));
        tree.set(&[p(8)], Value::V(2));
        apply_completion(&mut tree, &faulty, &c).unwrap();
        assert_eq!(tree.get(&[p(3)]), Value::V(1));
        assert_eq!(tree.get(&[p(8)]), Value::Bottom);
        let wrong: BTreeSet<_> = [p(3)].into_iter().collect();
        assert!(matches!(apply_completion(&mut tree, &wrong, &c), Err(ProtocolError::PreconditionUnsatisfied(_))));
    }

    fn state(c: &Config, unresolved: &[u32], completed: &[u32]) -> ValidationState {
        let quorum = c.processes().map(|q| (!unresolved.contains(&q.0)).then(BTreeSet::new)).collect();
        let validated = c.processes().filter(|q| !unresolved.contains(&q.0)).collect();
        ValidationState { quorum, validated, completed: completed.iter().map(|&i| p(i)).collect() }
    }

    #[test]
    fn pivotal_selection() {
        let c = cfg(18, 2, 2, 2);
        assert_eq!(select_pivotal(p(0), &state(&c, &[], &[]), &c).unwrap().g, 0);
        // R = 1: group 0 has one unresolved member, group 1 none.
        assert_eq!(select_pivotal(p(0), &state(&c, &[2], &[]), &c).unwrap().g, 1);
        assert!(matches!(select_pivotal(p(0), &state(&c, &[2, 3], &[]), &c), Err(ProtocolError::NoPivotalSubtree(_))));
        let done = select_pivotal(p(0), &state(&c, &[2, 3], &[2, 3]), &c).unwrap();
        assert_eq!(done, PivotalChoice { g: 0, completion_applied: true });
    }

    #[test]
    fn plurality_and_tie_break() {
        let v = |i| Value::V(i);
        assert_eq!(plurality(vec![v(2); 4]), Some(v(2)));
        let mut xs = vec![v(0); 5];
        xs.extend(vec![v(1); 3]);
        xs.push(Value::Bottom);
        assert_eq!(plurality(xs), Some(v(0)));
        assert_eq!(plurality(vec![v(1), v(0), v(1), v(0)]), Some(v(0)));
        assert_eq!(plurality(Vec::new()), None);
    }

    #[test]
    fn consensus_rule_rewrites_unvalidated_entries_bottom_up() {
        // R = 2 with k = 2: t = 3, d = 2 needs 26 processes.
        let c = cfg(26, 3, 2, 2);
        let mut tree = EigTree::new(p(0), 26, 3, Value::V(0));
        let b = p(4);
        for q in c.group(0).into_iter().filter(|q| *q != b) {
            tree.set(&[b, q], if q.0 < 14 { Value::V(2) } else { Value::V(1) });
        }
        tree.set(&[b], Value::V(0));
        let st = state(&c, &[4], &[]);
        apply_consensus_rule(&mut tree, PivotalChoice { g: 0, completion_applied: false }, &st, &c);
        // Group 0 minus P4 = {0,2,6,8,10,12} ∪ {14..24 even}: 6 × v2, 6 × v1 → tie → v1.
        assert_eq!(tree.get(&[b]), Value::V(1));
        // Validated entries untouched.
        tree.set(&[p(2)], Value::V(2));
        apply_consensus_rule(&mut tree, PivotalChoice { g: 0, completion_applied: false }, &st, &c);
        assert_eq!(tree.get(&[p(2)]), Value::V(2));
    }

    #[test]
    fn decision_examples() {
        let v = |i| Value::V(i);
        let mut c_g = vec![v(0); 5];
        c_g.extend(vec![v(1); 3]);
        assert_eq!(decision(&c_g, 2).unwrap(), v(0));
        assert_eq!(decision(&[v(1); 9], 2).unwrap(), v(1));
        let mut sparse = vec![v(0), v(0), v(1), v(1), v(2)];
        sparse.extend(vec![Value::Bottom; 4]);
        assert_eq!(decision(&sparse, 2), Err(ProtocolError::NoDecidableValue { threshold: 3 }));
    }

    #[test]
    fn unanimous_inputs_decide_that_value() {
        let c = cfg(18, 2, 2, 2);
        let inputs: BTreeMap<_, _> = c.processes().map(|q| (q, Value::V(1))).collect();
        for seed in 0..20 {
            let c = c.with_seed(seed);
            let run = agree(&c, &inputs, &crash_schedule(&c)).unwrap();
            assert_eq!(run.trace.round_count(), 2);
            assert!(run.trace.decisions.values().all(|v| *v == Value::V(1)));
            assert_eq!(run.trace.decisions.len(), 16);
        }
    }

    #[test]
    fn input_checks() {
        let c = cfg(18, 2, 2, 2);
        let mut inputs = mixed_inputs(&c);
        inputs.insert(p(0), Value::V(7));
        assert!(matches!(agree(&c, &inputs, &AdversarySchedule::benign(0)), Err(ProtocolError::BadInputs(_))));
        inputs.remove(&p(0));
        assert!(matches!(agree(&c, &inputs, &AdversarySchedule::benign(0)), Err(ProtocolError::BadInputs(_))));
    }
}
