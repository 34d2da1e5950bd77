//! Lockstep synchronous round engine with an adversary controlling the
//! faulty processes.
//!
//! Each round every process produces its honest payload first; the adversary
//! then decides, per faulty sender and receiver, what is actually delivered;
//! only after all sends are fixed do the receivers absorb them. Channels are
//! authenticated: the engine always hands the receiver the true sender.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::payload_digest;
use crate::model::{Config, DeliveryRecord, ExecutionTrace, ProcessId, RoundRecord, Value};
use crate::rng::{self, Purpose};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("protocol declares {declared} rounds but the run was asked for {requested}")]
    BudgetMismatch { declared: usize, requested: usize },
    #[error("no adjacent state can be built for equivocating process {0}")]
    NoAdjacentStates(ProcessId),
    #[error("invalid adversary schedule: {0}")]
    InvalidSchedule(String),
}

/// A per-process state machine driven by the engine.
pub trait RoundProtocol {
    fn owner(&self) -> ProcessId;

    /// Rounds this protocol instance expects to run.
    fn round_budget(&self) -> usize;

    /// The honest payload broadcast in `round` (1-based).
    fn outgoing(&self, round: usize) -> Vec<Value>;

    /// Absorbs the payload from `from`, `None` when nothing arrived.
    fn incoming(&mut self, round: usize, from: ProcessId, payload: Option<&[Value]>);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdversaryKind {
    /// No faults.
    Benign,
    /// `⌊t/k⌋` rounds of `k` crashes, nothing else.
    CrashPerRound,
    /// Crash rounds followed by a single equivocation round when `t mod k > 0`.
    CrashThenEquivocate,
    /// `t` processes equivocating in every round.
    Equivocating,
    Scripted,
    Random,
}

/// One adversary instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Directive {
    /// Crashes `process` in `round`: only receivers with index `< reach`
    /// get its payload that round; nothing is sent afterwards.
    Crash { process: ProcessId, round: usize, reach: usize },
    /// Sends an adjacent variant of the honest payload to `side_b` and the
    /// honest one to everyone else. `side_b = None` draws a random split.
    Equivocate { process: ProcessId, round: usize, side_b: Option<BTreeSet<ProcessId>> },
    /// Drops the payload to the listed receivers in `round`.
    Omit { process: ProcessId, round: usize, receivers: BTreeSet<ProcessId> },
    /// Delivers `payload` to `receiver` instead of the honest payload.
    Replace { process: ProcessId, round: usize, receiver: ProcessId, payload: Vec<Value> },
    /// Arbitrary seeded misbehaviour from `from_round` on.
    Random { process: ProcessId, from_round: usize },
}

impl Directive {
    pub fn process(&self) -> ProcessId {
        match self {
            Directive::Crash { process, .. }
            | Directive::Equivocate { process, .. }
            | Directive::Omit { process, .. }
            | Directive::Replace { process, .. }
            | Directive::Random { process, .. } => *process,
        }
    }

    fn round(&self) -> usize {
        match self {
            Directive::Crash { round, .. }
            | Directive::Equivocate { round, .. }
            | Directive::Omit { round, .. }
            | Directive::Replace { round, .. } => *round,
            Directive::Random { from_round, .. } => *from_round,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarySchedule {
    pub kind: AdversaryKind,
    /// Seed for the run-time choices (random splits, random payloads).
    pub seed: u64,
    pub directives: Vec<Directive>,
}

impl AdversarySchedule {
    pub fn benign(seed: u64) -> AdversarySchedule {
        AdversarySchedule { kind: AdversaryKind::Benign, seed, directives: Vec::new() }
    }

    pub fn scripted(seed: u64, directives: Vec<Directive>) -> AdversarySchedule {
        AdversarySchedule { kind: AdversaryKind::Scripted, seed, directives }
    }

    /// Every process the adversary ever controls.
    pub fn corrupted(&self) -> BTreeSet<ProcessId> {
        self.directives.iter().map(Directive::process).collect()
    }

    pub fn crash_round(&self, p: ProcessId) -> Option<usize> {
        self.directives.iter().find_map(|d| match d {
            Directive::Crash { process, round, .. } if *process == p => Some(*round),
            _ => None,
        })
    }

    /// Checks the fault budget, round bounds, process bounds and that no
    /// process is instructed after it crashed.
    pub fn validate(&self, cfg: &Config, rounds: usize) -> Result<(), SimError> {
        let corrupted = self.corrupted();
        if corrupted.len() > cfg.t {
            return Err(SimError::InvalidSchedule(format!(
                "{} processes corrupted, budget is {}",
                corrupted.len(),
                cfg.t
            )));
        }
        for d in &self.directives {
            if d.process().index() >= cfg.n_plus_1 {
                return Err(SimError::InvalidSchedule(format!("unknown process {}", d.process())));
            }
            if d.round() == 0 || d.round() > rounds {
                return Err(SimError::InvalidSchedule(format!(
                    "directive for round {} outside 1..={rounds}",
                    d.round()
                )));
            }
            if let Some(crash) = self.crash_round(d.process()) {
                let after = match d {
                    Directive::Crash { round, .. } => *round != crash,
                    other => other.round() > crash,
                };
                if after {
                    return Err(SimError::InvalidSchedule(format!(
                        "process {} instructed after crashing in round {crash}",
                        d.process()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `⌊t/k⌋` crash rounds of `k` fresh processes each, each crashing process
/// reaching a random prefix of receivers, plus one equivocation round by a
/// surviving process when `t mod k > 0`.
pub fn crash_schedule(cfg: &Config) -> AdversarySchedule {
    let mut rng = rng::stream(cfg.seed, Purpose::Schedule, 0, None);
    let mut pool: Vec<ProcessId> = cfg.processes().collect();
    pool.shuffle(&mut rng);
    let mut directives = Vec::new();
    let crash_rounds = if cfg.t == 0 { 0 } else { cfg.crash_rounds() };
    for round in 1..=crash_rounds {
        for _ in 0..cfg.k {
            let process = pool.pop().expect("t < n+1 leaves processes to crash");
            let reach = rng.gen_range(0..=cfg.n_plus_1);
            directives.push(Directive::Crash { process, round, reach });
        }
    }
    let kind = if cfg.t > 0 && cfg.remainder() > 0 {
        let process = pool.pop().expect("a survivor remains to equivocate");
        directives.push(Directive::Equivocate { process, round: crash_rounds + 1, side_b: None });
        AdversaryKind::CrashThenEquivocate
    } else {
        AdversaryKind::CrashPerRound
    };
    AdversarySchedule { kind, seed: cfg.seed, directives }
}

/// `t` randomly chosen processes equivocating with a fresh random split in
/// every one of `rounds` rounds.
pub fn equivocating_schedule(cfg: &Config, rounds: usize) -> AdversarySchedule {
    let mut rng = rng::stream(cfg.seed, Purpose::Schedule, 0, None);
    let mut pool: Vec<ProcessId> = cfg.processes().collect();
    pool.shuffle(&mut rng);
    let mut directives = Vec::new();
    for &process in pool.iter().take(cfg.t) {
        for round in 1..=rounds {
            directives.push(Directive::Equivocate { process, round, side_b: None });
        }
    }
    AdversarySchedule { kind: AdversaryKind::Equivocating, seed: cfg.seed, directives }
}

/// Up to `t` processes corrupted from seeded rounds on, sending arbitrary
/// well-formed payloads.
pub fn random_byzantine_schedule(cfg: &Config, rounds: usize) -> AdversarySchedule {
    let mut rng = rng::stream(cfg.seed, Purpose::Schedule, 0, None);
    let mut pool: Vec<ProcessId> = cfg.processes().collect();
    pool.shuffle(&mut rng);
    let count = if rounds == 0 { 0 } else { rng.gen_range(0..=cfg.t) };
    let directives = pool
        .iter()
        .take(count)
        .map(|&process| Directive::Random { process, from_round: rng.gen_range(1..=rounds) })
        .collect();
    AdversarySchedule { kind: AdversaryKind::Random, seed: cfg.seed, directives }
}

/// Splits receivers into two nonempty sides, resampling until both are.
pub fn random_partition(receivers: &[ProcessId], rng: &mut ChaCha8Rng) -> Option<BTreeSet<ProcessId>> {
    if receivers.len() < 2 {
        return None;
    }
    loop {
        let side_b: BTreeSet<_> = receivers.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !side_b.is_empty() && side_b.len() < receivers.len() {
            return Some(side_b);
        }
    }
}

/// A payload adjacent to `honest`: the two differ exactly in the entries
/// contributed by one process (the last letter of the entry's word).
///
/// Crashed processes are tried first, since missing or receiving their last
/// message is plausible to everyone; then the sender itself; then the rest.
/// A nonempty contribution is replaced by `⊥`; an empty one at the root
/// level is replaced by another domain value.
pub fn adjacent_variant(
    cfg: &Config,
    sender: ProcessId,
    honest: &[Value],
    crashed: &BTreeSet<ProcessId>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Value>> {
    let width = cfg.n_plus_1;
    if honest.len() == 1 {
        // Level-0 snapshot: the sender's own input.
        if cfg.d == 0 {
            return None;
        }
        let current = honest[0].index().map(|i| i as usize).unwrap_or(0);
        let shift = rng.gen_range(1..=cfg.d);
        return Some(vec![Value::V(((current + shift) % (cfg.d + 1)) as u16)]);
    }
    let mut pivots: Vec<ProcessId> = crashed.iter().copied().collect();
    pivots.shuffle(rng);
    pivots.push(sender);
    pivots.extend(cfg.processes().filter(|p| *p != sender && !crashed.contains(p)));
    for x in pivots {
        let positions: Vec<usize> = (0..honest.len()).filter(|i| i % width == x.index()).collect();
        if positions.iter().any(|&i| !honest[i].is_bottom()) {
            let mut variant = honest.to_vec();
            for i in positions {
                variant[i] = Value::Bottom;
            }
            return Some(variant);
        }
    }
    None
}

/// Payloads for one equivocation round by `byzantine`: receivers in `side_b`
/// get an adjacent variant of the honest state, the rest the honest state.
pub fn equivocation_round(
    cfg: &Config,
    byzantine: ProcessId,
    honest: &[Value],
    crashed: &BTreeSet<ProcessId>,
    side_b: Option<&BTreeSet<ProcessId>>,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<ProcessId, Vec<Value>>, SimError> {
    let receivers: Vec<ProcessId> = cfg.processes().filter(|p| *p != byzantine && !crashed.contains(p)).collect();
    let side_b = match side_b {
        Some(s) if !s.is_empty() && receivers.iter().any(|r| !s.contains(r)) => s.clone(),
        Some(_) => return Err(SimError::InvalidSchedule("equivocation split has an empty side".into())),
        None => random_partition(&receivers, rng).ok_or(SimError::NoAdjacentStates(byzantine))?,
    };
    let variant =
        adjacent_variant(cfg, byzantine, honest, crashed, rng).ok_or(SimError::NoAdjacentStates(byzantine))?;
    Ok(cfg
        .processes()
        .map(|r| {
            let payload = if side_b.contains(&r) { variant.clone() } else { honest.to_vec() };
            (r, payload)
        })
        .collect())
}

enum Sent {
    Honest,
    Omitted,
    Forged(Vec<Value>),
}

/// Runs `rounds` lockstep rounds. The returned trace carries deliveries and
/// the faulty set; decisions are filled in by the protocol layer.
pub fn run_synchronous<P: RoundProtocol>(
    cfg: &Config,
    processes: &mut [P],
    schedule: &AdversarySchedule,
    rounds: usize,
) -> Result<ExecutionTrace, SimError> {
    for p in processes.iter() {
        if p.round_budget() != rounds {
            return Err(SimError::BudgetMismatch { declared: p.round_budget(), requested: rounds });
        }
    }
    schedule.validate(cfg, rounds)?;
    let faulty = schedule.corrupted();
    let mut trace = ExecutionTrace { faulty_set: faulty.clone(), ..Default::default() };
    let mut crashed: BTreeSet<ProcessId> = BTreeSet::new();
    let mut previous: Vec<Vec<Value>> = vec![Vec::new(); processes.len()];

    for round in 1..=rounds {
        let honest: Vec<Vec<Value>> = processes.iter().map(|p| p.outgoing(round)).collect();
        let honest_digests: Vec<String> = honest.iter().map(|h| payload_digest(h)).collect();
        // sends[s][r]
        let mut sends: Vec<Vec<Sent>> = Vec::with_capacity(processes.len());
        let mut crashing_now = BTreeSet::new();
        for sender in cfg.processes() {
            let s = sender.index();
            let mut row: Vec<Sent> = cfg.processes().map(|_| Sent::Honest).collect();
            if crashed.contains(&sender) {
                row.iter_mut().for_each(|x| *x = Sent::Omitted);
                sends.push(row);
                continue;
            }
            if !faulty.contains(&sender) {
                sends.push(row);
                continue;
            }
            let mut brng = rng::stream(schedule.seed, Purpose::Behavior, round, Some(sender));
            for d in schedule.directives.iter().filter(|d| d.process() == sender) {
                match d {
                    Directive::Crash { round: cr, reach, .. } if *cr == round => {
                        for (r, x) in row.iter_mut().enumerate() {
                            if r >= *reach {
                                *x = Sent::Omitted;
                            }
                        }
                        crashing_now.insert(sender);
                    }
                    Directive::Equivocate { round: er, side_b, .. } if *er == round => {
                        let mut prng = rng::stream(schedule.seed, Purpose::Partition, round, Some(sender));
                        let payloads =
                            equivocation_round(cfg, sender, &honest[s], &crashed, side_b.as_ref(), &mut prng)?;
                        for (r, payload) in payloads {
                            if payload != honest[s] {
                                row[r.index()] = Sent::Forged(payload);
                            }
                        }
                    }
                    Directive::Omit { round: or, receivers, .. } if *or == round => {
                        for r in receivers {
                            if let Some(x) = row.get_mut(r.index()) {
                                *x = Sent::Omitted;
                            }
                        }
                    }
                    Directive::Replace { round: rr, receiver, payload, .. } if *rr == round => {
                        if let Some(x) = row.get_mut(receiver.index()) {
                            *x = Sent::Forged(payload.clone());
                        }
                    }
                    Directive::Random { from_round, .. } if *from_round <= round => {
                        for (r, x) in row.iter_mut().enumerate() {
                            *x = random_behaviour(
                                cfg,
                                sender,
                                ProcessId::from(r),
                                &honest,
                                &previous[s],
                                &crashed,
                                &mut brng,
                            );
                        }
                    }
                    _ => {}
                }
            }
            sends.push(row);
        }

        let mut record = RoundRecord { round, deliveries: Vec::new() };
        for receiver in cfg.processes() {
            let r = receiver.index();
            for sender in cfg.processes() {
                let s = sender.index();
                let flagged = faulty.contains(&sender);
                let (payload, digest): (Option<&[Value]>, Option<String>) = match &sends[s][r] {
                    Sent::Honest => (Some(&honest[s]), Some(honest_digests[s].clone())),
                    Sent::Omitted => (None, None),
                    Sent::Forged(v) => (Some(v.as_slice()), Some(payload_digest(v))),
                };
                processes[r].incoming(round, sender, payload);
                if let Some(payload_digest) = digest {
                    record.deliveries.push(DeliveryRecord {
                        round,
                        from: sender,
                        to: receiver,
                        payload_digest,
                        byzantine_flag: flagged,
                    });
                }
            }
        }
        trace.rounds.push(record);
        crashed.extend(crashing_now);
        previous = honest;
    }
    Ok(trace)
}

fn random_behaviour(
    cfg: &Config,
    sender: ProcessId,
    receiver: ProcessId,
    honest: &[Vec<Value>],
    stale: &[Value],
    crashed: &BTreeSet<ProcessId>,
    rng: &mut ChaCha8Rng,
) -> Sent {
    let own = &honest[sender.index()];
    let roll: f64 = rng.gen();
    if roll < 0.25 {
        Sent::Honest
    } else if roll < 0.40 {
        Sent::Omitted
    } else if roll < 0.65 {
        let mut v = own.clone();
        for x in v.iter_mut() {
            if rng.gen_bool(0.3) {
                *x = random_value(cfg, rng);
            }
        }
        Sent::Forged(v)
    } else if roll < 0.75 {
        // Impersonate the state of another process.
        let other = rng.gen_range(0..honest.len());
        Sent::Forged(honest[other].clone())
    } else if roll < 0.85 {
        // Replay the previous round's payload, stretched to the current size.
        if stale.is_empty() || !own.len().is_multiple_of(stale.len()) {
            return Sent::Forged(vec![random_value(cfg, rng); own.len()]);
        }
        let factor = own.len() / stale.len();
        Sent::Forged(stale.iter().flat_map(|v| std::iter::repeat_n(*v, factor)).collect())
    } else {
        match adjacent_variant(cfg, sender, own, crashed, rng) {
            Some(v) if receiver.index().is_multiple_of(2) => Sent::Forged(v),
            _ => Sent::Honest,
        }
    }
}

fn random_value(cfg: &Config, rng: &mut ChaCha8Rng) -> Value {
    let i = rng.gen_range(0..=cfg.d + 1);
    if i == cfg.d + 1 {
        Value::Bottom
    } else {
        Value::V(i as u16)
    }
}
