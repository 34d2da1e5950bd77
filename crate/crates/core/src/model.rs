//! Shared vocabulary: processes, values, system parameters and execution traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense process index in `[0, n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessId(pub u32);

impl ProcessId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Group membership used by the agreement protocol: `index mod k`.
    pub fn group(self, k: usize) -> usize {
        self.index() % k
    }
}

impl From<usize> for ProcessId {
    fn from(i: usize) -> Self {
        ProcessId(i as u32)
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An input value `v_i` or the absent value `⊥`.
///
/// The derived order is `⊥ < v_0 < v_1 < …`, which every minimum and
/// tie-break in the crate relies on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    #[default]
    Bottom,
    V(u16),
}

impl Value {
    pub fn is_bottom(self) -> bool {
        matches!(self, Value::Bottom)
    }

    /// Index of a proper value, `None` for `⊥`.
    pub fn index(self) -> Option<u16> {
        match self {
            Value::Bottom => None,
            Value::V(i) => Some(i),
        }
    }

    /// Coerces values outside `v_0..=v_d` to `⊥`.
    pub fn within_domain(self, d: usize) -> Value {
        match self {
            Value::V(i) if (i as usize) <= d => self,
            _ => Value::Bottom,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bottom => write!(f, "_"),
            Value::V(i) => write!(f, "v{i}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse value {0:?}")]
pub struct ParseValueError(pub String);

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "_" | "bot" | "⊥" => Ok(Value::Bottom),
            _ => {
                let digits = s.strip_prefix('v').unwrap_or(s);
                digits.parse::<u16>().map(Value::V).map_err(|_| ParseValueError(s.to_string()))
            }
        }
    }
}

/// Candidate parameters before validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawConfig {
    pub n_plus_1: usize,
    pub t: usize,
    pub k: usize,
    pub d: usize,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("parameter order violated: {0}")]
    ParameterOrderViolation(String),
    #[error("resilience violated: n+1 = {n_plus_1} < k*t*(d+2)+k = {required}")]
    ResilienceViolation { n_plus_1: usize, required: usize },
}

/// Validated system parameters with derived quantities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub n_plus_1: usize,
    pub t: usize,
    pub k: usize,
    pub d: usize,
    pub seed: u64,
}

impl Config {
    /// Parameters for the topology harness: only `k ≥ 1`, `n+1 ≥ 1` and
    /// `t ≤ n` are enforced.
    pub fn relaxed(raw: RawConfig) -> Result<Config, ConfigError> {
        if raw.n_plus_1 == 0 {
            return Err(ConfigError::ParameterOrderViolation("n+1 must be at least 1".into()));
        }
        if raw.k == 0 {
            return Err(ConfigError::ParameterOrderViolation("k must be at least 1".into()));
        }
        if raw.t >= raw.n_plus_1 {
            return Err(ConfigError::ParameterOrderViolation(format!(
                "t = {} leaves no correct process among {}",
                raw.t, raw.n_plus_1
            )));
        }
        Ok(Config { n_plus_1: raw.n_plus_1, t: raw.t, k: raw.k, d: raw.d, seed: raw.seed })
    }

    /// `n`, the largest process index.
    pub fn n(&self) -> usize {
        self.n_plus_1 - 1
    }

    /// `R = ⌈t/k⌉`.
    pub fn big_r(&self) -> usize {
        self.t.div_ceil(self.k)
    }

    /// `r = ⌊t/k⌋`, the number of crash rounds.
    pub fn crash_rounds(&self) -> usize {
        self.t / self.k
    }

    /// `m = t mod k`.
    pub fn remainder(&self) -> usize {
        self.t % self.k
    }

    /// Communication rounds used by the agreement protocol.
    pub fn protocol_rounds(&self) -> usize {
        if self.k == 1 {
            self.t + 1
        } else {
            self.big_r() + 1
        }
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcessId> + Clone {
        (0..self.n_plus_1).map(ProcessId::from)
    }

    pub fn group(&self, g: usize) -> Vec<ProcessId> {
        self.processes().filter(|p| p.group(self.k) == g).collect()
    }

    pub fn groups(&self) -> Vec<Vec<ProcessId>> {
        (0..self.k).map(|g| self.group(g)).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = Value> {
        (0..=self.d).map(|i| Value::V(i as u16))
    }

    pub fn with_seed(&self, seed: u64) -> Config {
        Config { seed, ..self.clone() }
    }
}

/// Minimum process count for the agreement protocol: `k·t·(d+2) + k`.
pub fn required_processes(t: usize, k: usize, d: usize) -> usize {
    k * t * (d + 2) + k
}

pub fn validate_config(raw: RawConfig) -> Result<Config, ConfigError> {
    if raw.k < 1 {
        return Err(ConfigError::ParameterOrderViolation("k must be at least 1".into()));
    }
    if raw.t < raw.k {
        return Err(ConfigError::ParameterOrderViolation(format!("t = {} is smaller than k = {}", raw.t, raw.k)));
    }
    if raw.d < raw.k {
        return Err(ConfigError::ParameterOrderViolation(format!("d = {} is smaller than k = {}", raw.d, raw.k)));
    }
    let required = required_processes(raw.t, raw.k, raw.d);
    if raw.n_plus_1 < required {
        return Err(ConfigError::ResilienceViolation { n_plus_1: raw.n_plus_1, required });
    }
    Ok(Config { n_plus_1: raw.n_plus_1, t: raw.t, k: raw.k, d: raw.d, seed: raw.seed })
}

/// One delivered message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub round: usize,
    pub from: ProcessId,
    pub to: ProcessId,
    pub payload_digest: String,
    pub byzantine_flag: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub deliveries: Vec<DeliveryRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub rounds: Vec<RoundRecord>,
    pub decisions: BTreeMap<ProcessId, Value>,
    pub faulty_set: BTreeSet<ProcessId>,
}

#[derive(Serialize)]
struct DeliveryLine<'a> {
    record: &'static str,
    round: usize,
    from: ProcessId,
    to: ProcessId,
    payload_digest: &'a str,
    byzantine_flag: bool,
}

#[derive(Serialize)]
struct DecisionLine<'a> {
    record: &'static str,
    rounds: usize,
    faulty: &'a BTreeSet<ProcessId>,
    decisions: BTreeMap<String, String>,
}

impl ExecutionTrace {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn distinct_decisions(&self) -> BTreeSet<Value> {
        self.decisions.values().copied().collect()
    }

    /// Line-delimited JSON: one record per delivery, then a decision record.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for round in &self.rounds {
            for d in &round.deliveries {
                let line = DeliveryLine {
                    record: "delivery",
                    round: d.round,
                    from: d.from,
                    to: d.to,
                    payload_digest: &d.payload_digest,
                    byzantine_flag: d.byzantine_flag,
                };
                out.push_str(&serde_json::to_string(&line).expect("delivery record serializes"));
                out.push('\n');
            }
        }
        let decisions = self.decisions.iter().map(|(p, v)| (p.to_string(), v.to_string())).collect();
        let line = DecisionLine { record: "decisions", rounds: self.rounds.len(), faulty: &self.faulty_set, decisions };
        out.push_str(&serde_json::to_string(&line).expect("decision record serializes"));
        out.push('\n');
        out
    }

    /// SHA-256 of the JSONL export, hex encoded.
    pub fn digest(&self) -> String {
        crate::digest::hex_sha256(self.to_jsonl().as_bytes())
    }
}
