//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! mode = agree
//! n_plus_1 = 18
//! t = 2
//! k = 2
//! d = 2
//! adversary = crash
//! inputs = random
//! seed = 7
//! ```
//!
//! | key | meaning |
//! |-----|---------|
//! | `mode` | `agree`, `consensus`, `scenario-complex`, `shellability`, `connectivity`, `carrier-check`, `decision-search` |
//! | `n_plus_1`, `t`, `k`, `d` | system parameters |
//! | `seed` | run seed (default 0) |
//! | `adversary` | `benign`, `crash`, `equivocating`, `random`, `scripted` |
//! | `script` | `;`-separated directives for `adversary = scripted` |
//! | `inputs` | `random` or a comma list such as `v0,v1,v1` |
//! | `facet_budget`, `search_budget`, `cell_budget` | enumeration limits |
//! | `complex` | inline facets separated by `\|`, tokens `process:label` |
//! | `complex_file` | facet-list file, relative to the scenario file |
//! | `values` | input values for generated complexes (default 2) |
//! | `input_facet` | input facet for `scenario-complex`, comma list |
//! | `degree` | top degree for `connectivity` |
//! | `operator` | `crash`, `equivocation`, `crash-equivocate` |
//! | `round` | crash round for `operator = crash` |
//! | `source` | `round0`, `scenario` or `resolved` for `decision-search` |
//! | `export` | write the resulting complex to this file |
//!
//! Script directives: `crash P R REACH`, `equivocate P R [B1,B2,..]`,
//! `omit P R Q1,Q2,..`, `replace P R Q V1,V2,..`, `random P R`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kset_core::campaign::{AdversaryChoice, AdversarySpec};
use kset_core::simnet::Directive;
use kset_core::{ProcessId, RawConfig, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Agree,
    Consensus,
    ScenarioComplex,
    Shellability,
    Connectivity,
    CarrierCheck,
    DecisionSearch,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        Ok(match s {
            "agree" => Mode::Agree,
            "consensus" => Mode::Consensus,
            "scenario-complex" => Mode::ScenarioComplex,
            "shellability" => Mode::Shellability,
            "connectivity" => Mode::Connectivity,
            "carrier-check" => Mode::CarrierCheck,
            "decision-search" => Mode::DecisionSearch,
            other => return Err(format!("unknown mode {other:?}")),
        })
    }
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Agree => "agree",
            Mode::Consensus => "consensus",
            Mode::ScenarioComplex => "scenario-complex",
            Mode::Shellability => "shellability",
            Mode::Connectivity => "connectivity",
            Mode::CarrierCheck => "carrier-check",
            Mode::DecisionSearch => "decision-search",
        }
    }

    pub fn is_protocol(self) -> bool {
        matches!(self, Mode::Agree | Mode::Consensus)
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub mode: Mode,
    entries: BTreeMap<String, (usize, String)>,
    base_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "mode",
    "n_plus_1",
    "t",
    "k",
    "d",
    "seed",
    "adversary",
    "script",
    "inputs",
    "facet_budget",
    "search_budget",
    "cell_budget",
    "complex",
    "complex_file",
    "values",
    "input_facet",
    "degree",
    "operator",
    "round",
    "source",
    "export",
];

impl Scenario {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Scenario, CliError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| CliError::Parse(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Parse(format!("line {}: unknown key {key:?}", n + 1)));
            }
            if entries.insert(key.clone(), (n + 1, value.trim().to_string())).is_some() {
                return Err(CliError::Parse(format!("line {}: duplicate key {key:?}", n + 1)));
            }
        }
        let (_, mode) = entries.get("mode").ok_or_else(|| CliError::Parse("missing key \"mode\"".into()))?;
        let mode = mode.parse().map_err(CliError::Parse)?;
        Ok(Scenario { mode, entries, base_dir: base_dir.to_path_buf() })
    }

    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn number<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Parse(format!("line {line}: {key} must be a number, got {v:?}"))),
        }
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.number(key)?.ok_or_else(|| CliError::Parse(format!("mode {} needs key {key:?}", self.mode.name())))
    }

    pub fn positive(&self, key: &str, default: u64) -> Result<u64, CliError> {
        let v = self.number::<u64>(key)?.unwrap_or(default);
        if v == 0 {
            return Err(CliError::Parse(format!("{key} must be positive")));
        }
        Ok(v)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        Ok(self.number("seed")?.unwrap_or(0))
    }

    pub fn raw_config(&self, seed: u64) -> Result<RawConfig, CliError> {
        Ok(RawConfig {
            n_plus_1: self.required("n_plus_1")?,
            t: self.required("t")?,
            k: self.required("k")?,
            d: self.number("d")?.unwrap_or(1),
            seed,
        })
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        self.base_dir.join(file)
    }

    pub fn adversary(&self) -> Result<AdversarySpec, CliError> {
        let kind = self.get("adversary").unwrap_or("benign");
        if kind == "scripted" {
            let script =
                self.get("script").ok_or_else(|| CliError::Parse("adversary = scripted needs a script".into()))?;
            return parse_script(script).map(AdversarySpec::Scripted);
        }
        if self.get("script").is_some() {
            return Err(CliError::Parse("script is only valid with adversary = scripted".into()));
        }
        kind.parse::<AdversaryChoice>().map(AdversarySpec::Generated).map_err(CliError::Parse)
    }

    /// `None` for random inputs.
    pub fn inputs(&self, n_plus_1: usize) -> Result<Option<BTreeMap<ProcessId, Value>>, CliError> {
        match self.get("inputs") {
            None | Some("random") => Ok(None),
            Some(list) => {
                let values = parse_values(list)?;
                if values.len() != n_plus_1 {
                    return Err(CliError::Parse(format!(
                        "inputs lists {} values for {n_plus_1} processes",
                        values.len()
                    )));
                }
                Ok(Some(values.into_iter().enumerate().map(|(p, v)| (ProcessId::from(p), v)).collect()))
            }
        }
    }
}

/// Comma list of values; bare integers are accepted as `v<i>`.
pub fn parse_values(list: &str) -> Result<Vec<Value>, CliError> {
    list.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<u16>()
                .map(Value::V)
                .or_else(|_| s.parse::<Value>())
                .map_err(|_| CliError::Parse(format!("bad value {s:?}")))
        })
        .collect()
}

fn parse_script(script: &str) -> Result<Vec<Directive>, CliError> {
    let mut out = Vec::new();
    for part in script.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let err = || CliError::Parse(format!("bad directive {part:?}"));
        let words: Vec<&str> = part.split_whitespace().collect();
        let num = |i: usize| -> Result<usize, CliError> { words.get(i).and_then(|w| w.parse().ok()).ok_or_else(err) };
        let procs = |i: usize| -> Result<BTreeSet<ProcessId>, CliError> {
            words
                .get(i)
                .ok_or_else(err)?
                .split(',')
                .map(|w| w.trim().parse::<u32>().map(ProcessId).map_err(|_| err()))
                .collect()
        };
        let process = ProcessId(num(1)? as u32);
        let round = num(2)?;
        let d = match words[0] {
            "crash" => Directive::Crash { process, round, reach: num(3)? },
            "equivocate" => {
                Directive::Equivocate { process, round, side_b: if words.len() > 3 { Some(procs(3)?) } else { None } }
            }
            "omit" => Directive::Omit { process, round, receivers: procs(3)? },
            "replace" => Directive::Replace {
                process,
                round,
                receiver: ProcessId(num(3)? as u32),
                payload: parse_values(words.get(4).ok_or_else(err)?)?,
            },
            "random" => Directive::Random { process, from_round: round },
            _ => return Err(err()),
        };
        out.push(d);
    }
    Ok(out)
}
