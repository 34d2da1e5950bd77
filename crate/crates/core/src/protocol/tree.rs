use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{ProcessId, Value};

/// Exponential information gathering tree held by one process.
///
/// Node `w = p_1 … p_x` stores what `p_x` said that `p_{x-1}` said … that
/// `p_1` had as input. Every node above the last level has one child per
/// process, repeated labels included. Level `ℓ` is stored densely as the
/// base-`(n+1)` encoding of its words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigTree {
    owner: ProcessId,
    width: usize,
    levels: Vec<Vec<Value>>,
}

impl EigTree {
    /// A tree of the given depth with `cont(λ) = input` and `⊥` elsewhere.
    pub fn new(owner: ProcessId, width: usize, depth: usize, input: Value) -> EigTree {
        let mut levels = Vec::with_capacity(depth + 1);
        let mut size = 1usize;
        for _ in 0..=depth {
            levels.push(vec![Value::Bottom; size]);
            size *= width;
        }
        levels[0][0] = input;
        EigTree { owner, width, levels }
    }

    pub fn owner(&self) -> ProcessId {
        self.owner
    }

    /// Number of processes, i.e. children per inner node.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn index_of(&self, word: &[ProcessId]) -> usize {
        word.iter().fold(0, |acc, p| acc * self.width + p.index())
    }

    pub fn word_of(&self, level: usize, mut index: usize) -> Vec<ProcessId> {
        let mut word = vec![ProcessId(0); level];
        for slot in word.iter_mut().rev() {
            *slot = ProcessId::from(index % self.width);
            index /= self.width;
        }
        word
    }

    pub fn get(&self, word: &[ProcessId]) -> Value {
        self.levels[word.len()][self.index_of(word)]
    }

    pub fn set(&mut self, word: &[ProcessId], value: Value) {
        let idx = self.index_of(word);
        self.levels[word.len()][idx] = value;
    }

    pub fn level(&self, level: usize) -> &[Value] {
        &self.levels[level]
    }

    pub fn level_mut(&mut self, level: usize) -> &mut [Value] {
        &mut self.levels[level]
    }

    /// Index of child `wp` given the index of `w`.
    pub fn child(&self, parent_index: usize, p: ProcessId) -> usize {
        parent_index * self.width + p.index()
    }

    /// Stores a level-`(level-1)` snapshot received from `sender` as the
    /// `w·sender` entries of `level`. A missing or mis-sized payload leaves
    /// the entries at `⊥`; out-of-domain values are coerced to `⊥`.
    pub fn absorb(&mut self, level: usize, sender: ProcessId, payload: Option<&[Value]>, d: usize) {
        let width = self.width;
        let expected = self.levels[level - 1].len();
        let target = &mut self.levels[level];
        match payload {
            Some(values) if values.len() == expected => {
                for (w, v) in values.iter().enumerate() {
                    target[w * width + sender.index()] = v.within_domain(d);
                }
            }
            _ => {
                for w in 0..expected {
                    target[w * width + sender.index()] = Value::Bottom;
                }
            }
        }
    }

    /// `(word, value)` pairs, one per line, words as dash-separated indices
    /// (`λ` for the root).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (level, values) in self.levels.iter().enumerate() {
            for (idx, v) in values.iter().enumerate() {
                let word = self.word_of(level, idx);
                let label = if word.is_empty() {
                    "λ".to_string()
                } else {
                    word.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
                };
                let _ = writeln!(out, "{} {} {}", self.owner, label, v);
            }
        }
        out
    }
}

/// Writes the level-`(level-1)` snapshots of every delivering sender into
/// `tree`. Senders absent from `deliveries` leave their subtree at `⊥`.
pub fn gossip_round(tree: &mut EigTree, level: usize, deliveries: &BTreeMap<ProcessId, Vec<Value>>, d: usize) {
    for (sender, snapshot) in deliveries {
        tree.absorb(level, *sender, Some(snapshot), d);
    }
}

/// Iterator over words of `level` whose letters are pairwise distinct and
/// all drawn from `alphabet`.
pub fn distinct_words(alphabet: &[ProcessId], level: usize) -> Vec<Vec<ProcessId>> {
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(level);
    extend_distinct(alphabet, level, &mut word, &mut out);
    out
}

fn extend_distinct(alphabet: &[ProcessId], level: usize, word: &mut Vec<ProcessId>, out: &mut Vec<Vec<ProcessId>>) {
    if word.len() == level {
        out.push(word.clone());
        return;
    }
    for &p in alphabet {
        if !word.contains(&p) {
            word.push(p);
            extend_distinct(alphabet, level, word, out);
            word.pop();
        }
    }
}
