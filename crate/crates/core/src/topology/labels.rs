use std::collections::{BTreeSet, HashMap};

use crate::model::{ProcessId, Value};

use super::complex::Simplex;

/// Interned view label. Two labels are equal iff their construction is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ViewLabel(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelKind {
    /// A round-0 view: the process's input.
    Input(Value),
    /// An opaque imported or user-supplied label.
    Named(String),
    /// A view naming the simplex of states the process heard from.
    Simplex(Simplex),
    /// The interpretation class of a facet for `process`. Every member of a
    /// class shares the process's own vertex, so the class is encoded by that
    /// vertex's label plus an ordinal among the classes sharing it.
    Interp { process: ProcessId, own: ViewLabel, ordinal: u32 },
}

/// Hash-consing store for view labels.
#[derive(Clone, Debug, Default)]
pub struct Labels {
    kinds: Vec<LabelKind>,
    index: HashMap<LabelKind, ViewLabel>,
}

impl Labels {
    pub fn new() -> Labels {
        Labels::default()
    }

    pub fn intern(&mut self, kind: LabelKind) -> ViewLabel {
        if let Some(l) = self.index.get(&kind) {
            return *l;
        }
        let l = ViewLabel(self.kinds.len() as u32);
        self.kinds.push(kind.clone());
        self.index.insert(kind, l);
        l
    }

    pub fn input(&mut self, v: Value) -> ViewLabel {
        self.intern(LabelKind::Input(v))
    }

    pub fn named(&mut self, s: &str) -> ViewLabel {
        self.intern(LabelKind::Named(s.to_string()))
    }

    pub fn simplex(&mut self, s: Simplex) -> ViewLabel {
        self.intern(LabelKind::Simplex(s))
    }

    pub fn kind(&self, l: ViewLabel) -> &LabelKind {
        &self.kinds[l.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Canonical text form; injective, and free of whitespace.
    pub fn render(&self, l: ViewLabel) -> String {
        match self.kind(l) {
            LabelKind::Input(v) => v.to_string(),
            LabelKind::Named(s) => s.clone(),
            LabelKind::Simplex(s) => {
                let inner: Vec<String> =
                    s.vertices().iter().map(|v| format!("{}:{}", v.process, self.render(v.label))).collect();
                format!("[{}]", inner.join(","))
            }
            LabelKind::Interp { process, own, ordinal } => {
                format!("i{}({})#{}", process, self.render(*own), ordinal)
            }
        }
    }

    /// Input values a view is built from: the inputs it transitively names.
    pub fn heard_values(&self, l: ViewLabel) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        self.collect_values(l, &mut out);
        out
    }

    fn collect_values(&self, l: ViewLabel, out: &mut BTreeSet<Value>) {
        match self.kind(l) {
            LabelKind::Input(v) => {
                out.insert(*v);
            }
            LabelKind::Named(s) => {
                if let Ok(v) = s.parse::<Value>() {
                    out.insert(v);
                }
            }
            LabelKind::Simplex(s) => {
                for v in s.vertices() {
                    self.collect_values(v.label, out);
                }
            }
            LabelKind::Interp { own, .. } => self.collect_values(*own, out),
        }
    }
}
