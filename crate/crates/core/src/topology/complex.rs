use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::model::ProcessId;

use super::labels::{Labels, ViewLabel};
use super::TopologyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub process: ProcessId,
    pub label: ViewLabel,
}

impl Vertex {
    pub fn new(process: ProcessId, label: ViewLabel) -> Vertex {
        Vertex { process, label }
    }
}

/// A name-view simplex: vertices sorted by process, one per process.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Simplex, TopologyError> {
        vertices.sort();
        vertices.dedup();
        if vertices.windows(2).any(|w| w[0].process == w[1].process) {
            return Err(TopologyError::NameViewViolation(vertices[0].process));
        }
        Ok(Simplex(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<Vertex>) -> Simplex {
        debug_assert!(vertices.windows(2).all(|w| w[0].process < w[1].process));
        Simplex(vertices)
    }

    pub fn empty() -> Simplex {
        Simplex(Vec::new())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|σ| − 1`; the empty simplex has dimension −1.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn names(&self) -> Vec<ProcessId> {
        self.0.iter().map(|v| v.process).collect()
    }

    pub fn vertex_of(&self, p: ProcessId) -> Option<Vertex> {
        self.0.binary_search_by_key(&p, |v| v.process).ok().map(|i| self.0[i])
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.len() <= other.len() && self.0.iter().all(|v| other.contains(v))
    }

    pub fn intersection(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|v| other.contains(v)).collect())
    }

    pub fn without(&self, idx: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(idx);
        Simplex(v)
    }

    /// All faces of dimension exactly `x`.
    pub fn faces(&self, x: isize) -> Result<Vec<Simplex>, TopologyError> {
        if x < 0 || x > self.dim() {
            return Err(TopologyError::DimensionOutOfRange { requested: x, dim: self.dim() });
        }
        Ok(subsets(&self.0, x as usize + 1).into_iter().map(Simplex).collect())
    }

    /// Every face, including the empty one and the simplex itself.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (0u64..1 << n).map(|mask| Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect())).collect()
    }

    pub fn render(&self, labels: &Labels) -> String {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{}:{}", v.process, labels.render(v.label))).collect();
        parts.join(" ")
    }
}

pub(crate) fn subsets<T: Copy>(items: &[T], size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn go<T: Copy>(items: &[T], start: usize, size: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, i + 1, size, cur, out);
            cur.pop();
        }
    }
    go(items, 0, size, &mut cur, &mut out);
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// A finite simplicial complex stored by its facets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    facets: Vec<Simplex>,
}

impl SimplicialComplex {
    pub fn empty() -> SimplicialComplex {
        SimplicialComplex::default()
    }

    /// The closure of one simplex.
    pub fn from_simplex(s: Simplex) -> SimplicialComplex {
        if s.is_empty() {
            return SimplicialComplex::empty();
        }
        SimplicialComplex { facets: vec![s] }
    }

    /// Keeps the maximal simplices among `simplices`.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(simplices: I) -> SimplicialComplex {
        let mut all: Vec<Simplex> = simplices.into_iter().filter(|s| !s.is_empty()).collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut kept: Vec<Simplex> = Vec::new();
        let mut by_vertex: HashMap<Vertex, Vec<usize>> = HashMap::new();
        let top = all.first().map(|s| s.len()).unwrap_or(0);
        for s in all {
            let covered = s.len() < top && {
                let mut best: Option<&Vec<usize>> = None;
                for v in s.vertices() {
                    match by_vertex.get(v) {
                        None => {
                            best = None;
                            break;
                        }
                        Some(list) => {
                            if best.is_none_or(|b| list.len() < b.len()) {
                                best = Some(list);
                            }
                        }
                    }
                }
                best.is_some_and(|list| list.iter().any(|&i| s.is_face_of(&kept[i])))
            };
            if !covered {
                for v in s.vertices() {
                    by_vertex.entry(*v).or_default().push(kept.len());
                }
                kept.push(s);
            }
        }
        kept.sort();
        SimplicialComplex { facets: kept }
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.dim()).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.facets.iter().all(|f| f.dim() == d)
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.facets.iter().flat_map(|f| f.vertices().iter().copied()).collect()
    }

    pub fn processes(&self) -> BTreeSet<ProcessId> {
        self.vertices().into_iter().map(|v| v.process).collect()
    }

    /// All nonempty simplices of dimension exactly `x`.
    pub fn faces(&self, x: isize) -> Vec<Simplex> {
        if x < 0 {
            return Vec::new();
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for f in &self.facets {
            if f.dim() < x {
                continue;
            }
            for s in subsets(f.vertices(), x as usize + 1) {
                let s = Simplex(s);
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
        out.sort();
        out
    }

    /// Every nonempty simplex, grouped by dimension.
    pub fn simplices_by_dim(&self) -> Vec<Vec<Simplex>> {
        let d = self.dim();
        (0..=d).map(|x| self.faces(x)).collect()
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices_by_dim().iter().map(|v| v.len()).sum()
    }

    pub fn skeleton(&self, l: isize) -> SimplicialComplex {
        if l < 0 {
            return SimplicialComplex::empty();
        }
        let mut out = Vec::new();
        for f in &self.facets {
            if f.dim() <= l {
                out.push(f.clone());
            } else {
                out.extend(subsets(f.vertices(), l as usize + 1).into_iter().map(Simplex));
            }
        }
        SimplicialComplex::from_simplices(out)
    }

    fn vertex_index(&self) -> HashMap<Vertex, Vec<usize>> {
        let mut idx: HashMap<Vertex, Vec<usize>> = HashMap::new();
        for (i, f) in self.facets.iter().enumerate() {
            for v in f.vertices() {
                idx.entry(*v).or_default().push(i);
            }
        }
        idx
    }

    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        if s.is_empty() {
            return true;
        }
        self.facets.iter().any(|f| s.is_face_of(f))
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        let idx = other.vertex_index();
        self.facets.iter().all(|f| {
            let mut best: Option<&Vec<usize>> = None;
            for v in f.vertices() {
                match idx.get(v) {
                    None => return false,
                    Some(l) => {
                        if best.is_none_or(|b| l.len() < b.len()) {
                            best = Some(l);
                        }
                    }
                }
            }
            best.is_none_or(|l| l.iter().any(|&i| f.is_face_of(&other.facets[i])))
        })
    }

    pub fn intersection(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let idx = other.vertex_index();
        let mut out = HashSet::new();
        for f in &self.facets {
            let mut candidates: BTreeSet<usize> = BTreeSet::new();
            for v in f.vertices() {
                if let Some(l) = idx.get(v) {
                    candidates.extend(l.iter().copied());
                }
            }
            for i in candidates {
                out.insert(f.intersection(&other.facets[i]));
            }
        }
        SimplicialComplex::from_simplices(out)
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        SimplicialComplex::from_simplices(self.facets.iter().chain(other.facets.iter()).cloned())
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a SimplicialComplex>>(parts: I) -> SimplicialComplex {
        SimplicialComplex::from_simplices(parts.into_iter().flat_map(|c| c.facets.iter().cloned()))
    }

    pub fn display<'a>(&'a self, labels: &'a Labels) -> ComplexDisplay<'a> {
        ComplexDisplay { complex: self, labels }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a SimplicialComplex,
    labels: &'a Labels,
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for facet in self.complex.facets() {
            writeln!(f, "{}", facet.render(self.labels))?;
        }
        Ok(())
    }
}

/// `Ψ(P′, S)`: every process independently holds any of its labels.
pub fn pseudosphere(assignments: &BTreeMap<ProcessId, Vec<ViewLabel>>) -> Result<SimplicialComplex, TopologyError> {
    if assignments.is_empty() {
        return Err(TopologyError::NoProcesses);
    }
    for (p, set) in assignments {
        if set.is_empty() {
            return Err(TopologyError::EmptyValueSet(*p));
        }
    }
    let sets: Vec<(ProcessId, Vec<ViewLabel>)> = assignments
        .iter()
        .map(|(p, s)| {
            let mut s = s.clone();
            s.sort();
            s.dedup();
            (*p, s)
        })
        .collect();
    let mut facets = vec![Vec::new()];
    for (p, set) in &sets {
        let mut next = Vec::with_capacity(facets.len() * set.len());
        for f in &facets {
            for l in set {
                let mut g: Vec<Vertex> = f.clone();
                g.push(Vertex::new(*p, *l));
                next.push(g);
            }
        }
        facets = next;
    }
    let mut facets: Vec<Simplex> = facets.into_iter().map(Simplex::from_sorted).collect();
    facets.sort();
    Ok(SimplicialComplex { facets })
}

/// Number of facets `pseudosphere` would produce.
pub fn pseudosphere_size(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes.into_iter().map(|s| s as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    fn psi(labels: &mut Labels, procs: usize, vals: u16) -> SimplicialComplex {
        let set: Vec<ViewLabel> = (0..vals).map(|v| labels.input(Value::V(v))).collect();
        pseudosphere(&(0..procs).map(|p| (ProcessId::from(p), set.clone())).collect()).unwrap()
    }

    pub(crate) fn simplex(labels: &mut Labels, layout: &[(usize, &str)]) -> Simplex {
        Simplex::new(layout.iter().map(|(p, l)| Vertex::new(ProcessId::from(*p), labels.named(l))).collect()).unwrap()
    }

    #[test]
    fn pseudosphere_examples() {
        let mut labels = Labels::new();
        let k = psi(&mut labels, 2, 2);
        assert_eq!(k.facet_count(), 4);
        assert_eq!(k.dim(), 1);
        let k = psi(&mut labels, 1, 3);
        assert_eq!(k.facet_count(), 3);
        assert_eq!(k.dim(), 0);
        assert!(matches!(
            pseudosphere(&[(ProcessId(0), vec![])].into_iter().collect()),
            Err(TopologyError::EmptyValueSet(_))
        ));
        assert!(matches!(pseudosphere(&BTreeMap::new()), Err(TopologyError::NoProcesses)));
    }

    #[test]
    fn faces_and_skeleton() {
        let mut labels = Labels::new();
        let tri = simplex(&mut labels, &[(0, "a"), (1, "b"), (2, "c")]);
        assert_eq!(tri.faces(1).unwrap().len(), 3);
        let tet = simplex(&mut labels, &[(0, "a"), (1, "b"), (2, "c"), (3, "d")]);
        assert_eq!(tet.faces(2).unwrap().len(), 4);
        assert!(matches!(tet.faces(4), Err(TopologyError::DimensionOutOfRange { .. })));
        let k = psi(&mut labels, 3, 2);
        let skel = k.skeleton(0);
        assert_eq!(skel.facet_count(), k.vertices().len());
        assert_eq!(skel.vertices(), k.vertices());
    }

    #[test]
    fn name_view_is_enforced() {
        let mut labels = Labels::new();
        let a = labels.named("a");
        let b = labels.named("b");
        assert!(Simplex::new(vec![Vertex::new(ProcessId(0), a), Vertex::new(ProcessId(0), b)]).is_err());
    }

    #[test]
    fn maximality_and_set_operations() {
        let mut labels = Labels::new();
        let ab = simplex(&mut labels, &[(0, "a"), (1, "b")]);
        let abc = simplex(&mut labels, &[(0, "a"), (1, "b"), (2, "c")]);
        let bd = simplex(&mut labels, &[(1, "b"), (3, "d")]);
        let k = SimplicialComplex::from_simplices([ab.clone(), abc.clone(), bd.clone()]);
        assert_eq!(k.facet_count(), 2);
        assert!(!k.is_pure());
        let l = SimplicialComplex::from_simplices([ab.clone()]);
        assert!(l.is_subcomplex_of(&k));
        assert!(!k.is_subcomplex_of(&l));
        assert_eq!(k.intersection(&l), l);
        let m = SimplicialComplex::from_simplices([bd.clone()]);
        let meet = SimplicialComplex::from_simplex(abc).intersection(&m);
        assert_eq!(meet.facet_count(), 1);
        assert_eq!(meet.dim(), 0);
        assert_eq!(l.union(&m).facet_count(), 2);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(subsets(&[1, 2, 3, 4], 2).len(), 6);
    }
}
