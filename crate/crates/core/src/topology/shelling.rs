use std::collections::HashSet;

use super::complex::{Simplex, SimplicialComplex};
use super::{Budget, TopologyError};

/// A facet order in which each facet meets the union of its predecessors in
/// a pure complex of codimension one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingOrder(pub Vec<Simplex>);

impl ShellingOrder {
    pub fn facets(&self) -> &[Simplex] {
        &self.0
    }
}

struct Search<'a> {
    facets: &'a [Simplex],
    /// `meet[i][j] = |φ_i ∩ φ_j|`.
    meet: Vec<Vec<usize>>,
    /// `within[k][i]`: indices `j` whose intersection with `φ_k` contains
    /// `φ_i ∩ φ_k` and has size `D`.
    covers: Vec<Vec<Vec<usize>>>,
    d: usize,
    failed: HashSet<Vec<u64>>,
    nodes: u64,
    budget: &'a Budget,
}

impl Search<'_> {
    fn placeable(&self, placed: &[u64], order: &[usize], k: usize) -> bool {
        if order.is_empty() || self.d == 0 {
            return true;
        }
        let has = |j: usize| placed[j / 64] >> (j % 64) & 1 == 1;
        if !order.iter().any(|&j| self.meet[j][k] == self.d) {
            return false;
        }
        order.iter().all(|&i| self.meet[i][k] == self.d || self.covers[k][i].iter().any(|&j| has(j)))
    }

    fn go(&mut self, placed: &mut Vec<u64>, order: &mut Vec<usize>) -> Result<bool, TopologyError> {
        if order.len() == self.facets.len() {
            return Ok(true);
        }
        if self.failed.contains(placed) {
            return Ok(false);
        }
        self.nodes += 1;
        self.budget.check_nodes(self.nodes)?;
        for k in 0..self.facets.len() {
            if placed[k / 64] >> (k % 64) & 1 == 1 || !self.placeable(placed, order, k) {
                continue;
            }
            placed[k / 64] |= 1 << (k % 64);
            order.push(k);
            if self.go(placed, order)? {
                return Ok(true);
            }
            order.pop();
            placed[k / 64] &= !(1 << (k % 64));
        }
        self.failed.insert(placed.clone());
        Ok(false)
    }
}

/// Searches for a shelling order by backtracking with memoised dead ends.
/// `Ok(None)` means the search was exhaustive and found none.
pub fn is_shellable(k: &SimplicialComplex, budget: &Budget) -> Result<Option<ShellingOrder>, TopologyError> {
    if !k.is_pure() {
        return Err(TopologyError::NotPure);
    }
    let facets = k.facets();
    if facets.is_empty() {
        return Ok(Some(ShellingOrder(Vec::new())));
    }
    let d = k.dim() as usize;
    let n = facets.len();
    let meet: Vec<Vec<usize>> =
        facets.iter().map(|a| facets.iter().map(|b| a.intersection(b).len()).collect()).collect();
    let mut covers = vec![vec![Vec::new(); n]; n];
    for kk in 0..n {
        let big: Vec<(usize, Simplex)> =
            (0..n).filter(|&j| j != kk && meet[j][kk] == d).map(|j| (j, facets[j].intersection(&facets[kk]))).collect();
        for i in 0..n {
            if i == kk || meet[i][kk] == d {
                continue;
            }
            let small = facets[i].intersection(&facets[kk]);
            covers[kk][i] = big.iter().filter(|(_, b)| small.is_face_of(b)).map(|(j, _)| *j).collect();
        }
    }
    let mut search = Search { facets, meet, covers, d, failed: HashSet::new(), nodes: 0, budget };
    let mut placed = vec![0u64; n.div_ceil(64)];
    let mut order = Vec::with_capacity(n);
    if search.go(&mut placed, &mut order)? {
        Ok(Some(ShellingOrder(order.into_iter().map(|i| facets[i].clone()).collect())))
    } else {
        Ok(None)
    }
}

/// Checks an order directly: each facet's intersection with the complex of
/// its predecessors must be pure of dimension one less.
pub fn verify_shelling(k: &SimplicialComplex, order: &ShellingOrder) -> bool {
    let mut sorted = order.0.clone();
    sorted.sort();
    if sorted != k.facets() {
        return false;
    }
    for (idx, phi) in order.0.iter().enumerate().skip(1) {
        let before = SimplicialComplex::from_simplices(order.0[..idx].iter().cloned());
        let meet = before.intersection(&SimplicialComplex::from_simplex(phi.clone()));
        if meet.is_empty() {
            if phi.dim() != 0 {
                return false;
            }
            continue;
        }
        if !meet.is_pure() || meet.dim() != phi.dim() - 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProcessId, Value};
    use crate::topology::complex::{pseudosphere, Vertex};
    use crate::topology::labels::{Labels, ViewLabel};

    fn named(labels: &mut Labels, layout: &[(u32, &str)]) -> Simplex {
        Simplex::new(layout.iter().map(|(p, l)| Vertex::new(ProcessId(*p), labels.named(l))).collect()).unwrap()
    }

    #[test]
    fn single_facet() {
        let mut labels = Labels::new();
        let k = SimplicialComplex::from_simplex(named(&mut labels, &[(0, "a"), (1, "b")]));
        let order = is_shellable(&k, &Budget::default()).unwrap().unwrap();
        assert_eq!(order.facets().len(), 1);
    }

    #[test]
    fn triangles_meeting_at_a_vertex_are_not_shellable() {
        let mut labels = Labels::new();
        let a = named(&mut labels, &[(0, "a"), (1, "b"), (2, "c")]);
        let b = named(&mut labels, &[(0, "a"), (1, "x"), (2, "y")]);
        let k = SimplicialComplex::from_simplices([a.clone(), b.clone()]);
        assert_eq!(is_shellable(&k, &Budget::default()).unwrap(), None);
        assert!(!verify_shelling(&k, &ShellingOrder(vec![a.clone(), b.clone()])));
        assert!(!verify_shelling(&k, &ShellingOrder(vec![b, a])));
    }

    #[test]
    fn pseudospheres_are_shellable() {
        for procs in 1..=3u32 {
            for vals in 1..=3u16 {
                let mut labels = Labels::new();
                let set: Vec<ViewLabel> = (0..vals).map(|v| labels.input(Value::V(v))).collect();
                let k = pseudosphere(&(0..procs).map(|p| (ProcessId(p), set.clone())).collect()).unwrap();
                let order = is_shellable(&k, &Budget::default()).unwrap().expect("shellable");
                assert!(verify_shelling(&k, &order));
            }
        }
    }

    #[test]
    fn points_shell_in_any_order() {
        let mut labels = Labels::new();
        let k = SimplicialComplex::from_simplices([named(&mut labels, &[(0, "a")]), named(&mut labels, &[(0, "b")])]);
        assert!(is_shellable(&k, &Budget::default()).unwrap().is_some());
    }

    #[test]
    fn budget_is_enforced() {
        let mut labels = Labels::new();
        let set: Vec<ViewLabel> = (0..3).map(|v| labels.input(Value::V(v))).collect();
        let k = pseudosphere(&(0..3).map(|p| (ProcessId(p), set.clone())).collect()).unwrap();
        let tiny = Budget { search_nodes: 3, ..Budget::default() };
        assert!(matches!(is_shellable(&k, &tiny), Err(TopologyError::BudgetExceeded { .. })));
    }

    #[test]
    fn rejects_impure() {
        let mut labels = Labels::new();
        let k = SimplicialComplex::from_simplices([
            named(&mut labels, &[(0, "a"), (1, "b")]),
            named(&mut labels, &[(2, "c")]),
        ]);
        assert_eq!(is_shellable(&k, &Budget::default()), Err(TopologyError::NotPure));
    }
}
