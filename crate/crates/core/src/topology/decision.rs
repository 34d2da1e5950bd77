//! Exhaustive search for a decision map solving `k`-set agreement on a
//! protocol complex.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::Value;

use super::complex::{SimplicialComplex, Vertex};
use super::labels::Labels;
use super::{Budget, TopologyError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionOutcome {
    /// A coloring with at most `k` values per facet, each drawn from the
    /// vertex's allowed values.
    Witness(BTreeMap<Vertex, Value>),
    /// No such coloring exists.
    Refuted,
}

impl DecisionOutcome {
    pub fn witness(&self) -> Option<&BTreeMap<Vertex, Value>> {
        match self {
            DecisionOutcome::Witness(w) => Some(w),
            DecisionOutcome::Refuted => None,
        }
    }
}

/// Values a vertex may decide: the inputs its view was built from.
pub fn allowed_values(labels: &Labels, v: &Vertex) -> Vec<Value> {
    labels.heard_values(v.label).into_iter().filter(|x| !x.is_bottom()).collect()
}

/// Backtracking vertex coloring. Vertices are visited breadth first so each
/// one after the first usually has a colored neighbour.
pub fn decision_map_search(
    labels: &Labels,
    complex: &SimplicialComplex,
    k: usize,
    budget: &Budget,
) -> Result<(DecisionOutcome, u64), TopologyError> {
    let vertices: Vec<Vertex> = complex.vertices().into_iter().collect();
    let index: BTreeMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let facets: Vec<Vec<usize>> =
        complex.facets().iter().map(|f| f.vertices().iter().map(|v| index[v]).collect()).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (fi, f) in facets.iter().enumerate() {
        for &v in f {
            incident[v].push(fi);
        }
    }
    let allowed: Vec<Vec<Value>> = vertices.iter().map(|v| allowed_values(labels, v)).collect();

    let mut order = Vec::with_capacity(vertices.len());
    let mut seen = vec![false; vertices.len()];
    let mut starts: Vec<usize> = (0..vertices.len()).collect();
    starts.sort_by_key(|&v| allowed[v].len());
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &f in &incident[v] {
                for &w in &facets[f] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    struct State<'a> {
        facets: &'a [Vec<usize>],
        incident: &'a [Vec<usize>],
        allowed: &'a [Vec<Value>],
        order: &'a [usize],
        color: Vec<Option<Value>>,
        used: Vec<BTreeMap<Value, usize>>,
        k: usize,
        nodes: u64,
        budget: &'a Budget,
    }

    impl State<'_> {
        fn go(&mut self, depth: usize) -> Result<bool, TopologyError> {
            if depth == self.order.len() {
                return Ok(true);
            }
            self.nodes += 1;
            self.budget.check_nodes(self.nodes)?;
            let v = self.order[depth];
            for &c in &self.allowed[v] {
                let fits =
                    self.incident[v].iter().all(|&f| self.used[f].contains_key(&c) || self.used[f].len() < self.k);
                if !fits {
                    continue;
                }
                self.color[v] = Some(c);
                for &f in &self.incident[v] {
                    *self.used[f].entry(c).or_default() += 1;
                }
                if self.go(depth + 1)? {
                    return Ok(true);
                }
                for &f in &self.incident[v] {
                    let e = self.used[f].get_mut(&c).expect("just added");
                    *e -= 1;
                    if *e == 0 {
                        self.used[f].remove(&c);
                    }
                }
                self.color[v] = None;
            }
            Ok(false)
        }
    }

    let mut state = State {
        facets: &facets,
        incident: &incident,
        allowed: &allowed,
        order: &order,
        color: vec![None; vertices.len()],
        used: vec![BTreeMap::new(); facets.len()],
        k,
        nodes: 0,
        budget,
    };
    let found = state.go(0)?;
    debug_assert!(state.facets.len() == facets.len());
    let outcome = if found {
        DecisionOutcome::Witness(
            vertices.iter().zip(&state.color).map(|(v, c)| (*v, c.expect("complete coloring"))).collect(),
        )
    } else {
        DecisionOutcome::Refuted
    };
    Ok((outcome, state.nodes))
}

/// Independent check of a coloring.
pub fn check_decision_map(
    labels: &Labels,
    complex: &SimplicialComplex,
    k: usize,
    coloring: &BTreeMap<Vertex, Value>,
) -> bool {
    complex.vertices().iter().all(|v| coloring.get(v).is_some_and(|c| allowed_values(labels, v).contains(c)))
        && complex.facets().iter().all(|f| {
            let colors: BTreeSet<Value> = f.vertices().iter().map(|v| coloring[v]).collect();
            colors.len() <= k
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProcessId, RawConfig};
    use crate::topology::complex::Simplex;
    use crate::topology::operators::{input_complex, protocol_complex};
    use crate::Config;

    #[test]
    fn round_zero_is_refuted() {
        let mut labels = Labels::new();
        let k = input_complex(&mut labels, 3, &[Value::V(0), Value::V(1)]).unwrap();
        let (out, _) = decision_map_search(&labels, &k, 1, &Budget::default()).unwrap();
        assert_eq!(out, DecisionOutcome::Refuted);
        // Two values per facet are allowed for k = 2.
        let (out, _) = decision_map_search(&labels, &k, 2, &Budget::default()).unwrap();
        assert!(check_decision_map(&labels, &k, 2, out.witness().unwrap()));
    }

    #[test]
    fn full_information_has_witness() {
        let mut labels = Labels::new();
        let inputs = input_complex(&mut labels, 3, &[Value::V(0), Value::V(1)]).unwrap();
        let facets: Vec<Simplex> = inputs
            .facets()
            .iter()
            .map(|s| {
                let view = labels.simplex(s.clone());
                Simplex::new((0..3).map(|p| Vertex::new(ProcessId(p), view)).collect()).unwrap()
            })
            .collect();
        let k = SimplicialComplex::from_simplices(facets);
        let (out, _) = decision_map_search(&labels, &k, 1, &Budget::default()).unwrap();
        let w = out.witness().expect("witness");
        assert!(check_decision_map(&labels, &k, 1, w));
    }

    #[test]
    fn one_crash_round_is_not_enough_for_consensus() {
        let cfg = Config::relaxed(RawConfig { n_plus_1: 4, t: 1, k: 1, d: 1, seed: 0 }).unwrap();
        let mut labels = Labels::new();
        let p = protocol_complex(&mut labels, &cfg, &[Value::V(0), Value::V(1)], &Budget::default()).unwrap();
        let (out, _) = decision_map_search(&labels, &p, 1, &Budget::default()).unwrap();
        assert_eq!(out, DecisionOutcome::Refuted);
    }

    #[test]
    fn budget_is_enforced() {
        let mut labels = Labels::new();
        let k = input_complex(&mut labels, 3, &[Value::V(0), Value::V(1)]).unwrap();
        let tiny = Budget { search_nodes: 2, ..Budget::default() };
        assert!(matches!(decision_map_search(&labels, &k, 1, &tiny), Err(TopologyError::BudgetExceeded { .. })));
    }
}
