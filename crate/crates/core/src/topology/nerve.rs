use std::collections::{BTreeMap, BTreeSet};

use crate::model::ProcessId;

use super::complex::{Simplex, SimplicialComplex, Vertex};
use super::labels::Labels;
use super::TopologyError;

/// The nerve of `cover`: vertex `i` stands for `cover[i]`, and a set of
/// indices spans a simplex iff their complexes share a vertex.
pub fn nerve(
    labels: &mut Labels,
    covered: &SimplicialComplex,
    cover: &[SimplicialComplex],
) -> Result<SimplicialComplex, TopologyError> {
    if SimplicialComplex::union_all(cover) != *covered {
        return Err(TopologyError::NotACover);
    }
    let label = labels.named("cover");
    let mut holders: BTreeMap<Vertex, BTreeSet<usize>> = BTreeMap::new();
    for (i, part) in cover.iter().enumerate() {
        for v in part.vertices() {
            holders.entry(v).or_default().insert(i);
        }
    }
    let simplices = holders.into_values().map(|set| {
        Simplex::new(set.into_iter().map(|i| Vertex::new(ProcessId::from(i), label)).collect())
            .expect("indices are distinct")
    });
    Ok(SimplicialComplex::from_simplices(simplices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RawConfig, Value};
    use crate::topology::complex::pseudosphere;
    use crate::topology::homology::reduced_betti;
    use crate::topology::operators::{crash_dim, crash_operator, input_simplex, Equivocator};
    use crate::topology::Budget;
    use crate::Config;

    fn named(labels: &mut Labels, layout: &[(u32, &str)]) -> Simplex {
        Simplex::new(layout.iter().map(|(p, l)| Vertex::new(ProcessId(*p), labels.named(l))).collect()).unwrap()
    }

    #[test]
    fn single_set() {
        let mut labels = Labels::new();
        let k = SimplicialComplex::from_simplex(named(&mut labels, &[(0, "a"), (1, "b")]));
        let n = nerve(&mut labels, &k, std::slice::from_ref(&k)).unwrap();
        assert_eq!(n.facet_count(), 1);
        assert_eq!(n.dim(), 0);
    }

    #[test]
    fn three_overlapping_sets() {
        let mut labels = Labels::new();
        let set = vec![labels.named("a"), labels.named("b")];
        let k = pseudosphere(&(0..3).map(|p| (ProcessId(p), set.clone())).collect()).unwrap();
        let cover = vec![k.clone(), k.clone(), k.clone()];
        let n = nerve(&mut labels, &k, &cover).unwrap();
        assert_eq!(n.facet_count(), 1);
        assert_eq!(n.dim(), 2);
    }

    #[test]
    fn rejects_partial_cover() {
        let mut labels = Labels::new();
        let a = named(&mut labels, &[(0, "a")]);
        let b = named(&mut labels, &[(0, "b")]);
        let k = SimplicialComplex::from_simplices([a.clone(), b]);
        assert_eq!(nerve(&mut labels, &k, &[SimplicialComplex::from_simplex(a)]), Err(TopologyError::NotACover));
    }

    #[test]
    fn proper_face_cover_gives_boundary_skeleton() {
        // n + 1 = 5, k = 2, one crash round: facets of M have dimension d = 2.
        let cfg = Config::relaxed(RawConfig { n_plus_1: 5, t: 3, k: 2, d: 1, seed: 0 }).unwrap();
        let mut labels = Labels::new();
        let sigma = input_simplex(&mut labels, &[Value::V(0), Value::V(1), Value::V(0), Value::V(1), Value::V(0)]);
        let budget = Budget::default();
        let m = crash_operator(&mut labels, &sigma, 1, &cfg, &budget).unwrap();
        let d = crash_dim(&cfg, 1);
        assert_eq!(d, 2);
        let mu0 = m.facets()[7].clone();
        let e = Equivocator::new(&mut labels, &m, d).unwrap();
        let whole = e.apply(&SimplicialComplex::from_simplex(mu0.clone()), &budget).unwrap();
        let cover: Vec<SimplicialComplex> = mu0
            .faces(d - 1)
            .unwrap()
            .into_iter()
            .map(|tau| e.apply(&SimplicialComplex::from_simplex(tau), &budget).unwrap())
            .collect();
        assert_eq!(cover.len(), 3);
        let n = nerve(&mut labels, &whole, &cover).unwrap();
        // The 1-skeleton of a triangle: three edges, hollow.
        assert_eq!(n.facet_count(), 3);
        assert_eq!(n.dim(), 1);
        assert_eq!(reduced_betti(&n, 1, &budget).unwrap(), vec![0, 1]);
    }
}
