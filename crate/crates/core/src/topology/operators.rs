//! Crash and equivocation operators and their composition into scenario
//! complexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::{Config, ProcessId, Value};

use super::complex::{binomial, pseudosphere, Simplex, SimplicialComplex, Vertex};
use super::labels::{LabelKind, Labels, ViewLabel};
use super::{Budget, TopologyError};

/// Dimension of the complexes produced by the `i`-th crash round.
pub fn crash_dim(cfg: &Config, i: usize) -> isize {
    cfg.n() as isize - (i * cfg.k) as isize
}

/// Facet count of `C^i(σ)` for `|σ| = size`, without building it.
pub fn crash_facet_count(size: usize, top: isize) -> u128 {
    if top < 0 || top as usize + 1 > size {
        return 0;
    }
    let keep = top as usize + 1;
    let per_process = 1u128.checked_shl((size - keep) as u32).unwrap_or(u128::MAX);
    binomial(size, keep).saturating_mul(per_process.saturating_pow(keep as u32))
}

/// `C^i(σ)`: some set of at most `k` processes per round crash, each
/// survivor hears from some simplex between its surviving face and `σ`.
pub fn crash_operator(
    labels: &mut Labels,
    sigma: &Simplex,
    i: usize,
    cfg: &Config,
    budget: &Budget,
) -> Result<SimplicialComplex, TopologyError> {
    if i == 0 {
        return Err(TopologyError::DimensionMismatch { expected: cfg.n() as isize, got: sigma.dim() });
    }
    let max_dim = cfg.n() as isize - ((i - 1) * cfg.k) as isize;
    if sigma.dim() > max_dim {
        return Err(TopologyError::DimensionMismatch { expected: max_dim, got: sigma.dim() });
    }
    let top = crash_dim(cfg, i);
    if top < 0 || sigma.dim() < top {
        return Ok(SimplicialComplex::empty());
    }
    let count = crash_facet_count(sigma.len(), top);
    budget.check_facets(count)?;

    let mut facets = Vec::with_capacity(count as usize);
    for tau in sigma.faces(top)? {
        let gap: Vec<Vertex> = sigma.vertices().iter().copied().filter(|v| !tau.contains(v)).collect();
        let views: Vec<ViewLabel> = (0u64..1 << gap.len())
            .map(|mask| {
                let mut mu: Vec<Vertex> = tau.vertices().to_vec();
                mu.extend((0..gap.len()).filter(|j| mask >> j & 1 == 1).map(|j| gap[j]));
                labels.simplex(Simplex::new(mu).expect("subset of a name-view simplex"))
            })
            .collect();
        let assignment: BTreeMap<ProcessId, Vec<ViewLabel>> =
            tau.names().into_iter().map(|p| (p, views.clone())).collect();
        facets.extend(pseudosphere(&assignment)?.facets().iter().cloned());
    }
    let out = SimplicialComplex::from_simplices(facets);
    assert!(out.is_pure() && out.dim() == top, "crash operator output must be pure of dimension {top}");
    Ok(out)
}

/// Image of a complex under `C^i`, taken facet by facet.
pub fn crash_image(
    labels: &mut Labels,
    k: &SimplicialComplex,
    i: usize,
    cfg: &Config,
    budget: &Budget,
) -> Result<SimplicialComplex, TopologyError> {
    let mut parts = Vec::new();
    let mut total = 0u128;
    for f in k.facets() {
        let part = crash_operator(labels, f, i, cfg, budget)?;
        total += part.facet_count() as u128;
        budget.check_facets(total)?;
        parts.push(part);
    }
    Ok(SimplicialComplex::union_all(&parts))
}

/// Interpretation classes of one process over a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpClasses {
    pub process: ProcessId,
    /// Facets containing the process, mapped to a class id. Ids are assigned
    /// in facet order.
    pub classes: BTreeMap<Simplex, usize>,
    pub class_count: usize,
    /// Some class joins facets that share no qualifying face directly.
    pub closure_extends_adjacency: bool,
}

impl InterpClasses {
    pub fn class_of(&self, facet: &Simplex) -> Option<usize> {
        self.classes.get(facet).copied()
    }
}

/// Connected components of the facets containing `process`, where two
/// facets are adjacent when they share a face of codimension one that
/// contains the process.
pub fn interp_classes(k: &SimplicialComplex, process: ProcessId) -> InterpClasses {
    let d = k.dim();
    let members: Vec<&Simplex> = k.facets().iter().filter(|f| f.dim() == d && f.vertex_of(process).is_some()).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut buckets: HashMap<Simplex, Vec<usize>> = HashMap::new();
    for (i, f) in members.iter().enumerate() {
        for (j, v) in f.vertices().iter().enumerate() {
            if v.process != process {
                buckets.entry(f.without(j)).or_default().push(i);
            }
        }
    }
    let mut adjacent: BTreeSet<(usize, usize)> = BTreeSet::new();
    for list in buckets.values() {
        for (a, &x) in list.iter().enumerate() {
            for &y in &list[a + 1..] {
                adjacent.insert((x.min(y), x.max(y)));
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut classes = BTreeMap::new();
    for (i, f) in members.iter().enumerate() {
        let root = find(&mut parent, i);
        let next = ids.len();
        let id = *ids.entry(root).or_insert(next);
        if id == sizes.len() {
            sizes.push(0);
        }
        sizes[id] += 1;
        classes.insert((*f).clone(), id);
    }
    let full_pairs: usize = sizes.iter().map(|s| s * (s - 1) / 2).sum();
    InterpClasses { process, class_count: sizes.len(), closure_extends_adjacency: adjacent.len() < full_pairs, classes }
}

/// Interns the interpretation label of every facet for `process`.
pub fn interp_labels(labels: &mut Labels, classes: &InterpClasses) -> BTreeMap<Simplex, ViewLabel> {
    // Every member of a class shares the process's vertex, so classes are
    // named by that vertex and an ordinal among classes sharing it.
    let mut own_of_class: BTreeMap<usize, ViewLabel> = BTreeMap::new();
    for (f, id) in &classes.classes {
        let own = f.vertex_of(classes.process).expect("member facet holds the process").label;
        let prev = own_of_class.insert(*id, own);
        debug_assert!(prev.is_none_or(|p| p == own));
    }
    let mut ordinal: BTreeMap<usize, u32> = BTreeMap::new();
    let mut seen: BTreeMap<ViewLabel, u32> = BTreeMap::new();
    for (id, own) in &own_of_class {
        let n = seen.entry(*own).or_insert(0);
        ordinal.insert(*id, *n);
        *n += 1;
    }
    classes
        .classes
        .iter()
        .map(|(f, id)| {
            let l = labels.intern(LabelKind::Interp {
                process: classes.process,
                own: own_of_class[id],
                ordinal: ordinal[id],
            });
            (f.clone(), l)
        })
        .collect()
}

/// `E_K` for a fixed pure `K` whose facets have dimension `top`.
pub struct Equivocator<'a> {
    k: &'a SimplicialComplex,
    top: isize,
    by_vertex: HashMap<Vertex, Vec<usize>>,
    interp: HashMap<ProcessId, BTreeMap<Simplex, ViewLabel>>,
}

impl<'a> Equivocator<'a> {
    pub fn new(labels: &mut Labels, k: &'a SimplicialComplex, top: isize) -> Result<Equivocator<'a>, TopologyError> {
        if !k.is_pure() {
            return Err(TopologyError::NotPure);
        }
        if k.dim() > top {
            return Err(TopologyError::DimensionMismatch { expected: top, got: k.dim() });
        }
        let mut by_vertex: HashMap<Vertex, Vec<usize>> = HashMap::new();
        for (i, f) in k.facets().iter().enumerate() {
            for v in f.vertices() {
                by_vertex.entry(*v).or_default().push(i);
            }
        }
        let mut interp = HashMap::new();
        if k.dim() == top {
            for p in k.processes() {
                interp.insert(p, interp_labels(labels, &interp_classes(k, p)));
            }
        }
        Ok(Equivocator { k, top, by_vertex, interp })
    }

    pub fn apply(&self, l: &SimplicialComplex, budget: &Budget) -> Result<SimplicialComplex, TopologyError> {
        if !l.is_subcomplex_of(self.k) {
            return Err(TopologyError::NotASubcomplex);
        }
        let top = self.top;
        if top < 1 || self.k.dim() < top || l.dim() < top - 1 {
            return Ok(SimplicialComplex::empty());
        }
        let mut facets = Vec::new();
        for rho in l.faces(top - 1) {
            let first = rho.vertices()[0];
            let above: Vec<&Simplex> =
                self.by_vertex[&first].iter().map(|&i| &self.k.facets()[i]).filter(|f| rho.is_face_of(f)).collect();
            let mut assignment: BTreeMap<ProcessId, Vec<ViewLabel>> = BTreeMap::new();
            for p in rho.names() {
                let map = &self.interp[&p];
                let mut set: Vec<ViewLabel> = above.iter().map(|f| map[*f]).collect();
                set.sort();
                set.dedup();
                assignment.insert(p, set);
            }
            let size: u128 = assignment.values().map(|s| s.len() as u128).product();
            budget.check_facets(facets.len() as u128 + size)?;
            facets.extend(pseudosphere(&assignment)?.facets().iter().cloned());
        }
        Ok(SimplicialComplex::from_simplices(facets))
    }
}

/// `E_K(L)` with facets of `K` of dimension `top`: every face of `L` one
/// below `top` is extended by each process's interpretation of the facets of
/// `K` above it.
pub fn equivocation_operator(
    labels: &mut Labels,
    k: &SimplicialComplex,
    l: &SimplicialComplex,
    top: isize,
    budget: &Budget,
) -> Result<SimplicialComplex, TopologyError> {
    Equivocator::new(labels, k, top)?.apply(l, budget)
}

/// `(C^r ∘ E)(σ) = E_{C^r(σ)}(C^r(σ))`.
pub fn crash_then_equivocate(
    labels: &mut Labels,
    sigma: &Simplex,
    cfg: &Config,
    budget: &Budget,
) -> Result<SimplicialComplex, TopologyError> {
    let r = cfg.crash_rounds();
    let top = crash_dim(cfg, r);
    let crashed = if r == 0 {
        SimplicialComplex::from_simplex(sigma.clone())
    } else {
        crash_operator(labels, sigma, r, cfg, budget)?
    };
    equivocation_operator(labels, &crashed, &crashed, top, budget)
}

/// A scenario complex with every intermediate stage.
#[derive(Clone, Debug)]
pub struct ScenarioComplex {
    /// `K^0 = ⟨σ⟩`, then one entry per crash round.
    pub stages: Vec<SimplicialComplex>,
    /// The equivocation image, present when `t mod k > 0`.
    pub equivocation: Option<SimplicialComplex>,
}

impl ScenarioComplex {
    pub fn result(&self) -> &SimplicialComplex {
        self.equivocation.as_ref().unwrap_or_else(|| self.stages.last().expect("K^0 is always present"))
    }
}

/// Applies `⌊t/k⌋` crash rounds to the input facet `σ`, followed by one
/// equivocation round when `t mod k > 0`.
pub fn scenario_complex(
    labels: &mut Labels,
    cfg: &Config,
    sigma: &Simplex,
    budget: &Budget,
) -> Result<ScenarioComplex, TopologyError> {
    if sigma.dim() != cfg.n() as isize {
        return Err(TopologyError::DimensionMismatch { expected: cfg.n() as isize, got: sigma.dim() });
    }
    let r = cfg.crash_rounds();
    let m = cfg.remainder();
    let mut stages = vec![SimplicialComplex::from_simplex(sigma.clone())];
    let mut equivocation = None;
    if m > 0 && r == 0 {
        let k0 = &stages[0];
        equivocation = Some(equivocation_operator(labels, k0, k0, cfg.n() as isize, budget)?);
    }
    for i in 1..=r {
        let prev = stages.last().expect("nonempty").clone();
        if m > 0 && i == r {
            let top = crash_dim(cfg, r);
            let mut crashed = Vec::new();
            let mut images = Vec::new();
            let (mut crashed_total, mut image_total) = (0u128, 0u128);
            for phi in prev.facets() {
                let c = crash_operator(labels, phi, r, cfg, budget)?;
                let e = equivocation_operator(labels, &c, &c, top, budget)?;
                crashed_total += c.facet_count() as u128;
                image_total += e.facet_count() as u128;
                budget.check_facets(crashed_total.max(image_total))?;
                crashed.push(c);
                images.push(e);
            }
            stages.push(SimplicialComplex::union_all(&crashed));
            equivocation = Some(SimplicialComplex::union_all(&images));
        } else {
            stages.push(crash_image(labels, &prev, i, cfg, budget)?);
        }
    }
    Ok(ScenarioComplex { stages, equivocation })
}

/// The input simplex assigning `values[p]` to each process.
pub fn input_simplex(labels: &mut Labels, values: &[Value]) -> Simplex {
    let vertices = values.iter().enumerate().map(|(p, v)| Vertex::new(ProcessId::from(p), labels.input(*v))).collect();
    Simplex::new(vertices).expect("one vertex per process")
}

/// `Ψ(P, V)`: all input assignments of `values` to `processes` processes.
pub fn input_complex(
    labels: &mut Labels,
    processes: usize,
    values: &[Value],
) -> Result<SimplicialComplex, TopologyError> {
    let set: Vec<ViewLabel> = values.iter().map(|v| labels.input(*v)).collect();
    pseudosphere(&(0..processes).map(|p| (ProcessId::from(p), set.clone())).collect())
}

/// Union of the scenario complexes of every input facet of `Ψ(P, values)`.
pub fn protocol_complex(
    labels: &mut Labels,
    cfg: &Config,
    values: &[Value],
    budget: &Budget,
) -> Result<SimplicialComplex, TopologyError> {
    let inputs = input_complex(labels, cfg.n_plus_1, values)?;
    let mut parts = Vec::new();
    let mut total = 0u128;
    for sigma in inputs.facets() {
        let s = scenario_complex(labels, cfg, sigma, budget)?;
        total += s.result().facet_count() as u128;
        budget.check_facets(total)?;
        parts.push(s.result().clone());
    }
    Ok(SimplicialComplex::union_all(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RawConfig;

    pub(crate) fn cfg(n_plus_1: usize, t: usize, k: usize) -> Config {
        Config::relaxed(RawConfig { n_plus_1, t, k, d: 1, seed: 0 }).unwrap()
    }

    fn sigma(labels: &mut Labels, n_plus_1: usize) -> Simplex {
        input_simplex(labels, &(0..n_plus_1).map(|i| Value::V((i % 2) as u16)).collect::<Vec<_>>())
    }

    /// Enumerates `(τ, choice)` pairs directly: each process of each face of
    /// dimension `top` picks a subset of `σ \ τ` to add.
    type Views = BTreeSet<BTreeSet<(ProcessId, BTreeSet<Vertex>)>>;

    fn brute_force_crash(sigma: &Simplex, top: usize) -> (usize, Views) {
        let all = sigma.vertices();
        let n = all.len();
        let mut facets = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for tau_mask in 0u32..1 << n {
            if tau_mask.count_ones() as usize != top + 1 {
                continue;
            }
            let tau: Vec<usize> = (0..n).filter(|i| tau_mask >> i & 1 == 1).collect();
            let gap: Vec<usize> = (0..n).filter(|i| tau_mask >> i & 1 == 0).collect();
            let choices = 1usize << gap.len();
            let total = choices.pow(tau.len() as u32);
            for code in 0..total {
                let mut c = code;
                let mut facet = BTreeSet::new();
                for &p in &tau {
                    let pick = c % choices;
                    c /= choices;
                    let mut mu: BTreeSet<Vertex> = tau.iter().map(|&j| all[j]).collect();
                    for (b, &g) in gap.iter().enumerate() {
                        if pick >> b & 1 == 1 {
                            mu.insert(all[g]);
                        }
                    }
                    vertices.insert((all[p].process, mu.clone()));
                    facet.insert((all[p].process, mu));
                }
                facets.insert(facet);
            }
        }
        (vertices.len(), facets)
    }

    #[test]
    fn crash_round_matches_enumeration() {
        let budget = Budget::default();
        for (n1, k) in [(4usize, 1usize), (5, 1), (5, 2), (4, 2), (3, 1)] {
            let c = cfg(n1, k, k);
            let mut labels = Labels::new();
            let s = sigma(&mut labels, n1);
            let out = crash_operator(&mut labels, &s, 1, &c, &budget).unwrap();
            let top = crash_dim(&c, 1) as usize;
            let (vcount, oracle) = brute_force_crash(&s, top);
            assert_eq!(out.facet_count(), oracle.len(), "n+1={n1} k={k}");
            assert_eq!(out.vertices().len(), vcount);
            assert_eq!(out.facet_count() as u128, crash_facet_count(n1, top as isize));
            assert!(out.is_pure());
            assert_eq!(out.dim(), top as isize);
        }
    }

    #[test]
    fn crash_desk_instance_counts() {
        // n = 3, k = 1: four triangles τ, each survivor picks τ or σ.
        let c = cfg(4, 1, 1);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 4);
        let out = crash_operator(&mut labels, &s, 1, &c, &Budget::default()).unwrap();
        assert_eq!(out.facet_count(), 32);
        assert_eq!(out.vertices().len(), 16);
        assert_eq!(out.dim(), 2);
    }

    #[test]
    fn crash_is_monotone_on_faces() {
        let c = cfg(4, 1, 1);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 4);
        let budget = Budget::default();
        let whole = crash_operator(&mut labels, &s, 1, &c, &budget).unwrap();
        for face in s.all_faces() {
            if face.dim() >= crash_dim(&c, 1) {
                let part = crash_operator(&mut labels, &face, 1, &c, &budget).unwrap();
                assert!(part.is_subcomplex_of(&whole));
            }
        }
    }

    #[test]
    fn crash_rejects_oversized_simplex() {
        let c = cfg(4, 1, 1);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 4);
        assert!(matches!(
            crash_operator(&mut labels, &s, 2, &c, &Budget::default()),
            Err(TopologyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn crash_respects_budget() {
        let c = cfg(5, 2, 2);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 5);
        let tight = Budget { facets: 100, ..Budget::default() };
        assert!(matches!(crash_operator(&mut labels, &s, 1, &c, &tight), Err(TopologyError::BudgetExceeded { .. })));
    }

    #[test]
    fn interp_examples() {
        let mut labels = Labels::new();
        let named = |labels: &mut Labels, layout: &[(u32, &str)]| {
            Simplex::new(layout.iter().map(|(p, l)| Vertex::new(ProcessId(*p), labels.named(l))).collect()).unwrap()
        };
        // Chain s1 ~ s2 ~ s3 through P0; s1 and s3 share only P0's vertex.
        let s1 = named(&mut labels, &[(0, "a"), (1, "b"), (2, "c")]);
        let s2 = named(&mut labels, &[(0, "a"), (1, "b"), (2, "x")]);
        let s3 = named(&mut labels, &[(0, "a"), (1, "y"), (2, "x")]);
        let far = named(&mut labels, &[(0, "z"), (1, "w"), (2, "u")]);
        let k = SimplicialComplex::from_simplices([s1.clone(), s2.clone(), s3.clone(), far.clone()]);
        let cl = interp_classes(&k, ProcessId(0));
        assert_eq!(cl.class_of(&s1), cl.class_of(&s2));
        assert_eq!(cl.class_of(&s2), cl.class_of(&s3));
        assert_ne!(cl.class_of(&s1), cl.class_of(&far));
        assert_eq!(cl.class_count, 2);
        assert!(cl.closure_extends_adjacency);
        // s1 and s2 share {P0, P1}; for P2 they are separate since the shared
        // face does not contain P2.
        let cl2 = interp_classes(&k, ProcessId(2));
        assert_ne!(cl2.class_of(&s1), cl2.class_of(&s2));
        assert_eq!(cl2.class_of(&s2), cl2.class_of(&s3));
    }

    #[test]
    fn equivocation_on_single_facet() {
        // E_σ(σ) = ∪ over proper faces τ of Ψ(names(τ); interp(σ)).
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 4);
        let k = SimplicialComplex::from_simplex(s.clone());
        let out = equivocation_operator(&mut labels, &k, &k, 3, &Budget::default()).unwrap();
        assert_eq!(out.facet_count(), 4);
        assert_eq!(out.dim(), 2);
        assert!(out.vertices().iter().all(|v| matches!(labels.kind(v.label), LabelKind::Interp { .. })));
        assert_eq!(out.vertices().len(), 4);
        // Below the threshold the image is empty.
        let low = SimplicialComplex::from_simplex(s.faces(1).unwrap()[0].clone());
        assert!(equivocation_operator(&mut labels, &k, &low, 3, &Budget::default()).unwrap().is_empty());
    }

    #[test]
    fn equivocation_requires_subcomplex() {
        let mut labels = Labels::new();
        let a = sigma(&mut labels, 3);
        let b = input_simplex(&mut labels, &[Value::V(1), Value::V(1), Value::V(1)]);
        let k = SimplicialComplex::from_simplex(a);
        let l = SimplicialComplex::from_simplex(b);
        assert!(matches!(
            equivocation_operator(&mut labels, &k, &l, 2, &Budget::default()),
            Err(TopologyError::NotASubcomplex)
        ));
    }

    #[test]
    fn equivocation_matches_set_builder_on_pseudosphere() {
        let mut labels = Labels::new();
        let k = input_complex(&mut labels, 4, &[Value::V(0), Value::V(1)]).unwrap();
        let out = equivocation_operator(&mut labels, &k, &k, 3, &Budget::default()).unwrap();
        // Oracle: for each triangle ρ of K and each P in ρ, the facets of K
        // above ρ are ρ plus either label for the missing process. Two
        // tetrahedra above ρ differ only off P, so they are adjacent for P and
        // share one class; P's interpretation is then its own vertex.
        let mut oracle: BTreeSet<Vec<(ProcessId, ViewLabel)>> = BTreeSet::new();
        let classes: BTreeMap<ProcessId, InterpClasses> =
            (0..4).map(|p| (ProcessId(p), interp_classes(&k, ProcessId(p)))).collect();
        for rho in k.faces(2) {
            let above: Vec<&Simplex> = k.facets().iter().filter(|f| rho.is_face_of(f)).collect();
            assert_eq!(above.len(), 2);
            for p in rho.names() {
                assert_eq!(classes[&p].class_of(above[0]), classes[&p].class_of(above[1]));
            }
            let facet: Vec<(ProcessId, ViewLabel)> = rho
                .vertices()
                .iter()
                .map(|v| {
                    let l = labels.intern(LabelKind::Interp { process: v.process, own: v.label, ordinal: 0 });
                    (v.process, l)
                })
                .collect();
            oracle.insert(facet);
        }
        let got: BTreeSet<Vec<(ProcessId, ViewLabel)>> =
            out.facets().iter().map(|f| f.vertices().iter().map(|v| (v.process, v.label)).collect()).collect();
        assert_eq!(got, oracle);
        assert_eq!(out.facet_count(), 32);
    }

    #[test]
    fn scenario_without_remainder_has_no_equivocation() {
        let c = cfg(5, 2, 2);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 5);
        let sc = scenario_complex(&mut labels, &c, &s, &Budget::default()).unwrap();
        assert_eq!(sc.stages.len(), 2);
        assert!(sc.equivocation.is_none());
        assert_eq!(sc.result().dim(), 2);
    }

    #[test]
    fn scenario_with_remainder_ends_in_equivocation() {
        let c = cfg(5, 3, 2);
        let mut labels = Labels::new();
        let s = input_simplex(&mut labels, &[Value::V(0); 5]);
        let sc = scenario_complex(&mut labels, &c, &s, &Budget::default()).unwrap();
        assert_eq!(sc.stages.len(), 2);
        let e = sc.equivocation.as_ref().unwrap();
        assert!(e.is_pure());
        assert_eq!(e.dim(), crash_dim(&c, 1) - 1);
    }

    #[test]
    fn scenario_unanimous_is_pure() {
        for (n1, t, k) in [(4, 1, 1), (4, 2, 1), (5, 2, 2)] {
            let c = cfg(n1, t, k);
            let mut labels = Labels::new();
            let s = input_simplex(&mut labels, &vec![Value::V(1); n1]);
            let sc = scenario_complex(&mut labels, &c, &s, &Budget::default()).unwrap();
            assert!(sc.result().is_pure());
            assert_eq!(sc.result().dim(), crash_dim(&c, c.crash_rounds()));
        }
    }

    #[test]
    fn scenario_rejects_short_facet() {
        let c = cfg(4, 1, 1);
        let mut labels = Labels::new();
        let s = sigma(&mut labels, 3);
        assert!(matches!(
            scenario_complex(&mut labels, &c, &s, &Budget::default()),
            Err(TopologyError::DimensionMismatch { .. })
        ));
    }
}
