//! Brute-force checks that an operator is a (strict) carrier map.

use std::collections::HashMap;

use serde::Serialize;

use crate::model::Config;

use super::complex::{Simplex, SimplicialComplex};
use super::labels::Labels;
use super::operators::{crash_operator, crash_then_equivocate, Equivocator};
use super::{Budget, TopologyError};

/// Operator under test, applied to single simplices of the domain.
pub enum CarrierOp<'a> {
    /// `σ ↦ C^i(σ)`.
    Crash { round: usize, cfg: &'a Config },
    /// `σ ↦ E_K(⟨σ⟩)` over the simplices of `K`.
    Equivocation { k: &'a SimplicialComplex, top: isize },
    /// `σ ↦ E_{C^r(σ)}(C^r(σ))`.
    CrashThenEquivocate { cfg: &'a Config },
}

impl CarrierOp<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            CarrierOp::Crash { .. } => "crash",
            CarrierOp::Equivocation { .. } => "equivocation",
            CarrierOp::CrashThenEquivocate { .. } => "crash-then-equivocate",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CarrierReport {
    pub operator: String,
    pub monotone_pairs: u64,
    pub monotone_failures: u64,
    pub strict_pairs: u64,
    pub strict_failures: u64,
    /// First failing pair per property, rendered.
    pub first_failure: Option<String>,
}

impl CarrierReport {
    pub fn monotone(&self) -> bool {
        self.monotone_failures == 0
    }

    pub fn strict(&self) -> bool {
        self.strict_failures == 0
    }
}

/// Checks `Φ(τ) ⊆ Φ(σ)` for every simplex `σ` of `domain` and every
/// nonempty face `τ ⊂ σ`, and `Φ(σ ∩ τ) = Φ(σ) ∩ Φ(τ)` for every pair of
/// distinct facets.
pub fn check_carrier_properties(
    labels: &mut Labels,
    op: &CarrierOp<'_>,
    domain: &SimplicialComplex,
    budget: &Budget,
) -> Result<CarrierReport, TopologyError> {
    let equivocator = match op {
        CarrierOp::Equivocation { k, top } => Some(Equivocator::new(labels, k, *top)?),
        _ => None,
    };
    let mut memo: HashMap<Simplex, SimplicialComplex> = HashMap::new();
    let mut image = |labels: &mut Labels, s: &Simplex| -> Result<SimplicialComplex, TopologyError> {
        if let Some(c) = memo.get(s) {
            return Ok(c.clone());
        }
        let c = if s.is_empty() {
            SimplicialComplex::empty()
        } else {
            match op {
                CarrierOp::Crash { round, cfg } => crash_operator(labels, s, *round, cfg, budget)?,
                CarrierOp::Equivocation { .. } => equivocator
                    .as_ref()
                    .expect("built above")
                    .apply(&SimplicialComplex::from_simplex(s.clone()), budget)?,
                CarrierOp::CrashThenEquivocate { cfg } => crash_then_equivocate(labels, s, cfg, budget)?,
            }
        };
        memo.insert(s.clone(), c.clone());
        Ok(c)
    };

    let mut report = CarrierReport { operator: op.name().to_string(), ..CarrierReport::default() };
    let mut nodes = 0u64;
    for sigma in domain.simplices_by_dim().into_iter().flatten() {
        let big = image(labels, &sigma)?;
        for tau in sigma.all_faces() {
            if tau.is_empty() || tau.len() == sigma.len() {
                continue;
            }
            nodes += 1;
            budget.check_nodes(nodes)?;
            report.monotone_pairs += 1;
            let small = image(labels, &tau)?;
            if !small.is_subcomplex_of(&big) {
                report.monotone_failures += 1;
                report.first_failure.get_or_insert_with(|| {
                    format!("monotone: [{}] within [{}]", tau.render(labels), sigma.render(labels))
                });
            }
        }
    }
    let facets = domain.facets();
    for (i, a) in facets.iter().enumerate() {
        for b in &facets[i + 1..] {
            nodes += 1;
            budget.check_nodes(nodes)?;
            report.strict_pairs += 1;
            let ia = image(labels, a)?;
            let ib = image(labels, b)?;
            let meet = image(labels, &a.intersection(b))?;
            if ia.intersection(&ib) != meet {
                report.strict_failures += 1;
                report
                    .first_failure
                    .get_or_insert_with(|| format!("strict: [{}] and [{}]", a.render(labels), b.render(labels)));
            }
        }
    }
    Ok(report)
}
