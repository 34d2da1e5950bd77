//! Simplicial complexes of protocol views: pseudospheres, the crash and
//! equivocation operators, shellability, exact homology, nerves, carrier-map
//! checks and decision-map search.
//!
//! Every enumerating operation takes a [`Budget`] and fails with
//! [`TopologyError::BudgetExceeded`] instead of truncating.

pub mod carrier;
pub mod complex;
pub mod decision;
pub mod homology;
pub mod io;
pub mod labels;
pub mod nerve;
pub mod operators;
pub mod shelling;

use thiserror::Error;

use crate::model::ProcessId;

pub use carrier::{check_carrier_properties, CarrierOp, CarrierReport};
pub use complex::{pseudosphere, Simplex, SimplicialComplex, Vertex};
pub use decision::{check_decision_map, decision_map_search, DecisionOutcome};
pub use homology::{homology_connectivity, reduced_betti, ConnectivityReport, Verdict};
pub use io::{export_complex, import_complex};
pub use labels::{LabelKind, Labels, ViewLabel};
pub use nerve::nerve;
pub use operators::{
    crash_operator, crash_then_equivocate, equivocation_operator, input_complex, input_simplex, interp_classes,
    protocol_complex, scenario_complex, Equivocator, InterpClasses, ScenarioComplex,
};
pub use shelling::{is_shellable, verify_shelling, ShellingOrder};

pub const DEFAULT_FACET_BUDGET: usize = 10_000;
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;
pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Facets in any constructed complex.
    pub facets: usize,
    /// Search nodes for shelling, carrier and decision-map searches.
    pub search_nodes: u64,
    /// Simplices enumerated for boundary matrices.
    pub cells: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { facets: DEFAULT_FACET_BUDGET, search_nodes: DEFAULT_SEARCH_BUDGET, cells: DEFAULT_CELL_BUDGET }
    }
}

impl Budget {
    pub fn with_facets(facets: usize) -> Budget {
        Budget { facets, ..Budget::default() }
    }

    pub(crate) fn check_facets(&self, count: u128) -> Result<(), TopologyError> {
        if count > self.facets as u128 {
            return Err(TopologyError::BudgetExceeded { what: "facets", limit: self.facets as u128 });
        }
        Ok(())
    }

    pub(crate) fn check_nodes(&self, count: u64) -> Result<(), TopologyError> {
        if count > self.search_nodes {
            return Err(TopologyError::BudgetExceeded { what: "search nodes", limit: self.search_nodes as u128 });
        }
        Ok(())
    }

    pub(crate) fn check_cells(&self, count: usize) -> Result<(), TopologyError> {
        if count > self.cells {
            return Err(TopologyError::BudgetExceeded { what: "cells", limit: self.cells as u128 });
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("pseudosphere needs at least one process")]
    NoProcesses,
    #[error("empty value set for process {0}")]
    EmptyValueSet(ProcessId),
    #[error("process {0} appears twice in one simplex")]
    NameViewViolation(ProcessId),
    #[error("face dimension {requested} out of range for a simplex of dimension {dim}")]
    DimensionOutOfRange { requested: isize, dim: isize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: isize, got: isize },
    #[error("complex is not pure")]
    NotPure,
    #[error("L is not a subcomplex of K")]
    NotASubcomplex,
    #[error("the cover's union differs from the covered complex")]
    NotACover,
    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: u128 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
