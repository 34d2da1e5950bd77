use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::complex::{Simplex, SimplicialComplex};
use super::shelling::{is_shellable, ShellingOrder};
use super::{Budget, TopologyError};

/// Rank of a sparse matrix over `Q`, by exact elimination.
pub fn rank_exact(rows: Vec<Vec<(usize, BigRational)>>) -> usize {
    // Pivot rows keyed by their leading column, normalised to lead 1.
    let mut pivots: HashMap<usize, Vec<(usize, BigRational)>> = HashMap::new();
    for mut row in rows {
        row.retain(|(_, v)| !v.is_zero());
        row.sort_by_key(|(c, _)| *c);
        while let Some((lead, coef)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(p) => row = axpy(&row, &-coef, p),
                None => {
                    let inv = coef.recip();
                    let normalised = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
                    pivots.insert(lead, normalised);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `a + s·b` for sorted sparse rows.
fn axpy(a: &[(usize, BigRational)], s: &BigRational, b: &[(usize, BigRational)]) -> Vec<(usize, BigRational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, s * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced Betti numbers `b̃_0 … b̃_q` over `Q`.
pub fn reduced_betti(k: &SimplicialComplex, q: usize, budget: &Budget) -> Result<Vec<usize>, TopologyError> {
    let top = (q + 1).min(k.dim().max(0) as usize);
    let mut cells: Vec<Vec<Simplex>> = Vec::new();
    let mut total = 0;
    for x in 0..=top as isize {
        let c = k.faces(x);
        total += c.len();
        budget.check_cells(total)?;
        cells.push(c);
    }
    if k.is_empty() {
        return Ok(vec![0; q + 1]);
    }
    let index: Vec<HashMap<&Simplex, usize>> =
        cells.iter().map(|c| c.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
    // rank ∂_x : C_x → C_{x−1}; ∂_0 is the augmentation onto Q.
    let mut ranks = vec![0usize; top + 2];
    ranks[0] = 1;
    for x in 1..=top {
        let rows: Vec<Vec<(usize, BigRational)>> = cells[x]
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|j| {
                        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                        (index[x - 1][&s.without(j)], BigRational::from_integer(sign))
                    })
                    .collect()
            })
            .collect();
        ranks[x] = rank_exact(rows);
    }
    Ok((0..=q)
        .map(|x| {
            let c = cells.get(x).map_or(0, |c| c.len());
            c - ranks.get(x).copied().unwrap_or(0) - ranks.get(x + 1).copied().unwrap_or(0)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A shelling of dimension above the degree proves connectivity.
    CertifiedConnected,
    /// Reduced homology vanishes through the degree, without a certificate.
    HomologyConsistent,
    /// Some reduced Betti number up to the degree is nonzero.
    Refuted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedConnected => "certified-connected",
            Verdict::HomologyConsistent => "homology-consistent",
            Verdict::Refuted => "refuted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShellingStatus {
    Found,
    Refuted,
    NotPure,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct ConnectivityReport {
    pub dim: isize,
    /// `b̃_0 … b̃_q`.
    pub betti: Vec<usize>,
    pub shelling: Option<ShellingOrder>,
    pub shelling_status: ShellingStatus,
    /// Verdict on `j`-connectivity for each `j ≤ q`.
    pub verdicts: Vec<Verdict>,
}

impl ConnectivityReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "dim {}\nshelling {}\n",
            self.dim,
            serde_json::to_value(&self.shelling_status).unwrap().as_str().unwrap()
        );
        for (j, (b, v)) in self.betti.iter().zip(&self.verdicts).enumerate() {
            out.push_str(&format!("degree {j} rank {b} verdict {v}\n"));
        }
        out
    }
}

/// Homology-level connectivity of `k` through degree `q`, upgraded to a
/// certificate when a shelling exists.
pub fn homology_connectivity(
    k: &SimplicialComplex,
    q: usize,
    budget: &Budget,
) -> Result<ConnectivityReport, TopologyError> {
    let betti = reduced_betti(k, q, budget)?;
    let (shelling, shelling_status) = if !k.is_pure() {
        (None, ShellingStatus::NotPure)
    } else {
        match is_shellable(k, budget) {
            Ok(Some(o)) => (Some(o), ShellingStatus::Found),
            Ok(None) => (None, ShellingStatus::Refuted),
            Err(TopologyError::BudgetExceeded { .. }) => (None, ShellingStatus::BudgetExhausted),
            Err(e) => return Err(e),
        }
    };
    let verdicts = (0..=q)
        .map(|j| {
            if k.is_empty() || betti[..=j].iter().any(|b| *b != 0) {
                Verdict::Refuted
            } else if shelling.is_some() && k.dim() > j as isize {
                Verdict::CertifiedConnected
            } else {
                Verdict::HomologyConsistent
            }
        })
        .collect();
    Ok(ConnectivityReport { dim: k.dim(), betti, shelling, shelling_status, verdicts })
}
