//! Plain-text facet lists: one facet per line, whitespace-separated
//! `process:label` tokens. Blank lines and `#` comments are ignored.

use crate::model::{ProcessId, Value};

use super::complex::{Simplex, SimplicialComplex, Vertex};
use super::labels::Labels;
use super::TopologyError;

/// Facet lines in lexicographic order, so equal complexes export equally
/// whatever order their labels were interned in.
pub fn export_complex(k: &SimplicialComplex, labels: &Labels) -> String {
    let mut lines: Vec<String> = k.facets().iter().map(|f| f.render(labels)).collect();
    lines.sort();
    lines.into_iter().map(|l| l + "\n").collect()
}

/// Labels of the form `v<i>` become input values; anything else is opaque.
pub fn import_complex(text: &str, labels: &mut Labels) -> Result<SimplicialComplex, TopologyError> {
    let mut facets = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| TopologyError::Parse { line: n + 1, message };
        let mut vertices = Vec::new();
        for token in line.split_whitespace() {
            let (p, l) = token.split_once(':').ok_or_else(|| err(format!("expected process:label, got {token:?}")))?;
            let p: u32 = p.parse().map_err(|_| err(format!("bad process index {p:?}")))?;
            if l.is_empty() {
                return Err(err(format!("empty label in {token:?}")));
            }
            let label = match l.parse::<Value>() {
                Ok(v) if !v.is_bottom() => labels.input(v),
                _ => labels.named(l),
            };
            vertices.push(Vertex::new(ProcessId(p), label));
        }
        let s = Simplex::new(vertices).map_err(|e| err(e.to_string()))?;
        facets.push(s);
    }
    Ok(SimplicialComplex::from_simplices(facets))
}
