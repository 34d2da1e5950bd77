//! Browser bindings for the demo page in `www/`. Each entry point returns a
//! JSON string; failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;

use kset_core::campaign::{execute, AdversaryChoice, AdversarySpec};
use kset_core::topology::{
    homology_connectivity, input_simplex, pseudosphere, scenario_complex, Budget, Labels, SimplicialComplex,
};
use kset_core::{validate_config, Config, ProcessId, RawConfig, Value};
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

/// Facet limit for complexes built from the page.
pub const DEMO_FACETS: usize = 5_000;

fn respond(result: Result<Json, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn value_list(text: &str) -> Result<Vec<Value>, String> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<u16>().map(Value::V).or_else(|_| s.parse::<Value>()).map_err(|_| format!("bad value {s:?}"))
        })
        .collect()
}

/// One seeded protocol run. `inputs` is empty for random inputs, or a comma
/// list with one value per process.
#[wasm_bindgen]
pub fn run_agreement(n_plus_1: u32, t: u32, k: u32, d: u32, adversary: &str, inputs: &str, seed: u32) -> String {
    respond(agreement(n_plus_1 as usize, t as usize, k as usize, d as usize, adversary, inputs, seed as u64))
}

fn agreement(
    n_plus_1: usize,
    t: usize,
    k: usize,
    d: usize,
    adversary: &str,
    inputs: &str,
    seed: u64,
) -> Result<Json, String> {
    let cfg = validate_config(RawConfig { n_plus_1, t, k, d, seed }).map_err(|e| e.to_string())?;
    let choice: AdversaryChoice = adversary.parse()?;
    let inputs = if inputs.trim().is_empty() {
        None
    } else {
        let values = value_list(inputs)?;
        if values.len() != n_plus_1 {
            return Err(format!("{} inputs for {n_plus_1} processes", values.len()));
        }
        if let Some(v) = values.iter().find(|v| v.within_domain(d).is_bottom()) {
            return Err(format!("input {v} is outside v0..v{d}"));
        }
        Some(values.into_iter().enumerate().map(|(p, v)| (ProcessId::from(p), v)).collect::<BTreeMap<_, _>>())
    };
    let (summary, run) = execute(&cfg, &AdversarySpec::Generated(choice), inputs.as_ref(), seed);
    let run = run.ok_or_else(|| summary.error.clone().unwrap_or_default())?;
    let processes: Vec<Json> = run
        .inputs
        .iter()
        .map(|(p, input)| {
            json!({
                "process": p.0,
                "input": input.to_string(),
                "faulty": run.trace.faulty_set.contains(p),
                "decision": run.trace.decisions.get(p).map(|v| v.to_string()),
            })
        })
        .collect();
    let messages: Vec<usize> = run.trace.rounds.iter().map(|r| r.deliveries.len()).collect();
    let forged: Vec<usize> =
        run.trace.rounds.iter().map(|r| r.deliveries.iter().filter(|m| m.byzantine_flag).count()).collect();
    Ok(json!({
        "passed": summary.passed(),
        "rounds": summary.rounds,
        "decisions": summary.decisions.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "violations": summary.violations,
        "digest": summary.digest,
        "processes": processes,
        "messages_per_round": messages,
        "byzantine_per_round": forged,
    }))
}

fn connectivity(k: &SimplicialComplex, budget: &Budget) -> Result<Json, String> {
    let q = (k.dim() - 1).max(0) as usize;
    let report = homology_connectivity(k, q, budget).map_err(|e| e.to_string())?;
    Ok(json!({
        "facets": k.facet_count(),
        "vertices": k.vertices().len(),
        "dim": k.dim(),
        "reduced_betti": report.betti,
        "verdicts": report.verdicts.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "shelling": report.shelling_status,
    }))
}

/// Pseudosphere with `sizes[p]` input values for process `p`, e.g. `"2,2,3"`.
#[wasm_bindgen]
pub fn analyze_pseudosphere(sizes: &str) -> String {
    respond(pseudosphere_report(sizes))
}

fn pseudosphere_report(sizes: &str) -> Result<Json, String> {
    let sizes: Vec<u16> =
        sizes.split(',').map(|s| s.trim().parse().map_err(|_| format!("bad size {s:?}"))).collect::<Result<_, _>>()?;
    let mut labels = Labels::new();
    let assignment = sizes
        .iter()
        .enumerate()
        .map(|(p, n)| (ProcessId::from(p), (0..*n).map(|v| labels.input(Value::V(v))).collect()))
        .collect();
    let budget = Budget::with_facets(DEMO_FACETS);
    let product: u128 = sizes.iter().map(|s| *s as u128).product();
    if product > DEMO_FACETS as u128 {
        return Err(format!("{product} facets is over the demo limit of {DEMO_FACETS}"));
    }
    let k = pseudosphere(&assignment).map_err(|e| e.to_string())?;
    connectivity(&k, &budget)
}

/// Stage sizes of the scenario complex of one input facet, plus the
/// connectivity of the result.
#[wasm_bindgen]
pub fn scenario_summary(n_plus_1: u32, t: u32, k: u32, input_facet: &str) -> String {
    respond(scenario(n_plus_1 as usize, t as usize, k as usize, input_facet))
}

fn scenario(n_plus_1: usize, t: usize, k: usize, input_facet: &str) -> Result<Json, String> {
    let values = value_list(input_facet)?;
    let d = values.iter().filter_map(|v| v.index()).max().unwrap_or(0) as usize;
    let cfg = Config::relaxed(RawConfig { n_plus_1, t, k, d, seed: 0 }).map_err(|e| e.to_string())?;
    if values.len() != n_plus_1 || values.iter().any(|v| v.is_bottom()) {
        return Err(format!("input facet needs {n_plus_1} values"));
    }
    let mut labels = Labels::new();
    let sigma = input_simplex(&mut labels, &values);
    let budget = Budget::with_facets(DEMO_FACETS);
    let sc = scenario_complex(&mut labels, &cfg, &sigma, &budget).map_err(|e| e.to_string())?;
    let stages: Vec<Json> = sc.stages.iter().map(|s| json!({"facets": s.facet_count(), "dim": s.dim()})).collect();
    Ok(json!({
        "crash_rounds": cfg.crash_rounds(),
        "remainder": cfg.remainder(),
        "stages": stages,
        "equivocation": sc.equivocation.as_ref().map(|e| json!({"facets": e.facet_count(), "dim": e.dim()})),
        "result": connectivity(sc.result(), &budget)?,
    }))
}
