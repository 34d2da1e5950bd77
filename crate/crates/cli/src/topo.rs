//! Topology modes: complexes, shellability, connectivity, carrier checks
//! and decision-map search.

use kset_core::topology::decision::decision_map_search;
use kset_core::topology::operators::crash_image;
use kset_core::topology::{
    check_carrier_properties, export_complex, homology_connectivity, import_complex, input_complex, input_simplex,
    is_shellable, protocol_complex, scenario_complex, Budget, CarrierOp, DecisionOutcome, Labels, Simplex,
    SimplicialComplex, TopologyError, Verdict, Vertex, DEFAULT_CELL_BUDGET, DEFAULT_FACET_BUDGET,
    DEFAULT_SEARCH_BUDGET,
};
use kset_core::{Config, Value};
use serde_json::json;

use crate::scenario::{parse_values, Mode, Scenario};
use crate::{CliError, Emitter, Options, Report, EXIT_OK, EXIT_VIOLATION};

pub(crate) fn run(s: &Scenario, opts: Options) -> Result<Report, CliError> {
    let budget = budget(s)?;
    let mut labels = Labels::new();
    match s.mode {
        Mode::ScenarioComplex => run_scenario_complex(s, opts, &budget, &mut labels),
        Mode::Shellability => run_shellability(s, &budget, &mut labels),
        Mode::Connectivity => run_connectivity(s, opts, &budget, &mut labels),
        Mode::CarrierCheck => run_carrier(s, opts, &budget, &mut labels),
        Mode::DecisionSearch => run_decision(s, opts, &budget, &mut labels),
        Mode::Agree | Mode::Consensus => unreachable!("protocol modes are dispatched elsewhere"),
    }
}

fn budget(s: &Scenario) -> Result<Budget, CliError> {
    Ok(Budget {
        facets: s.positive("facet_budget", DEFAULT_FACET_BUDGET as u64)? as usize,
        search_nodes: s.positive("search_budget", DEFAULT_SEARCH_BUDGET)?,
        cells: s.positive("cell_budget", DEFAULT_CELL_BUDGET as u64)? as usize,
    })
}

fn config(s: &Scenario, opts: Options) -> Result<Config, CliError> {
    let seed = match opts.seed {
        Some(x) => x,
        None => s.seed()?,
    };
    Config::relaxed(s.raw_config(seed)?).map_err(|e| CliError::Config(e.to_string()))
}

fn values(s: &Scenario) -> Result<Vec<Value>, CliError> {
    let n = s.positive("values", 2)?;
    if n > u16::MAX as u64 {
        return Err(CliError::Parse(format!("values must be at most {}", u16::MAX)));
    }
    Ok((0..n as u16).map(Value::V).collect())
}

/// The complex given inline or by file, if any.
fn given_complex(s: &Scenario, labels: &mut Labels) -> Result<Option<SimplicialComplex>, CliError> {
    let text = match (s.get("complex"), s.get("complex_file")) {
        (Some(_), Some(_)) => return Err(CliError::Parse("give either complex or complex_file, not both".into())),
        (Some(inline), None) => inline.replace('|', "\n"),
        (None, Some(file)) => {
            let path = s.resolve(file);
            std::fs::read_to_string(&path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?
        }
        (None, None) => return Ok(None),
    };
    let k = import_complex(&text, labels)?;
    if k.is_empty() {
        return Err(CliError::Parse("complex has no facets".into()));
    }
    Ok(Some(k))
}

fn input_facet(s: &Scenario, cfg: &Config, labels: &mut Labels) -> Result<Simplex, CliError> {
    let vals = match s.get("input_facet") {
        Some(list) => parse_values(list)?,
        None => {
            let pool = values(s)?;
            (0..cfg.n_plus_1).map(|p| pool[p % pool.len()]).collect()
        }
    };
    if vals.len() != cfg.n_plus_1 {
        return Err(CliError::Parse(format!("input_facet lists {} values for {} processes", vals.len(), cfg.n_plus_1)));
    }
    if vals.iter().any(|v| v.is_bottom()) {
        return Err(CliError::Parse("input_facet may not contain _".into()));
    }
    Ok(input_simplex(labels, &vals))
}

fn shape(k: &SimplicialComplex) -> serde_json::Value {
    json!({"facets": k.facet_count(), "vertices": k.vertices().len(), "dim": k.dim(), "pure": k.is_pure()})
}

fn merge(mut a: serde_json::Value, b: serde_json::Value) -> serde_json::Value {
    let obj = a.as_object_mut().expect("object");
    for (key, v) in b.as_object().expect("object") {
        obj.insert(key.clone(), v.clone());
    }
    a
}

fn export(s: &Scenario, k: &SimplicialComplex, labels: &Labels) -> Result<(), CliError> {
    if let Some(file) = s.get("export") {
        let path = s.resolve(file);
        std::fs::write(&path, export_complex(k, labels))
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_scenario_complex(s: &Scenario, opts: Options, budget: &Budget, labels: &mut Labels) -> Result<Report, CliError> {
    let cfg = config(s, opts)?;
    let sigma = input_facet(s, &cfg, labels)?;
    let sc = scenario_complex(labels, &cfg, &sigma, budget)?;
    let mut out = Emitter::new();
    for (i, k) in sc.stages.iter().enumerate() {
        out.record(merge(json!({"record": "stage", "round": i}), shape(k)));
    }
    if let Some(e) = &sc.equivocation {
        out.record(merge(json!({"record": "equivocation", "round": sc.stages.len()}), shape(e)));
    }
    export(s, sc.result(), labels)?;
    let fields = merge(
        json!({"input_facet": sigma.render(labels), "crash_rounds": cfg.crash_rounds(), "remainder": cfg.remainder()}),
        shape(sc.result()),
    );
    Ok(out.finish(s.mode, "complete", EXIT_OK, fields))
}

fn require_complex(s: &Scenario, labels: &mut Labels) -> Result<SimplicialComplex, CliError> {
    given_complex(s, labels)?
        .ok_or_else(|| CliError::Parse(format!("mode {} needs complex or complex_file", s.mode.name())))
}

fn run_shellability(s: &Scenario, budget: &Budget, labels: &mut Labels) -> Result<Report, CliError> {
    let k = require_complex(s, labels)?;
    let mut out = Emitter::new();
    let order = is_shellable(&k, budget)?;
    let (verdict, code) = match &order {
        Some(o) => {
            let facets: Vec<String> = o.facets().iter().map(|f| f.render(labels)).collect();
            out.record(json!({"record": "shelling", "order": facets}));
            ("shellable", EXIT_OK)
        }
        None => ("refuted", EXIT_VIOLATION),
    };
    Ok(out.finish(s.mode, verdict, code, shape(&k)))
}

fn run_connectivity(s: &Scenario, opts: Options, budget: &Budget, labels: &mut Labels) -> Result<Report, CliError> {
    let k = match given_complex(s, labels)? {
        Some(k) => k,
        None => {
            let cfg = config(s, opts)?;
            let sigma = input_facet(s, &cfg, labels)?;
            scenario_complex(labels, &cfg, &sigma, budget)?.result().clone()
        }
    };
    let degree = match s.number::<usize>("degree")? {
        Some(q) => q,
        None => (k.dim() - 1).max(0) as usize,
    };
    let report = homology_connectivity(&k, degree, budget)?;
    let mut out = Emitter::new();
    for (j, (b, v)) in report.betti.iter().zip(&report.verdicts).enumerate() {
        out.record(json!({"record": "degree", "degree": j, "reduced_betti": b, "verdict": v.to_string()}));
    }
    let (verdict, code) = if report.verdicts.contains(&Verdict::Refuted) {
        ("refuted", EXIT_VIOLATION)
    } else if report.verdicts.iter().all(|v| *v == Verdict::CertifiedConnected) {
        ("certified-connected", EXIT_OK)
    } else {
        ("homology-consistent", EXIT_OK)
    };
    let fields = merge(json!({"degree": degree, "shelling": report.shelling_status}), shape(&k));
    Ok(out.finish(s.mode, verdict, code, fields))
}

/// `K^{round-1}` of the input facet, the natural domain of `C^round`.
fn crash_domain(
    s: &Scenario,
    cfg: &Config,
    round: usize,
    budget: &Budget,
    labels: &mut Labels,
) -> Result<SimplicialComplex, CliError> {
    if round == 1 {
        return Ok(input_complex(labels, cfg.n_plus_1, &values(s)?)?);
    }
    let sigma = input_facet(s, cfg, labels)?;
    let mut k = SimplicialComplex::from_simplex(sigma);
    for i in 1..round {
        k = crash_image(labels, &k, i, cfg, budget)?;
    }
    Ok(k)
}

fn run_carrier(s: &Scenario, opts: Options, budget: &Budget, labels: &mut Labels) -> Result<Report, CliError> {
    let operator = s.get("operator").unwrap_or("crash");
    let given = given_complex(s, labels)?;
    let (report, domain, strict_expected) = match operator {
        "crash" => {
            let cfg = config(s, opts)?;
            let round = s.positive("round", 1)? as usize;
            let domain = match given {
                Some(k) => k,
                None => crash_domain(s, &cfg, round, budget, labels)?,
            };
            let op = CarrierOp::Crash { round, cfg: &cfg };
            (check_carrier_properties(labels, &op, &domain, budget)?, domain, true)
        }
        "equivocation" => {
            let domain = match given {
                Some(k) => k,
                None => {
                    let cfg = config(s, opts)?;
                    input_complex(labels, cfg.n_plus_1, &values(s)?)?
                }
            };
            if !domain.is_pure() {
                return Err(TopologyError::NotPure.into());
            }
            let op = CarrierOp::Equivocation { k: &domain, top: domain.dim() };
            (check_carrier_properties(labels, &op, &domain, budget)?, domain.clone(), false)
        }
        "crash-equivocate" => {
            let cfg = config(s, opts)?;
            let domain = match given {
                Some(k) => k,
                None => input_complex(labels, cfg.n_plus_1, &values(s)?)?,
            };
            let op = CarrierOp::CrashThenEquivocate { cfg: &cfg };
            (check_carrier_properties(labels, &op, &domain, budget)?, domain, true)
        }
        other => return Err(CliError::Parse(format!("unknown operator {other:?}"))),
    };
    let mut out = Emitter::new();
    out.record(json!({"record": "carrier", "report": report}));
    let holds = report.monotone() && (!strict_expected || report.strict());
    let fields = merge(
        json!({"operator": report.operator, "monotone": report.monotone(), "strict": report.strict(), "strict_required": strict_expected}),
        shape(&domain),
    );
    let (verdict, code) = if holds { ("carrier", EXIT_OK) } else { ("refuted", EXIT_VIOLATION) };
    Ok(out.finish(s.mode, verdict, code, fields))
}

/// Every process sees its whole input facet.
fn resolved_complex(labels: &mut Labels, cfg: &Config, vals: &[Value]) -> Result<SimplicialComplex, CliError> {
    let inputs = input_complex(labels, cfg.n_plus_1, vals)?;
    let facets = inputs
        .facets()
        .iter()
        .map(|f| {
            let view = labels.simplex(f.clone());
            Simplex::new(f.vertices().iter().map(|v| Vertex::new(v.process, view)).collect())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimplicialComplex::from_simplices(facets))
}

fn run_decision(s: &Scenario, opts: Options, budget: &Budget, labels: &mut Labels) -> Result<Report, CliError> {
    let k_sets: usize = s.required("k")?;
    if k_sets == 0 {
        return Err(CliError::Config("k must be at least 1".into()));
    }
    let (complex, source) = match given_complex(s, labels)? {
        Some(c) => (c, "given"),
        None => {
            let cfg = config(s, opts)?;
            match s.get("source").unwrap_or("scenario") {
                "round0" => (input_complex(labels, cfg.n_plus_1, &values(s)?)?, "round0"),
                "scenario" => (protocol_complex(labels, &cfg, &values(s)?, budget)?, "scenario"),
                "resolved" => (resolved_complex(labels, &cfg, &values(s)?)?, "resolved"),
                other => return Err(CliError::Parse(format!("unknown source {other:?}"))),
            }
        }
    };
    let (outcome, nodes) = decision_map_search(labels, &complex, k_sets, budget)?;
    let mut out = Emitter::new();
    let (verdict, code) = match &outcome {
        DecisionOutcome::Witness(map) => {
            let entries: Vec<String> =
                map.iter().map(|(v, x)| format!("{}:{} -> {x}", v.process.0, labels.render(v.label))).collect();
            out.record(json!({"record": "witness", "assignments": entries}));
            ("witness", EXIT_OK)
        }
        DecisionOutcome::Refuted => ("refuted", EXIT_VIOLATION),
    };
    let fields = merge(json!({"k": k_sets, "source": source, "search_nodes": nodes}), shape(&complex));
    Ok(out.finish(s.mode, verdict, code, fields))
}
