use kset_wasm::{analyze_pseudosphere, run_agreement, scenario_summary};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn agreement_run_reports_each_process() {
    let r = parse(run_agreement(18, 2, 2, 2, "random", "", 5));
    assert_eq!(r["passed"], true);
    assert_eq!(r["rounds"], 2);
    assert_eq!(r["processes"].as_array().unwrap().len(), 18);
    assert!(r["decisions"].as_array().unwrap().len() <= 2);
    assert_eq!(r["messages_per_round"].as_array().unwrap().len(), 2);
    assert_eq!(parse(run_agreement(18, 2, 2, 2, "random", "", 5))["digest"], r["digest"]);
}

#[test]
fn unanimous_inputs_are_decided() {
    let ones = ["1"; 7].join(",");
    let r = parse(run_agreement(7, 2, 1, 1, "crash", &ones, 0));
    assert_eq!(r["decisions"], serde_json::json!(["v1"]));
}

#[test]
fn bad_requests_return_errors() {
    assert!(parse(run_agreement(18, 1, 2, 2, "crash", "", 0))["error"].is_string());
    assert!(parse(run_agreement(18, 2, 2, 2, "sneaky", "", 0))["error"].is_string());
    assert!(parse(analyze_pseudosphere("2,x"))["error"].is_string());
    assert!(parse(analyze_pseudosphere("20,20,20"))["error"].is_string());
    assert!(parse(scenario_summary(4, 1, 1, "0,1"))["error"].is_string());
}

#[test]
fn pseudospheres_are_certified() {
    let r = parse(analyze_pseudosphere("2,2,3"));
    assert_eq!(r["facets"], 12);
    assert_eq!(r["dim"], 2);
    assert_eq!(r["reduced_betti"], serde_json::json!([0, 0]));
    assert_eq!(r["shelling"], "found");
    assert_eq!(r["verdicts"], serde_json::json!(["certified-connected", "certified-connected"]));
}

#[test]
fn scenario_stages_are_listed() {
    let r = parse(scenario_summary(4, 1, 1, "0,1,1,0"));
    assert_eq!(r["crash_rounds"], 1);
    assert_eq!(r["stages"].as_array().unwrap().len(), 2);
    assert_eq!(r["stages"][1]["facets"], 32);
    assert!(r["equivocation"].is_null());
    assert_eq!(r["result"]["reduced_betti"], serde_json::json!([0, 0]));
}
