use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spandescent"))
        .args(args)
        .env_remove("SPANDESCENT_WORD_BUDGET")
        .env_remove("SPANDESCENT_ACTION_BOUND")
        .env_remove("SPANDESCENT_SPAN_BOUND")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn nerve_counts() {
    let out = run(&["nerve", &data("full.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["counts"], serde_json::json!({"N0": 2, "N1": 4, "N2": 8}));
    assert_eq!(r["groupoid_condition"], true);
    let r = report(&run(&["nerve", &data("single.json")]));
    assert_eq!(r["counts"], serde_json::json!({"N0": 1, "N1": 1, "N2": 1}));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"poset\": {\"points\": [\"*\"]},\n \"components\": [").unwrap();
    let out = run(&["nerve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"poset": {"points": ["*"]}, "components": [{"label": "1", "fibers": {"x": ["a"]}}]}"#).unwrap();
    let out = run(&["nerve", unknown.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`x`"));
}

#[test]
fn connected_refinement_is_a_hypercover() {
    let out = run(&["refine", &data("pseudocircle.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["hypercover"]["holds"], true);
    assert_eq!(r["condition_g"], true);
    assert_eq!(r["selfdual_violations"], serde_json::json!([]));
}

#[test]
fn starved_class_lists_uncovered_elements() {
    let class = format!("zero:{}", data("starved.json"));
    let out = run(&["refine", &data("pseudocircle.json"), "--class", &class]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["hypercover"]["holds"], false);
    assert_eq!(r["epi_criteria"], false);
    let missing = r["hypercover"]["uncovered_pairs"].as_array().unwrap();
    assert_eq!(missing.len(), 4);
    assert!(missing.iter().any(|u| u["over"] == "(c,d)" && u["point"] == "a"));
}

#[test]
fn disconnected_component_rejects_connected_class() {
    let out = run(&["refine", &data("swap.json"), "--class", "connected"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not connected"));
}

#[test]
fn unknown_class_is_an_input_error() {
    assert_eq!(code(&run(&["refine", &data("swap.json"), "--class", "two:x"])), 2);
}

#[test]
fn groupoid_of_full_nerve() {
    let r = report(&run(&["groupoid", &data("full.json")]));
    assert_eq!(r["counts"]["objects"], 2);
    assert_eq!(r["counts"]["generators"], 4);
    assert_eq!(r["counts"]["relations"], 8);
    assert_eq!(r["discrete"], false);
}

#[test]
fn g_groupoid_of_a_refinement_reports_extra_relations() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["refine", &data("pseudocircle.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("refine.json")).unwrap()).unwrap();
    assert!(dir.path().join("refine.dot").exists());
    let family = dir.path().join("family.json");
    std::fs::write(&family, serde_json::to_string(&saved["family"]).unwrap()).unwrap();
    let plain = report(&run(&["groupoid", family.to_str().unwrap()]));
    let g = report(&run(&["groupoid", family.to_str().unwrap(), "--g"]));
    assert_eq!(g["family_violations"], serde_json::json!([]));
    let extra = g["extra_relations"].as_u64().unwrap();
    assert!(extra > 0);
    assert_eq!(g["counts"]["relations"].as_u64().unwrap(), plain["counts"]["relations"].as_u64().unwrap() + extra);
}

#[test]
fn groupoid_without_nondegenerate_edges_is_discrete() {
    let r = report(&run(&["groupoid", &data("discrete.json")]));
    assert_eq!(r["discrete"], true);
    assert_eq!(r["counts"]["generators"], 2);
}

#[test]
fn glue_swap_datum() {
    for datum in ["swap_datum.json", "swap_sigma.json"] {
        let out = run(&["descend", &data("swap.json"), &data(datum), "--glue"]);
        assert_eq!(code(&out), 0);
        let r = report(&out);
        assert_eq!(r["X_size"], 2);
        assert_eq!(r["trivialization_violations"], serde_json::json!([]));
    }
}

#[test]
fn main1_round_trip_has_empty_residual() {
    let out = run(&["descend", &data("swap.json"), &data("swap_datum.json"), "--main1"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["residual"], serde_json::json!([]));
    assert_eq!(r["recovered_equal"], true);
}

#[test]
fn invalid_cocycle_is_reported() {
    let out = run(&["descend", &data("swap.json"), &data("bad_cocycle.json"), "--check"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["valid"], false);
    let v = r["violations"].as_array().unwrap();
    assert!(!v.is_empty() && v.iter().all(|x| x.as_str().unwrap().starts_with("cocycle")));
    assert_eq!(code(&run(&["descend", &data("swap.json"), &data("swap_datum.json"), "--check"])), 0);
}

#[test]
fn covering_projection_and_main2() {
    let r = report(&run(&["descend", &data("swap.json"), &data("swap_datum.json"), "--covproj"]));
    assert_eq!(r["covering_projection"], true);
    let out = run(&["descend", &data("swap.json"), "--main2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["main2"]["projection_objects"], r["main2"]["action_objects"]);
    assert_eq!(r["main2"]["projection_homs"], r["main2"]["action_homs"]);
}

#[test]
fn descend_needs_a_datum_and_a_mode() {
    assert_eq!(code(&run(&["descend", &data("swap.json"), "--glue"])), 2);
    assert_eq!(code(&run(&["descend", &data("swap.json"), &data("swap_datum.json")])), 2);
}

#[test]
fn progroupoid_reports() {
    let out = run(&["progroupoid", &data("one_node.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["strictness"]["transitions"], serde_json::json!([]));
    let out = run(&["progroupoid", &data("chain.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["strictness"]["transitions"][0]["verdict"], "Strict");
    let out = run(&["progroupoid", &data("unreachable.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["strictness"]["transitions"][0]["verdict"]["NotStrict"]["witness"], "3");
    assert_eq!(code(&run(&["progroupoid", &data("missing_node.json")])), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["nerve", "full.json"],
        vec!["groupoid", "full.json"],
        vec!["refine", "pseudocircle.json"],
        vec!["descend", "swap.json", "swap_datum.json", "--main1"],
    ] {
        let args: Vec<String> = args.iter().map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn budgets_come_from_the_environment() {
    let bad = Command::new(env!("CARGO_BIN_EXE_spandescent"))
        .args(["nerve", &data("full.json")])
        .env("SPANDESCENT_ACTION_BOUND", "0")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    let one = Command::new(env!("CARGO_BIN_EXE_spandescent"))
        .args(["descend", &data("swap.json"), "--main2"])
        .env("SPANDESCENT_ACTION_BOUND", "1")
        .output()
        .unwrap();
    assert_eq!(report(&one)["main2"]["bound"], 1);
}
