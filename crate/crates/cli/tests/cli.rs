//! End-to-end runs of the `cartan` command line.

use std::collections::BTreeSet;
use std::path::PathBuf;

use cartan_cli::{run, COVERAGE, SUBCOMMANDS};
use serde_json::Value;

fn workspace_file(rel: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    root.to_string_lossy().into_owned()
}

fn cartan(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cartan").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cartan_json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = cartan(&full);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn point_hilbert_series_in_json() {
    let (code, v) = cartan_json(&["cohomology", "--model", "builtin:point", "--cutoff", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["hilbert"], serde_json::json!([1, 0, 1, 0, 1, 0, 1]));
}

#[test]
fn localizing_the_unit_on_the_sphere_gives_zero() {
    let (code, out, _) = cartan(&["localize", "--model", "builtin:s2_rotation", "--class", "one"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("0"));
    let (_, v) = cartan_json(&["localize", "--model", "builtin:s2_rotation", "--class", "one"]);
    assert_eq!(v["localized"], "0");
    assert_eq!(v["is_polynomial"], true);
}

#[test]
fn broken_fixture_exits_two_with_witness() {
    let path = workspace_file("fixtures/broken.json");
    let (code, out, _) = cartan(&["validate", "--model", &path]);
    assert_eq!(code, 2);
    assert!(out.contains("witness a"), "{out}");
    assert!(out.contains("broken.json:9"), "{out}");
    let (code, v) = cartan_json(&["validate", "--model", &path]);
    assert_eq!(code, 2);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["witnesses"], serde_json::json!(["a"]));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cartan(&["bogus"]).0, 1);
    assert_eq!(cartan(&["cohomology"]).0, 1);
    let (code, _, err) = cartan(&["cohomology", "--model", "builtin:nope"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    assert_eq!(cartan(&["gysin", "--model", "builtin:s2_rotation", "--map", "nowhere"]).0, 1);
    assert_eq!(cartan(&["restrict", "--model", "builtin:s2_rotation", "--matrix", "1;2"]).0, 1);
    assert_eq!(cartan(&["--help"]).0, 0);
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["cohomology", "--model", "builtin:c_alpha(1,-2)", "--format", "json"][..],
        &["gysin", "--model", "builtin:s2_rotation", "--map", "inclusion:S", "--format", "json"],
        &["classify", "--model", "builtin:circle_free"],
    ] {
        assert_eq!(cartan(args), cartan(args));
    }
}

#[test]
fn seed_flag_is_threaded_through() {
    let (_, v) = cartan_json(&["cohomology", "--model", "builtin:point", "--seed", "42"]);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["specialized_total"], 1);
}

#[test]
fn coverage_maps_each_operation_to_one_subcommand() {
    let ops = [
        "builtin",
        "load_model",
        "validate_model",
        "validate_map",
        "cohomology_generic",
        "cohomology_hilbert",
        "predict_free_hilbert",
        "generic_specialized_rank",
        "smith_normal_form",
        "classify_rank1",
        "ext_rank1",
        "pairing_matrix",
        "rank_and_solve",
        "duality_check",
        "is_torsion",
        "pullback_cohomology",
        "gysin_localized",
        "projection_formula_check",
        "cartan_differential",
        "thom_extend",
        "euler_linear",
        "nested_euler_check",
        "integrate",
        "localize_integral",
        "localization_consistency",
        "lefschetz_number",
        "restrict_subtorus",
        "save_model",
    ];
    let listed: Vec<&str> = COVERAGE.iter().map(|(op, _)| *op).collect();
    assert_eq!(listed.iter().collect::<BTreeSet<_>>(), ops.iter().collect::<BTreeSet<_>>());
    assert_eq!(listed.len(), ops.len(), "an operation is listed twice");
    let subs: BTreeSet<&str> = SUBCOMMANDS.iter().copied().collect();
    for (op, sub) in COVERAGE {
        assert!(subs.contains(sub), "{op} -> {sub}");
    }
    let used: BTreeSet<&str> = COVERAGE.iter().map(|(_, s)| *s).collect();
    assert_eq!(used, subs);
}

#[test]
fn every_subcommand_runs() {
    let s2 = workspace_file("models/s2_rotation.json");
    let out = tempfile::tempdir().unwrap();
    let saved = out.path().join("restricted.json");
    let saved_str = saved.to_string_lossy().into_owned();
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--model", &s2],
        vec!["cohomology", "--model", "builtin:s2_rotation"],
        vec!["classify", "--model", "builtin:circle_free"],
        vec!["pairing", "--model", "builtin:s2_rotation"],
        vec!["duality", "--model", "builtin:s2_rotation"],
        vec!["gysin", "--model", &s2, "--map", "N->s2_rotation"],
        vec!["thom", "--model", "builtin:s2_rotation", "--cocycle", "vol=1"],
        vec!["euler", "--model", "builtin:c_alpha(1,-2)", "--extra", "1,1;0,1"],
        vec!["localize", "--model", "builtin:s2_rotation"],
        vec!["lefschetz", "--model", "builtin:s2_rotation"],
        vec!["restrict", "--model", "builtin:c_alpha(1,-2)", "--matrix", "1;1", "--output", &saved_str],
    ];
    let mut seen = BTreeSet::new();
    for args in &runs {
        let (code, v) = cartan_json(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["command"], args[0]);
        seen.insert(args[0]);
    }
    assert_eq!(seen, SUBCOMMANDS.iter().copied().collect());
    let (code, v) = cartan_json(&["cohomology", "--model", &saved_str]);
    assert_eq!(code, 0);
    assert_eq!(v["torus_rank"], 1);
}

#[test]
fn gysin_results_match_hand_computation() {
    let (_, v) = cartan_json(&["gysin", "--model", "builtin:s2_rotation", "--map", "inclusion:N"]);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["gysin"], serde_json::json!([["1/2*u"], ["1/2"]]));
    assert_eq!(v["adjunction_zero"], true);
    assert_eq!(v["projection_formula"]["all_zero"], true);
}

#[test]
fn torsion_target_gysin_is_refused() {
    let (code, v) = cartan_json(&["gysin", "--model", "builtin:circle_free", "--map", "identity"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "refused_torsion_target");
    assert!(v.get("gysin").is_none());
}

#[test]
fn thom_obstruction_is_reported() {
    let (code, v) = cartan_json(&["thom", "--model", "builtin:obstruction_pair", "--cocycle", "a=1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "obstructed");
    assert_eq!(v["obstruction_degree"], -1);
}

#[test]
fn degenerate_duality_exits_two() {
    let (code, v) = cartan_json(&["duality", "--model", "builtin:circle_free"]);
    assert_eq!(v["is_torsion"], true);
    assert_eq!(code, if v["perfect"] == true { 0 } else { 2 });
}

#[test]
fn lefschetz_of_identity_is_euler_characteristic() {
    let (_, v) = cartan_json(&["lefschetz", "--model", "builtin:s2_rotation"]);
    assert_eq!(v["lefschetz_number"], "2");
    let (code, _, err) =
        cartan(&["lefschetz", "--model", &workspace_file("models/s2_rotation.json"), "--map", "const_s2_rotation"]);
    assert_eq!(code, 1);
    assert!(err.contains("not a self-map"));
}

#[test]
fn binary_exit_status_and_streams() {
    let bin = env!("CARGO_BIN_EXE_cartan");
    let out = std::process::Command::new(bin)
        .args(["validate", "--model", &workspace_file("fixtures/broken.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness a"));
    let out = std::process::Command::new(bin).args(["cohomology", "--model", "builtin:nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}
