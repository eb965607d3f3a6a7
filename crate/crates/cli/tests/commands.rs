use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxprob")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn check_exit_codes() {
    let ok = run(&["check", &path("cm_two_state.json")]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("[PASS] classical.f_conditioning"));

    let light = run(&["check", &path("mass_point_nine.json")]);
    assert_eq!(light.status.code(), Some(1));
    assert!(stdout(&light).contains("[FAIL] kolmogorov.total_mass"));

    let bad = run(&["check", &path("unknown_property.json")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("at procedures[0].measures: unknown property `G`"), "{}", stderr(&bad));
}

#[test]
fn syntax_error_reports_line_and_column() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{\n  \"format\": 1,\n  \"entity\": {{\"properties\": [\"E\"] \"states\": []}}\n}}").unwrap();
    let out = run(&["check", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3, column 34"), "{}", stderr(&out));
}

#[test]
fn missing_file_and_bad_usage_exit_two() {
    assert_eq!(run(&["check", "/nonexistent/model.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["demo-born", "--theta", "quarter"]).status.code(), Some(2));
    assert_eq!(run(&["demo-born", "--theta", "4"]).status.code(), Some(2));
    assert_eq!(run(&["demo-born", "--segments", "0"]).status.code(), Some(2));
}

#[test]
fn eval_self_conditioning_and_band_mean() {
    let out = run(&["eval", &path("bayes_two_context.json"), "state(S)", "state(S)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("1 [case iv"), "{}", stdout(&out));

    let out = run(&["eval", &path("band_qubit.json"), "prop(up,c1)", "state(S_halfpi)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let value: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 0.5).abs() <= 1e-3, "{text}");
    assert!(text.contains("case ii") && text.contains("procedure M"));
}

#[test]
fn eval_rejects_mixed_atoms_and_unknown_procedures() {
    let file = path("bayes_two_context.json");
    let out = run(&["eval", &file, "prop(E,c1)&state(S)", "state(S)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("mixes state atoms with property atoms"), "{}", stderr(&out));

    let out = run(&["eval", &file, "prop(E,c1)", "state(S)", "--procedure", "N"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", &file, "prop(E,c1", "state(S)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position 9"));
}

#[test]
fn eval_with_explicit_procedure() {
    let out = run(&["eval", &path("bayes_two_context.json"), "prop(E,c1)", "state(S)", "--procedure", "M"]);
    assert_eq!(out.status.code(), Some(0));
    let value: f64 = stdout(&out).split_whitespace().next().unwrap().parse().unwrap();
    // E holds at c1 with weight 0.5 and at c2 with weight 0.9
    assert!((value - 0.7).abs() < 1e-12);
}

#[test]
fn demo_born_tables() {
    let out = run(&["demo-born", "--theta", "0,pi/2", "--segments", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("1.000000000  1.000000000      0.000e0"), "{text}");
    assert!(rows[1].contains("0.500000000  0.500000000"), "{text}");

    let coarse = run(&["demo-born", "--theta", "pi/3", "--segments", "10"]);
    assert_eq!(coarse.status.code(), Some(0));
    assert!(stdout(&coarse).contains("1.000e-1"));
}

#[test]
fn lattice_command_reports_the_mo2_failure() {
    let out = run(&["lattice", &path("mo2_measure.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("[FAIL] lattice.gpm"));
    assert!(text.contains("(a, a_perp) joins to U"));
    assert_eq!(run(&["lattice", &path("qubit_conditioning.json")]).status.code(), Some(0));
}

#[test]
fn json_reports_are_byte_identical_across_runs_and_schedulers() {
    for name in ["cm_two_state.json", "qubit_conditioning.json", "mo2_measure.json", "chained_compatibility.json"] {
        let file = path(name);
        let first = run(&["report", &file, "--format", "json"]);
        let second = run(&["report", &file, "--format", "json"]);
        let sequential = run(&["--sequential", "report", &file, "--format", "json"]);
        assert_eq!(first.stdout, second.stdout, "{name}");
        assert_eq!(first.stdout, sequential.stdout, "{name}");
        let doc: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
        assert_eq!(doc["passed"].as_bool(), Some(first.status.code() == Some(0)));
        assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["name"].is_string() && c["status"].is_string()));
    }
}

#[test]
fn skipped_checks_carry_reasons() {
    let out = run(&["report", &path("qubit_conditioning.json"), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let skipped: Vec<_> = doc["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "skipped").collect();
    assert!(!skipped.is_empty());
    assert!(skipped.iter().all(|c| c["reason"].as_str().is_some_and(|r| !r.is_empty())));
}
