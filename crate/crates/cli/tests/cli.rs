use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn gsrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsrep"))
        .args(args)
        .env_remove("GSREP_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = gsrep(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn verdict(r: &Value, key: &str) -> bool {
    r["verdicts"][key]["value"].as_bool().unwrap_or_else(|| panic!("missing verdict {key}"))
}

fn load(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(root().join("schemas").join(name)).unwrap()).unwrap()
}

fn report_validator() -> jsonschema::Validator {
    let job = load("job.schema.json");
    let id = job["$id"].as_str().unwrap().to_string();
    jsonschema::options()
        .with_resource(id, jsonschema::Resource::from_contents(job).unwrap())
        .build(&load("report.schema.json"))
        .unwrap()
}

fn assert_valid(v: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> = v.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn analyze_u3_defining() {
    let r = report(&["analyze", "--group", "u(3)", "--d", "1,0,0", "--weight", "1,0,0"]);
    assert!(r["tables"]["m"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(r["tables"]["h0_dim"], 2);
    assert!(verdict(&r, "strict") && verdict(&r, "ground_state"));
    for v in r["verdicts"].as_object().unwrap().values() {
        assert!(v["tol"].is_number());
    }
}

#[test]
fn su12_cone_check() {
    let r = report(&["cone-check", "--group", "su(1,2)", "--weight", "0,1,0"]);
    assert!(verdict(&r, "cone"));
    assert!(!verdict(&r, "hw_unitarizable"));
    let r = report(&["cone-check", "--group", "su(1,2)", "--weight", "[-1,1,0]"]);
    assert!(verdict(&r, "hw_unitarizable"));
}

#[test]
fn dirlim_membership() {
    assert!(verdict(&report(&["dirlim", "--weight", "[2,1,0]", "--d", "[3,2,1]"]), "member"));
    // a false verdict still exits 0
    assert!(!verdict(&report(&["dirlim", "--weight", "[0,1]", "--d", "[2,1]"]), "member"));
}

#[test]
fn errors_are_structured() {
    let out = gsrep(&["analyze", "--group", "u(3)", "--d", "1", "--weight", "1,0,0"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "length_mismatch");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"command": "analyze", "colour": 1}"#).unwrap();
    let out = gsrep(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "schema_error");

    let out = gsrep(&["dirlim", "--weight", "[1,2]", "--d", "[1,1]"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "repeated_entries");

    let out = gsrep(&["analyze", "--group", "so(3)", "--d", "1", "--weight", "1"]);
    assert!(!out.status.success());
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("report.json");
    let args = ["cone-check", "--group", "u(3)", "--d", "1,1,0", "--weight", "2,1,0", "--seed", "5"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--output", a.to_str().unwrap()]);
        let out = gsrep(&full);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        runs.push(fs::read(&a).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let r: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(r["provenance"]["seed"], 5);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gsrep"))
            .args(["analyze", "--group", "su(3)", "--d", "1,0,-1", "--weight", "2,1,0"])
            .env("GSREP_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let entries = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(entries, 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn tolerance_flag_is_recorded() {
    let r = report(&["analyze", "--group", "u(2)", "--d", "1,0", "--weight", "1,0", "--tol", "1e-7"]);
    assert_eq!(r["provenance"]["tolerances"]["rank"], 1e-7);
    assert_eq!(r["verdicts"]["strict"]["tol"], 1e-7);
}

#[test]
fn fock_residual_table() {
    let r = report(&["fock", "--modes", "1", "--cutoff", "20", "--v", "[[0.5,0]]", "--w", "[[0,0.5]]", "--cutoffs", "10,20"]);
    assert!(verdict(&r, "vacuum_coefficient"));
    assert!(verdict(&r, "monotone"));
    assert_eq!(r["tables"]["residuals"].as_array().unwrap().len(), 2);
}

#[test]
fn schemas_match_the_job_format() {
    let job = load("job.schema.json");
    let commands: Vec<&str> = job["properties"]["command"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(commands, ["analyze", "classify", "cone-check", "fock", "dirlim", "sweep"]);
    for c in &commands {
        let text = format!(r#"{{"command": "{c}"}}"#);
        let parsed: Result<gsrep::job::Command, _> = serde_json::from_value(serde_json::from_str::<Value>(&text).unwrap()["command"].clone());
        assert!(parsed.is_ok(), "{c}");
    }

    let job_validator = jsonschema::validator_for(&job).unwrap();
    let reports = report_validator();
    let mut files: Vec<PathBuf> = fs::read_dir(root().join("jobs")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty());
    for f in files {
        let spec: Value = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
        assert_valid(&job_validator, &spec);
        let name = f.file_name().unwrap().to_str().unwrap();
        if name.starts_with("sweep_ground") || name.starts_with("sweep_cone") {
            continue;
        }
        let r = report(&["run", f.to_str().unwrap()]);
        assert_valid(&reports, &r);
    }
}

#[test]
fn sweep_stores_counts() {
    let r = report(&["sweep", r#"{"kind": "classification", "group": "u(2)", "d": [-0.5, 0.7], "bound": 3}"#]);
    assert!(verdict(&r, "bijection"));
    assert_eq!(r["tables"]["counts"]["failed"], 0);
}
