//! Job files under `jobs/` run end to end through the library.

use std::fs;
use std::path::{Path, PathBuf};

use gsrep::cache::IrrepCache;
use gsrep::job::{run, Command, JobSpec, Report};

fn job_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs").join(name)
}

fn load(name: &str) -> JobSpec {
    let spec = JobSpec::from_json(&fs::read_to_string(job_file(name)).unwrap()).unwrap();
    spec.validate().unwrap();
    spec
}

fn verdicts(r: &Report, expected: &[(&str, bool)]) {
    for (key, value) in expected {
        assert_eq!(r.value(key), Some(*value), "verdict {key}");
    }
}

#[test]
fn analyze_defining_representation() {
    let r = run(&load("analyze_u3.json"), None).unwrap();
    verdicts(
        &r,
        &[("ground_state", true), ("strict", true), ("pi0_irreducible", true), ("spectral_translation", true)],
    );
    assert_eq!(r.tables["h0_dim"], 2);
    assert_eq!(r.tables["spectrum"], serde_json::json!([0.0, 0.0, 1.0]));
}

#[test]
fn su12_cone_without_unitarizability() {
    let r = run(&load("cone_su12.json"), None).unwrap();
    verdicts(&r, &[("cone", true), ("cone_predicate", true), ("hw_unitarizable", false)]);
}

#[test]
fn direct_limit_membership() {
    let r = run(&load("dirlim.json"), None).unwrap();
    verdicts(&r, &[("member", true), ("level_consistency", true), ("generators_agree", true)]);
}

#[test]
fn nonstrict_fixture_job() {
    let r = run(&load("nonstrict.json"), None).unwrap();
    verdicts(&r, &[("ground_state", true), ("strict", false)]);
}

#[test]
fn fock_factorization_job() {
    let r = run(&load("fock_factorization.json"), None).unwrap();
    verdicts(&r, &[("factorization", true), ("kernel_count", true)]);
    // two modes, cutoff 30: C(32, 2) states, kernel spanned by the first mode
    assert_eq!(r.tables["dim"], 496);
    assert_eq!(r.tables["kernel"]["dim"], 31);
}

#[test]
fn sweeps_report_counts() {
    for (name, key) in [
        ("sweep_classification.json", "bijection"),
        ("sweep_fock.json", "monotone"),
        ("sweep_ground_state.json", "all_pass"),
    ] {
        let r = run(&load(name), None).unwrap();
        assert_eq!(r.value(key), Some(true), "{name}");
        assert_eq!(r.tables["counts"]["failed"], 0, "{name}");
        assert!(r.tables["counts"]["cases"].as_u64().unwrap() > 0, "{name}");
    }
}

#[test]
fn reports_are_byte_stable() {
    for name in ["analyze_u3.json", "cone_su12.json", "dirlim.json", "sweep_fock.json"] {
        let job = load(name);
        let a = run(&job, None).unwrap().to_json().unwrap();
        let b = run(&job, None).unwrap().to_json().unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn cached_runs_match_uncached_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = IrrepCache::new(dir.path()).unwrap();
    let job = load("analyze_u3.json");
    let plain = run(&job, None).unwrap().to_json().unwrap();
    let cold = run(&job, Some(&cache)).unwrap().to_json().unwrap();
    let warm = run(&job, Some(&cache)).unwrap().to_json().unwrap();
    assert_eq!(plain, cold);
    assert_eq!(cold, warm);
}

#[test]
fn job_round_trips_through_json() {
    for entry in fs::read_dir(job_file("")).unwrap() {
        let path = entry.unwrap().path();
        let job = JobSpec::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        let text = serde_json::to_string(&job).unwrap();
        assert_eq!(JobSpec::from_json(&text).unwrap(), job, "{}", path.display());
    }
}

#[test]
fn report_echoes_job_and_provenance() {
    let mut job = JobSpec::new(Command::Dirlim);
    job.weight = Some(vec![0, 1]);
    job.d = Some(gsrep::job::DSpec::Coefficients(vec![2.0, 1.0]));
    job.seed = 9;
    let r = run(&job, None).unwrap();
    assert_eq!(r.value("member"), Some(false));
    assert_eq!(r.job, job);
    assert_eq!(r.provenance.seed, 9);
    assert!(r.verdicts.values().all(|v| v.tol >= 0.0));
}

#[test]
fn invalid_jobs_are_rejected() {
    assert!(JobSpec::from_json(r#"{"command": "analyze", "colour": 1}"#).is_err());
    let mut job = JobSpec::new(Command::Analyze);
    assert!(job.validate().is_err());
    job.group = Some(serde_json::from_str("\"u(2)\"").unwrap());
    job.weight = Some(vec![1, 0]);
    job.d = Some(gsrep::job::DSpec::Diagonal { diag: vec![1.0, 0.0] });
    job.tolerances.rank = -1.0;
    assert!(job.validate().is_err());
}
