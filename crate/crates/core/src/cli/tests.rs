use super::*;
use crate::criteria::Status;
use crate::error::Error;

fn degenerate_log_config() -> &'static str {
    r#"{
        "task": {
            "kind": "criteria",
            "coefficient": {"family": "degenerate_log", "center": [0.0, 0.0]},
            "z0": [0.0, 0.0]
        },
        "numeric": {"decades": 4.0}
    }"#
}

#[test]
fn negative_n_is_a_validation_error() {
    let text = r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [0.1, 0.0]}}, "numeric": {"n": -8}}"#;
    let e = RunConfig::parse(text).unwrap_err();
    assert!(matches!(e, Error::Validation(_)), "{e}");
    assert_eq!(exit_code(&e), EXIT_VALIDATION);
}

#[test]
fn config_validation() {
    for bad in [
        r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [0.1, 0.0]}}, "numeric": {"n": 15}}"#,
        r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [1.5, 0.0]}}}"#,
        r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [0.1, 0.0]}}, "numeric": {"tol": 0.0}}"#,
        r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [0.1, 0.0]}, "extra": 1}}"#,
        r#"{"task": {"kind": "criteria"}}"#,
        r#"{"task": {"kind": "dirichlet", "inner": {"datum": "constant", "value": 0.0}}}"#,
        r#"{"task": {"kind": "primeends", "domain": {"kind": "disk", "center": [0, 0], "radius": 1}}, "output": {"report": "../x.json"}}"#,
        r#"{"task": {"kind": "nonsense"}}"#,
    ] {
        assert!(matches!(RunConfig::parse(bad), Err(Error::Validation(_))), "{bad}");
    }
    let ok = RunConfig::parse(degenerate_log_config()).unwrap();
    assert_eq!(ok.numeric.n, 128);
    assert_eq!(ok.task_name(), "criteria");
}

#[test]
fn catalog_listing() {
    let all = list_catalog(None);
    assert_eq!(all, list_catalog(Some("")));
    for name in ["radial_stretch", "degenerate_log", "exponential Φ"] {
        assert!(all.iter().any(|l| l.contains(name)), "{name}");
    }
    let cats: Vec<_> = catalog().iter().map(|e| (e.category, e.name)).collect();
    let mut sorted = cats.clone();
    sorted.sort();
    assert_eq!(cats, sorted);
    assert!(list_catalog(Some("no-such-family")).is_empty());
    assert_eq!(list_catalog(Some("DOMAIN")).len(), 9);
}

#[test]
fn criteria_run_is_deterministic() {
    let cfg = RunConfig::parse(degenerate_log_config()).unwrap();
    let (a, art_a) = execute(&cfg, 0);
    let (b, _) = execute(&cfg, 0);
    assert_eq!(a.hashed.status.exit_code, EXIT_OK, "{:?}", a.hashed.status);
    assert_eq!(a.sha256, b.sha256);
    assert_eq!(serde_json::to_vec(&a.hashed).unwrap(), serde_json::to_vec(&b.hashed).unwrap());
    let res = a.hashed.results.as_ref().unwrap();
    let status = |key: &str| serde_json::from_value::<Status>(res[key]["status"].clone()).unwrap();
    assert_eq!(status("divergence"), Status::Satisfied);
    assert_eq!(res["fmo"]["status"], "finite");
    assert_eq!(art_a[0].name, "circle_norm.csv");
    assert_eq!(a.hashed.artifacts[0].1, sha256_hex(&art_a[0].bytes));
}

#[test]
fn dirichlet_run_reports_residual() {
    let text = r#"{
        "task": {"kind": "dirichlet", "datum": {"datum": "fourier", "a0": 0.0, "cos": [1.0], "sin": []}},
        "numeric": {"n": 128, "fourier_terms": 32}
    }"#;
    let cfg = RunConfig::parse(text).unwrap();
    let (r, art) = execute(&cfg, 0);
    assert_eq!(r.hashed.status.exit_code, EXIT_OK, "{:?}", r.hashed.status);
    let res = r.hashed.results.unwrap();
    assert!(res["max_boundary_residual"].as_f64().unwrap() < 1e-4, "{}", res["max_boundary_residual"]);
    assert!(art.iter().any(|a| a.name == "boundary_residual.csv"));
}

#[test]
fn solver_errors_are_reported() {
    // the ring check needs a simply connected domain
    let text = r#"{
        "task": {"kind": "modulus", "check": {"check": "ring", "map": {"map": "identity"},
                 "domain": {"kind": "annulus", "center": [0, 0], "inner": 0.1, "outer": 1.0},
                 "z0": [0.5, 0.0], "r1": 0.05, "r2": 0.2, "q": {"kind": "constant", "value": 1.0}}}
    }"#;
    let cfg = RunConfig::parse(text).unwrap();
    let (r, art) = execute(&cfg, 0);
    assert_eq!(r.hashed.status.exit_code, EXIT_SOLVER);
    assert_eq!(r.hashed.status.error.as_ref().unwrap().kind, "unsupported");
    assert!(r.hashed.results.is_none() && art.is_empty());
}

#[test]
fn run_writes_files_and_rejects_bad_configs() {
    let dir = std::env::temp_dir().join(format!("beltrami-cli-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"task": {"kind": "solve", "coefficient": {"family": "constant", "k": [0.1, 0.0]}}, "numeric": {"n": -1}}"#).unwrap();
    let out = dir.join("out-bad");
    assert_eq!(run(&bad, &out, 0, 0), EXIT_VALIDATION);
    assert!(!out.exists());

    let good = dir.join("good.json");
    std::fs::write(
        &good,
        r#"{"task": {"kind": "primeends", "domain": {"kind": "slit_disk", "x0": 0.0, "x1": 1.0}, "slit_points": [0.5]},
            "numeric": {"ends_per_side": 32}}"#,
    )
    .unwrap();
    let out = dir.join("out");
    assert_eq!(run(&good, &out, 0, 0), EXIT_OK);
    let report: Report = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let pair = &report.hashed.results.as_ref().unwrap()["slit_pairs"][0];
    assert!(pair["rho"].as_f64().unwrap() > 0.05);
    assert_eq!(pair["support_distance"].as_f64().unwrap(), 0.0);
    assert!(out.join("prime_ends.csv").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}
