//! End-to-end tests of the binary: exit codes, JSON report round-trips,
//! trace output and the polygon renderers.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_abeljac"))
}

fn write_tmp(dir: &std::path::Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("abeljac-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_exit_codes_and_flags() {
    let dir = tmpdir("verify");
    let a = write_tmp(&dir, "A.txt", "1 - y^3 - y^6/4");
    let q1 = write_tmp(&dir, "q1.txt", "y^3 + 2");
    let ok = bin()
        .args(["verify", "--A"])
        .arg(&a)
        .arg("--q1")
        .arg(&q1)
        .args(["--mu", "2,0,0,2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let report = json_of(&ok);
    assert_eq!(report["outputs"]["residual_zero"], true);
    assert_eq!(report["outputs"]["conditions"]["a_at_zero"], false);
    assert_eq!(report["outputs"]["conditions"]["a_prime_at_zero"], true);

    let bad = bin()
        .args(["verify", "--A"])
        .arg(&a)
        .arg("--q1")
        .arg(&q1)
        .args(["--mu", "1,0,0,2"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let report = json_of(&bad);
    assert_eq!(report["outputs"]["residual_zero"], false);
    assert_eq!(report["outputs"]["residual"], "-6*y^3");
}

#[test]
fn report_polynomials_reverify_to_identical_flags() {
    let dir = tmpdir("reverify");
    let a = write_tmp(&dir, "A.txt", "1 - y^3 - y^6/4");
    let q1 = write_tmp(&dir, "q1.txt", "y^3 + 2");
    let first = bin()
        .args(["verify", "--A"])
        .arg(&a)
        .arg("--q1")
        .arg(&q1)
        .args(["--mu", "2,0,0,2"])
        .output()
        .unwrap();
    let report = json_of(&first);
    // feed the canonical text from the report straight back in
    let a2 = write_tmp(&dir, "A2.txt", report["inputs"]["A"].as_str().unwrap());
    let q12 = write_tmp(&dir, "q12.txt", report["inputs"]["q1"].as_str().unwrap());
    let second = bin()
        .args(["verify", "--A"])
        .arg(&a2)
        .arg("--q1")
        .arg(&q12)
        .args(["--mu", "2,0,0,2"])
        .output()
        .unwrap();
    let report2 = json_of(&second);
    assert_eq!(report["checks"], report2["checks"]);
    assert_eq!(report["outputs"], report2["outputs"]);
}

#[test]
fn reconstruct_reports_flags_and_bracket() {
    let dir = tmpdir("reconstruct");
    let a = write_tmp(&dir, "A.txt", "-y^6/4 - y^3 - 1");
    let q1 = write_tmp(&dir, "q1.txt", "y^3 + 2");
    let out = bin()
        .args(["reconstruct", "--A"])
        .arg(&a)
        .arg("--q1")
        .arg(&q1)
        .args(["--mu", "0,0,0,2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["outputs"]["bracket"], "x^4*y + 2*x^3");
    assert_eq!(report["outputs"]["flags"]["p1_polynomial"], true);
    assert_eq!(report["outputs"]["bracket_matches_mu"], true);
}

#[test]
fn pipeline_trace_and_svg_outputs() {
    let dir = tmpdir("pipeline");
    // polynomial seed: the degree-3 member at mu3 = 2
    let a = write_tmp(&dir, "A.txt", "-y^6/4 - y^3 - 1");
    let q1 = write_tmp(&dir, "q1.txt", "y^3 + 2");
    let rec = bin()
        .args(["reconstruct", "--A"])
        .arg(&a)
        .arg("--q1")
        .arg(&q1)
        .args(["--mu", "0,0,0,2"])
        .output()
        .unwrap();
    let rec_report = json_of(&rec);
    let p = write_tmp(&dir, "P.txt", rec_report["outputs"]["P"].as_str().unwrap());
    let q = write_tmp(&dir, "Q.txt", rec_report["outputs"]["Q"].as_str().unwrap());
    let trace = dir.join("trace.json");
    let svgdir = dir.join("svgs");
    let out = bin()
        .args(["pipeline", "--P"])
        .arg(&p)
        .arg("--Q")
        .arg(&q)
        .args(["--mu", "0,0,0,2", "--map-mu", "1,0,0,2", "--j", "2", "--audit", "--trace"])
        .arg(&trace)
        .arg("--svg")
        .arg(&svgdir)
        .output()
        .unwrap();
    // audit run with known failing bracket expectations: check failure code
    assert_eq!(out.status.code(), Some(2));
    let report = json_of(&out);
    assert_eq!(report["outputs"]["report"]["degrees"], serde_json::json!([112, 80]));
    assert_eq!(report["outputs"]["report"]["bracket"], "x^4*y + 2*x^3");
    assert_eq!(report["outputs"]["report"]["in_l"], true);
    // trace re-parses and the stage checks match the failure list
    let trace_json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(trace_json["report"]["degrees"], serde_json::json!([112, 80]));
    let n_failed_in_trace = trace_json["stages"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["checks"].as_array().unwrap())
        .filter(|c| c["pass"] == false)
        .count();
    assert_eq!(
        n_failed_in_trace,
        report["checks"]["failed"].as_array().unwrap().len()
    );
    // per-stage SVGs exist for the Laurent stages
    assert!(svgdir.join("stage0-input-shape-P.svg").exists());

    // strict mode on the Laurent pair with the wrong constant halts
    let lp = write_tmp(
        &dir,
        "PL.txt",
        "x^3*y + 2*x^2*(y^3 + 1) + x*(y^5 + 2*y^2 + 2/y) + y^7/7 + y^4/2 + y^-2",
    );
    let lq = write_tmp(&dir, "QL.txt", "x^2*y + x*(y^3 + 2) + y^5/5 + y^2 + 2/y");
    let strict = bin()
        .args(["pipeline", "--P"])
        .arg(&lp)
        .arg("--Q")
        .arg(&lq)
        .args(["--mu", "1,0,0,2", "--j", "2"])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(2));
    let err = json_of(&strict);
    assert!(err["error"]["message"].as_str().unwrap().contains("lead_(1,-1)_P"));
}

#[test]
fn solve_exit_codes_and_budget() {
    let out = bin().args(["solve", "--deg", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["outputs"]["status"], "complete");
    assert_eq!(report["outputs"]["solutions"].as_array().unwrap().len(), 0);

    let restricted = bin()
        .args(["solve", "--deg", "3", "--mu1", "0", "--mu2", "0"])
        .output()
        .unwrap();
    assert_eq!(restricted.status.code(), Some(0));
    let report = json_of(&restricted);
    for s in report["outputs"]["solutions"].as_array().unwrap() {
        assert_eq!(s["mu0_zero"], true);
        assert_eq!(s["verified"], true);
    }

    let exhausted = bin().args(["solve", "--deg", "3", "--budget", "0"]).output().unwrap();
    assert_eq!(exhausted.status.code(), Some(4));

    let via_env = bin()
        .args(["solve", "--deg", "3"])
        .env("ABELJAC_BUDGET_SECS", "0")
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(4));
}

#[test]
fn polygon_renderers_are_structural() {
    let dir = tmpdir("polygon");
    // seven support dots, one labeled edge per direction
    let poly = write_tmp(
        &dir,
        "p.txt",
        "x^3*y + x^2*(2*y^3 + 2) + x*(y^5 + 2*y^2) + y^7/7 + y^4/2",
    );
    let svg = bin()
        .args(["polygon", "--poly"])
        .arg(&poly)
        .args(["--format", "svg"])
        .output()
        .unwrap();
    assert_eq!(svg.status.code(), Some(0));
    let text = String::from_utf8(svg.stdout).unwrap();
    assert_eq!(text.matches("<circle").count(), 7);
    assert_eq!(text.matches("class=\"dir-label\"").count(), 2);
    assert!(text.contains("(1,-1)") && text.contains("(2,1)"));

    let ascii = bin()
        .args(["polygon", "--poly"])
        .arg(&poly)
        .output()
        .unwrap();
    assert_eq!(ascii.status.code(), Some(0));
    let text = String::from_utf8(ascii.stdout).unwrap();
    assert_eq!(text.matches('*').count(), 7);
    assert!(text.contains("(1,-1)"));
}

#[test]
fn usage_and_parse_errors_exit_three() {
    let out = bin().args(["verify", "--A", "/nonexistent", "--q1", "/nonexistent", "--mu", "1,0,0,2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = json_of(&out);
    assert!(err["error"]["kind"].as_str().is_some());

    let dir = tmpdir("badparse");
    let bad = write_tmp(&dir, "bad.txt", "x + $");
    let out = bin()
        .args(["polygon", "--poly"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let usage = bin().args(["solve"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(3));
}
