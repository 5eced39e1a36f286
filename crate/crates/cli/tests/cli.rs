use std::path::Path;
use std::process::Command;

use jalg_cli::{run, Command as Cmd, RunConfig};
use serde_json::{json, Value};

fn jalg(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jalg")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, stdout) = jalg(&all);
    (code, serde_json::from_str(&stdout).unwrap_or(Value::Null))
}

fn write(dir: &Path, name: &str, v: Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.display().to_string()
}

fn cfg(formulas: &[&str]) -> RunConfig {
    RunConfig {
        formulas: formulas.iter().map(|s| s.to_string()).collect(),
        ..RunConfig::default()
    }
}

#[test]
fn check_agenda_reports() {
    let out = run(Cmd::CheckAgenda, &cfg(&["x1", "x2", "(or x1 x2)"])).unwrap();
    assert_eq!(out.report["pseudo_rich"], 2);
    assert_eq!(out.report["strictly_contingent"], json!(["x1", "x2", "(or x1 x2)"]));

    let l3 = RunConfig {
        logic: "lukasiewicz:3".into(),
        ..cfg(&["x1", "(odot x1 x1)"])
    };
    assert_eq!(run(Cmd::CheckAgenda, &l3).unwrap().report["pseudo_rich"], 1);

    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "agenda.json", json!({"signature_ref": "boolean", "formulas": []}));
    let (code, r) = report(&["check-agenda", "--agenda", &empty]);
    assert_eq!(code, 0);
    assert_eq!(r["pseudo_rich"], 0);
}

#[test]
fn verify_bijection_reports() {
    let (code, r) = report(&[
        "verify-bijection", "-n", "2", "-f", "x1", "-f", "x2", "-f", "(or x1 x2)", "-f", "(not x1)",
    ]);
    assert_eq!(code, 0);
    assert_eq!((r["homs"].clone(), r["aggregators"].clone()), (json!(2), json!(2)));
    assert_eq!(r["roundtrips"], "pass");

    let (_, r) = report(&["verify-bijection", "-n", "3", "-f", "x1", "-f", "x2", "-f", "(or x1 x2)"]);
    assert_eq!(r["homs"], 3);

    let (code, r) = report(&[
        "verify-bijection", "--logic", "lukasiewicz-degree:3", "-f", "x1", "-f", "x2", "-f", "(oplus x1 x2)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["homs"], r["aggregators"]);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["logic"], "lukasiewicz-degree:3");
}

#[test]
fn classify_majority() {
    let dir = tempfile::tempdir().unwrap();
    let table: Vec<usize> = (0..8u32).map(|c| usize::from(c.count_ones() >= 2)).collect();
    let path = write(dir.path(), "maj.json", json!({"electorate": 3, "table": table}));
    let (code, r) = report(&["classify-dictators", "--criterion", &path]);
    assert_eq!(code, 1);
    assert_eq!(r["dictator"], Value::Null);
    assert_eq!(r["ultrafilter"], false);
    assert_eq!(r["homomorphism"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());

    let dict = write(dir.path(), "dict.json", json!({"electorate": 2, "table": [0, 0, 1, 1]}));
    let (code, r) = report(&["classify-dictators", "--criterion", &dict]);
    assert_eq!(code, 0);
    assert_eq!(r["dictator"], 1);

    let (code, r) = report(&["classify-dictators", "-n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["homomorphisms"], 2);
}

#[test]
fn subjunctive_defaults() {
    let (code, r) = report(&["check-subjunctive"]);
    assert_eq!(code, 0);
    assert_eq!((r["a"].as_str(), r["b"].as_str()), (Some("pass"), Some("pass")));
    assert_eq!(r["material_b"], "fail");
}

#[test]
fn selfext_reports() {
    let (code, r) = report(&["check-selfext", "--logic", "lukasiewicz:3", "--vars", "1"]);
    assert_eq!(code, 1);
    assert_eq!(r["selfextensional"], false);
    assert_eq!(r["witness"]["connective"], "not");

    let (code, r) = report(&["check-selfext", "--logic", "lukasiewicz-degree:3", "--vars", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["selfextensional"], true);
}

#[test]
fn aggregate_profile() {
    let dir = tempfile::tempdir().unwrap();
    let maj = write(dir.path(), "maj.json", json!({"electorate": 3, "table": [0, 0, 0, 1, 0, 1, 1, 1]}));
    let profile = write(
        dir.path(),
        "profile.json",
        json!([
            {"x1": 1, "x2": 0, "(or x1 x2)": 1},
            {"x1": 0, "x2": 1, "(or x1 x2)": 1},
            {"x1": 0, "x2": 0, "(or x1 x2)": 0},
        ]),
    );
    let args = ["aggregate", "-f", "x1", "-f", "x2", "-f", "(or x1 x2)", "--criterion", &maj, "--profile", &profile];
    let (code, r) = report(&args);
    assert_eq!(code, 1);
    assert_eq!(r["output"], json!({"x1": 0, "x2": 0, "(or x1 x2)": 1}));
    assert_eq!(r["rational"], false);
    assert_eq!(r["profile_rational"], true);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let (code, _) = jalg(&[
            "verify-bijection", "-n", "2", "-f", "x1", "-f", "x2", "-f", "(or x1 x2)", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(jalg(&["check-agenda", "--logic", "nonsense", "-f", "x1"]).0, 2);
    assert_eq!(jalg(&["check-agenda", "-f", "(and x1)"]).0, 2);
    assert_eq!(jalg(&["verify-bijection"]).0, 2);
    assert_eq!(jalg(&["enumerate-homs", "--logic", "lukasiewicz:3", "-n", "3"]).0, 3);
    assert_eq!(jalg(&["verify-bijection", "-n", "3", "-f", "x1", "--budget", "10"]).0, 3);
}

#[test]
fn frame_logic() {
    let dir = tempfile::tempdir().unwrap();
    let frame = write(dir.path(), "frame.json", json!({"worlds": 2, "relation": [[0, 0], [1, 1], [0, 1]]}));
    let logic = format!("frame:{frame}");
    let (code, r) = report(&["check-agenda", "--logic", &logic, "-f", "x1", "-f", "(box x1)"]);
    assert_eq!(code, 0);
    assert_eq!(r["pseudo_rich"], 1);
}
