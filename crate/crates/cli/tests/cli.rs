use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn mosva(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosva"))
        .args(args)
        .current_dir(dir)
        .env_remove("MOSVA_REPORT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn heisenberg(dir: &Path, cutoff: &str, extra: &[&str]) -> PathBuf {
    let name = format!("h{cutoff}{}.mosva", extra.join("").replace('/', "_"));
    let mut args = vec!["example", "heisenberg", "--cutoff", cutoff, "-o", &name];
    args.extend_from_slice(extra);
    let o = mosva(dir, &args);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    dir.join(name)
}

#[test]
fn example_then_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let h = heisenberg(dir.path(), "4", &[]);
    let o = mosva(dir.path(), &["check", h.to_str().unwrap(), "--suite", "all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("=> pass"));

    assert_eq!(code(&mosva(dir.path(), &["example", "matrix", "-o", "m.mosva"])), 0);
    for suite in ["structural", "vacuum", "D", "grading", "assoc", "mobius", "all"] {
        let o = mosva(dir.path(), &["check", "m.mosva", "--suite", suite]);
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
    }
}

#[test]
fn scaled_entry_is_a_verified_failure() {
    let dir = tempfile::tempdir().unwrap();
    let h = heisenberg(dir.path(), "4", &[]);
    let text = fs::read_to_string(&h).unwrap();
    let needle = "\"u\": \"a-1\",\n        \"v\": \"a-1\",\n        \"n\": 1,\n        \"result\": [\n          [\n            \"1\",\n            \"1\"";
    assert!(text.contains(needle));
    let scaled = format!("{}\"2\"", needle.strip_suffix("\"1\"").unwrap());
    let bad = text.replacen(needle, &scaled, 1);
    assert_ne!(bad, text);
    fs::write(dir.path().join("bad.mosva"), bad).unwrap();
    let o = mosva(dir.path(), &["check", "bad.mosva", "--suite", "all"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL]"));
    let o = mosva(dir.path(), &["check", "bad.mosva", "--suite", "structural"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&mosva(dir.path(), &["example", "matrix", "-o", "m.mosva"])), 0);
    let text = fs::read_to_string(dir.path().join("m.mosva")).unwrap();
    fs::write(dir.path().join("x.mosva"), text.replacen("\"metadata\"", "\"extra\": 1,\n  \"metadata\"", 1)).unwrap();
    let o = mosva(dir.path(), &["check", "x.mosva", "--suite", "all"]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("unknown field `extra`") && err.contains("line 3"), "{err}");
    fs::write(dir.path().join("z.mosva"), text.replacen("\"1\"", "\"1/0\"", 1)).unwrap();
    assert_eq!(code(&mosva(dir.path(), &["check", "z.mosva", "--suite", "all"])), 3);
    assert_eq!(code(&mosva(dir.path(), &["check", "m.mosva", "--suite", "nope"])), 3);
    assert_eq!(code(&mosva(dir.path(), &["check", "missing.mosva", "--suite", "all"])), 3);
    assert_eq!(code(&mosva(dir.path(), &["example", "matrix", "--cutoff", "3", "-o", "q.mosva"])), 3);
    assert_eq!(code(&mosva(dir.path(), &["frobnicate"])), 3);
    assert_eq!(code(&mosva(dir.path(), &["--help"])), 0);
}

#[test]
fn correlators_and_windows() {
    let dir = tempfile::tempdir().unwrap();
    let h = heisenberg(dir.path(), "6", &["--level", "3/2"]);
    let f = h.to_str().unwrap();
    let corr = |extra: &[&str]| {
        let mut a = vec!["--report", "machine"];
        a.extend_from_slice(extra);
        a.extend_from_slice(&[f, "--bra", "1", "--ops", "a-1@z1,a-1@z2", "--ket", "1"]);
        mosva(dir.path(), &a)
    };
    let o = corr(&["reconstruct"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["details"]["function"], "(3/2) / ((z1-z2)^2)");
    assert_eq!(v["details"]["degree"], 0);

    let o = corr(&["correlate", "--mode", "iterate"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["details"]["variables"][0], "z1-z2");
    assert_eq!(v["details"]["terms"][0]["coefficient"], "3/2");

    assert_eq!(code(&corr(&["regions"])), 0);
    let o = corr(&["correlate", "--mode", "product", "--order", "9"]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exit_code"], 2);

    let short = heisenberg(dir.path(), "3", &[]);
    let o = mosva(
        dir.path(),
        &["regions", short.to_str().unwrap(), "--bra", "a-1", "--ops", "a-1@z1,a-1@z2", "--ket", "a-1"],
    );
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let o = mosva(dir.path(), &["correlate", f, "--bra", "1", "--ops", "a-1", "--ket", "1", "--mode", "product"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn constructions_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let h = heisenberg(d, "4", &[]);
    assert_eq!(code(&mosva(d, &["oppose", h.to_str().unwrap(), "-o", "op.mosva"])), 0);
    assert_eq!(code(&mosva(d, &["oppose", "op.mosva", "-o", "opop.mosva"])), 0);
    assert_eq!(fs::read(&h).unwrap(), fs::read(d.join("opop.mosva")).unwrap());

    let fock = heisenberg(d, "4", &["--module", "left"]);
    let f = fock.to_str().unwrap();
    assert_eq!(code(&mosva(d, &["transport", f, "--direction", "left_to_right_op", "-o", "r.mosva"])), 0);
    assert_eq!(code(&mosva(d, &["transport", "r.mosva", "--direction", "right_op_to_left", "-o", "l.mosva"])), 0);
    assert_eq!(fs::read(&fock).unwrap(), fs::read(d.join("l.mosva")).unwrap());
    assert_eq!(code(&mosva(d, &["transport", h.to_str().unwrap(), "--direction", "left_to_right_op", "-o", "n.mosva"])), 3);
}

#[test]
fn contragredient_certificate_gate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let fock = heisenberg(d, "4", &["--module", "left"]);
    let o = mosva(d, &["contragredient", fock.to_str().unwrap(), "-o", "dual.mosva", "--verify", "--region-weight", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let text = fs::read_to_string(&fock).unwrap().replace("\"grading_restricted\": true", "\"grading_restricted\": false");
    fs::write(d.join("u.mosva"), text).unwrap();
    let o = mosva(d, &["contragredient", "u.mosva", "-o", "ud.mosva"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificate"));
    let o = mosva(d, &["audit", "u.mosva", "-o", "cert.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("constant C = 0"));
    let o = mosva(d, &["contragredient", "u.mosva", "-o", "ud.mosva", "--allow-unrestricted-with-certificate", "cert.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn report_dir_receives_machine_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&mosva(d, &["example", "matrix", "-o", "m.mosva"])), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_mosva"))
        .args(["--report", "machine", "check", "m.mosva", "--suite", "vacuum"])
        .current_dir(d)
        .env("MOSVA_REPORT_DIR", d.join("reports"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("reports/check-report.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["report"]["obligations"][0]["name"], "Y_V identity property");
}
