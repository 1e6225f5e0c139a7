use std::path::Path;
use std::process::{Command, Output};

fn ssforms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssforms")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classset_cache_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let first = ssforms(&["classset", "--p", "11", "--N", "3", "--cache-dir", path(&cache), "--out", path(&a)]);
    assert!(first.status.success());
    assert!(stdout(&first).contains("2400 points"));
    assert!(stdout(&first).contains("cache: Miss"));
    let second = ssforms(&["classset", "--p", "11", "--N", "3", "--cache-dir", path(&cache), "--out", path(&b)]);
    assert!(stdout(&second).contains("cache: Hit"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn invalid_configuration_is_rejected() {
    let o = ssforms(&["classset", "--p", "4", "--N", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));
    assert_eq!(ssforms(&["brandt", "--ell", "11"]).status.code(), Some(2));
    assert_eq!(ssforms(&["brandt", "--N", "2"]).status.code(), Some(2));
}

#[test]
fn eigensystem_table_is_stable_and_contains_eisenstein() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = |out: &Path| vec!["eigensystems".to_string(), "--weights".into(), "0..12".into(), "--jobs".into(), "3".into(), "--out".into(), path(out).into()];
    for out in [&a, &b] {
        let o = Command::new(env!("CARGO_BIN_EXE_ssforms")).args(args(out)).output().unwrap();
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let trivial = &v["rows"][0];
    assert_eq!(trivial["kappa"], 0);
    // a_l = l + 1 mod 11 for l = 2, 5, 7, 13
    let eis = serde_json::json!({ "2": "[3,0]", "5": "[6,0]", "7": "[8,0]", "13": "[3,0]" });
    assert!(trivial["systems"].as_array().unwrap().iter().any(|s| s["values"] == eis));
}

#[test]
fn brandt_operators_have_the_weight_space_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = ssforms(&["brandt", "--ell", "2,5", "--weights", "0,7", "--out", path(&out)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let ops = v["operators"].as_array().unwrap();
    assert_eq!(ops.len(), 4);
    assert!(ops.iter().all(|op| op["dim"] == 20 && op["matrix"].as_array().unwrap().len() == 20));
}

#[test]
fn verify_recovers_from_a_corrupted_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let report = dir.path().join("report.json");
    let o = ssforms(&["verify", "--cache-dir", path(&cache), "--out", path(&report)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let cached = cache.join("classset-p11-n3.json");
    let mut body = std::fs::read_to_string(&cached).unwrap();
    body.push(' ');
    std::fs::write(&cached, body).unwrap();
    let o = ssforms(&["verify", "--cache-dir", path(&cache)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cache Recomputed"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad checksum"));
}

#[test]
fn verify_second_configuration() {
    let o = ssforms(&["verify", "--p", "13", "--N", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "p = 13\nN = 4\njobs = 2\n").unwrap();
    let o = ssforms(&["classset", "--config", path(&cfg)]);
    assert!(stdout(&o).contains("p=13 N=4: 8064 points"));
    let o = ssforms(&["classset", "--config", path(&cfg), "--p", "17", "--N", "3"]);
    assert!(stdout(&o).contains("p=17 N=3: 9216 points"));
    std::fs::write(&cfg, "prime = 13\n").unwrap();
    assert_eq!(ssforms(&["classset", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn sampled_checks_pass() {
    let o = ssforms(&["dieudonne-check", "--p", "5", "--samples", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 12);
    let o = ssforms(&["gu-gsp-check", "--samples", "20", "--fields", "3,7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("PASS").count(), 6);
}
