use std::path::Path;
use std::process::Command;

fn rwre(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rwre")).args(args).output().expect("run rwre")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn manifest_without_timestamps(dir: &Path) -> serde_json::Value {
    let mut m: serde_json::Value = serde_json::from_str(&read(&dir.join("manifest.json"))).unwrap();
    for f in rwre::experiment::TIMESTAMP_FIELDS {
        m.as_object_mut().unwrap().remove(f);
    }
    m
}

#[test]
fn sinks_row_count_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = rwre(&["sinks", "--out", out.to_str().unwrap(), "--seeds", "30", "--sizes", "16,32", "--law", "axis-choice"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&out.join("sinks.csv")).lines().count(), 61);
    assert_eq!(read(&out.join("sinks_summary.csv")).lines().count(), 3);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# harnack on srw\nlaw = srw\nradii = 3\nseeds = 4\n").unwrap();
    let out = dir.path().join("o");
    let o = rwre(&["harnack", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seeds", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out.join("harnack.csv"));
    assert_eq!(text.lines().next(), Some("law,seed,R,ratio,classical_ref,zero_inf_frac"));
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.starts_with("srw,")));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = rwre(&["sinks", "--out", out.to_str().unwrap(), "--sizes", "-4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`sizes`"));
    let o = rwre(&["no-such-kind"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn partial_failure_exits_two_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = rwre(&["abp-check", "--out", out.to_str().unwrap(), "--sizes", "4,10", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest_without_timestamps(&out);
    let status: Vec<&str> = m["tasks"].as_array().unwrap().iter().map(|t| t["status"].as_str().unwrap()).collect();
    assert_eq!(status[1], "ok");
    assert_ne!(status[0], "ok");
    assert_eq!(read(&out.join("abp.csv")).lines().count(), 2);
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["1", "4"]
        .iter()
        .map(|j| {
            let out = dir.path().join(format!("j{j}"));
            let o = rwre(&[
                "holes", "--out", out.to_str().unwrap(), "--jobs", j, "--seed", "7", "--seeds", "6", "--sizes", "24,32",
            ]);
            assert_eq!(o.status.code(), Some(0));
            out
        })
        .collect();
    assert_eq!(read(&runs[0].join("holes.csv")), read(&runs[1].join("holes.csv")));
    assert_eq!(manifest_without_timestamps(&runs[0]), manifest_without_timestamps(&runs[1]));
}
