use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cybermob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cybermob")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn simulated_epr_log_recovers_mu() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let out = tmp.path().join("explore");
    let status = cybermob(&["simulate", "--model", "epr", "--users", "500", "--steps", "1000", "--seed", "5", "--out", path(&sim)]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let events = sim.join("events.jsonl");
    let status = cybermob(&["explore", "--input", path(&events), "--horizon", "1000", "--out", path(&out)]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let fit = fs::read_to_string(out.join("mu_fit.csv")).unwrap();
    let mu: f64 = fit.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((mu - 0.4).abs() < 0.05, "mu = {mu}");
    assert_eq!(read_manifest(&out)["inputs"][0]["bytes"], fs::metadata(&events).unwrap().len());
}

#[test]
fn empty_input_fails_with_manifest_error() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("empty.jsonl");
    fs::write(&input, "").unwrap();
    let out = tmp.path().join("out");
    let result = cybermob(&["all", "--input", path(&input), "--out", path(&out)]);
    assert_eq!(result.status.code(), Some(1));
    let stderr: serde_json::Value = serde_json::from_slice(&result.stderr).unwrap();
    assert_eq!(stderr["error"]["kind"], "runtime");
    assert_eq!(read_manifest(&out)["error"]["kind"], "runtime");
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(cybermob(&["explore", "--bogus"]).status.code(), Some(2));
    let missing = tmp.path().join("missing.jsonl");
    assert_eq!(cybermob(&["explore", "--input", path(&missing), "--out", path(&out)]).status.code(), Some(2));
    let bad = cybermob(&["simulate", "--model", "epr", "--rho", "-1", "--out", path(&out)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn strict_mode_rejects_malformed_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("log.jsonl");
    fs::write(&input, "{\"author\":\"a\",\"subreddit\":\"x\",\"created_utc\":1}\nnot json\n").unwrap();
    let lenient = tmp.path().join("lenient");
    assert!(cybermob(&["clean", "--input", path(&input), "--out", path(&lenient)]).status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(lenient.join("cleaning_report.json")).unwrap()).unwrap();
    assert_eq!(report["malformed_lines"], 1);

    let strict = tmp.path().join("strict");
    let result = cybermob(&["clean", "--strict", "--input", path(&input), "--out", path(&strict)]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(cybermob(&["simulate", "--model", "epr", "--users", "20", "--steps", "200", "--out", path(&sim)]).status.success());
    let conf = tmp.path().join("run.conf");
    fs::write(&conf, "# defaults\nhorizon = 50\nfit_min = 2\n").unwrap();
    let out = tmp.path().join("out");
    let events = sim.join("events.jsonl");
    let args = ["--config", path(&conf), "explore", "--input", path(&events), "--horizon", "80", "--out", path(&out)];
    assert!(cybermob(&args).status.success());
    let curve = fs::read_to_string(out.join("exploration.csv")).unwrap();
    assert_eq!(curve.lines().count(), 81);
    let fit = fs::read_to_string(out.join("mu_fit.csv")).unwrap();
    assert!(fit.lines().nth(1).unwrap().ends_with(",2,80,79"), "{fit}");
}

#[test]
fn overlays_are_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(cybermob(&["overlays", "--out", path(&a)]).status.success());
    assert!(cybermob(&["overlays", "--out", path(&b)]).status.success());
    for name in ["reference_constants.csv", "reference_hourly_landmarks.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let constants = fs::read_to_string(a.join("reference_constants.csv")).unwrap();
    assert!(constants.contains("mu,0.6,0.02"));
    assert!(constants.contains("zeta,1.2,0.1"));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let status = cybermob(&["simulate", "--model", "cohorts", "--users", "90", "--seed", "4", "--out", path(&sim)]);
    assert!(status.status.success());
    let events = sim.join("events.jsonl");
    let mut dirs = Vec::new();
    for threads in ["1", "2"] {
        let out = tmp.path().join(format!("t{threads}"));
        let args = ["--threads", threads, "randomness", "--min-visits", "100", "--input", path(&events), "--out", path(&out)];
        assert!(cybermob(&args).status.success());
        dirs.push(out);
    }
    for name in ["randomness.csv", "entropy_ccdf.csv", "max_frq_ccdf.csv", "randomness_summary.json"] {
        assert_eq!(fs::read(dirs[0].join(name)).unwrap(), fs::read(dirs[1].join(name)).unwrap(), "{name}");
    }
}

#[test]
fn manifest_digests_match_inputs() {
    use sha2::{Digest, Sha256};
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    assert!(cybermob(&["simulate", "--model", "zipf", "--users", "30", "--visits", "200", "--s", "5", "--out", path(&sim)]).status.success());
    let events = sim.join("events.jsonl");
    let out = tmp.path().join("out");
    assert!(cybermob(&["dist", "--input", path(&events), "--out", path(&out)]).status.success());
    let manifest = read_manifest(&out);
    let expected = hex::encode(Sha256::digest(fs::read(&events).unwrap()));
    assert_eq!(manifest["inputs"][0]["sha256"], expected);
    assert_eq!(manifest["command"], "dist");
    assert_eq!(manifest["config"]["command"]["dist"]["input"]["input"][0], path(&events));
}
