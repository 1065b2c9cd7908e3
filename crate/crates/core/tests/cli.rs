use std::process::Command;

fn secmet() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_secmet"));
    c.env_remove("SECMET_SEED").env_remove("SECMET_THREADS");
    c
}

const PASSIVE: &str = r#"{
  "name": "passive",
  "scenario": "single_party",
  "params": { "nu": 10 },
  "trials": 20,
  "seed": 3
}"#;

const INJECTOR: &str = r#"{
  "name": "probe injection",
  "scenario": "single_party",
  "params": { "nu": 10 },
  "adversary": { "tag": "probe_injector", "extra": 1 },
  "trials": 20,
  "tolerances": { "sigma": 4.0 }
}"#;

#[test]
fn run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("passive.json");
    std::fs::write(&config, PASSIVE).unwrap();
    let out = dir.path().join("report.json");
    let status = secmet().arg("run").arg(&config).arg("--output").arg(&out).status().unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 3);
}

#[test]
fn env_seed_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("passive.json");
    std::fs::write(&config, PASSIVE).unwrap();
    let out = secmet().arg("run").arg(&config).arg("--format").arg("json").env("SECMET_SEED", "99").output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 99);
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("guess.json");
    std::fs::write(&config, r#"{"scenario":"two_party","params":{"k":1,"nu":3},"adversary":{"tag":"basis_guess"},"trials":300}"#).unwrap();
    let run = |threads: &str| secmet().arg("run").arg(&config).arg("--format").arg("json").env("SECMET_THREADS", threads).output().unwrap().stdout;
    assert_eq!(run("1"), run("3"));
}

#[test]
fn sweep_fails_when_any_verdict_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.json"), PASSIVE).unwrap();
    let status = secmet().arg("sweep").arg(dir.path()).status().unwrap();
    assert!(status.success());
    // an injector is caught every run, which matches its prediction; a
    // config whose scenario contradicts k = 0 is an error
    std::fs::write(dir.path().join("b.json"), INJECTOR).unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"scenario":"two_party","trials":1}"#).unwrap();
    let out = secmet().arg("sweep").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("b.json: PASS"), "{text}");
    assert!(text.contains("c.json: ERROR"), "{text}");
}

#[test]
fn emit_plots_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = secmet().arg("emit-plots").arg("--dir").arg(dir.path()).status().unwrap();
    assert!(status.success());
    for name in secure_metrology::harness::PLOT_FILES {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().count() > 3, "{name}");
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = secure_metrology::harness::ExperimentConfig::from_file(&path).unwrap();
        config.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}
