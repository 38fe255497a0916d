use std::path::PathBuf;
use std::process::{Command, Output};

fn dbpf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbpf")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join("dbpf-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn presets_lists_every_experiment() {
    let o = dbpf(&["presets"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in [
        "accuracy_time",
        "accuracy_space",
        "energy_stability",
        "algebraic_consistency",
        "volume_conservation",
        "neumann_angle",
        "liquid_lens",
        "two_droplets",
    ] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn bad_config_exits_2_and_names_the_key() {
    let d = scratch("bad");
    let cfg = d.join("bad.cfg");
    std::fs::write(&cfg, "[scheme]\ntau = -0.1\n").unwrap();
    let o = dbpf(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));

    let o = dbpf(&["run", "--preset", "no_such_thing"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_gamma_reports_json() {
    let o = dbpf(&["check-gamma", "--sigma", "1,2,2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mechanic"]["pass"], true);
    assert_eq!(v["algebraic"]["pass"], true);

    let o = dbpf(&["check-gamma", "--sigma", "1,0,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_run_writes_artifacts_then_angles_reads_them() {
    let d = scratch("run");
    let cfg = d.join("lens.cfg");
    std::fs::write(
        &cfg,
        "[experiment]\npreset = liquid_lens\n[grid]\nn = 33\n[model]\nepsilon = 0.06\nm = 1e-3\n\
         [scheme]\ntau = 0.01\nA = 1000\nB = 1000\n[run]\nt_end = 0.05\ncadence = 1\n",
    )
    .unwrap();
    let out = d.join("out");
    let o = dbpf(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--assert"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS"));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    let snaps: Vec<PathBuf> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "snap"))
        .collect();
    assert_eq!(snaps.len(), 1);
    let csv = std::fs::read_to_string(snaps[0].with_extension("csv")).unwrap();
    assert!(csv.starts_with("t,W,V1,V2,V3,"));
    assert_eq!(csv.lines().count(), 1 + 6);

    let o = dbpf(&["angles", snaps[0].to_str().unwrap(), "--epsilon", "0.06", "--sigma", "1,1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("theta23"));
}

#[test]
fn angles_rejects_a_non_snapshot() {
    let d = scratch("nosnap");
    let f = d.join("x.snap");
    std::fs::write(&f, "hello\n").unwrap();
    let o = dbpf(&["angles", f.to_str().unwrap(), "--epsilon", "0.02"]);
    assert_eq!(o.status.code(), Some(2));
}
