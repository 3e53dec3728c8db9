use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_causal-modes");

const SCENARIO: &str = r#"
name = "small"
axes = [{ kind = "periodic", length = 10.0 }]

[options]
cutoff = 200

[detectors.a]
center = [0.0]
t_on = 0.0
t_off = 0.0

[detectors.b]
center = [5.0]
t_on = 0.0
t_off = 0.0

[sweep]
variable = "dt"
grid = { start = 0.5, stop = 8.0, count = 16 }

[[outputs]]
column = "E"
quantity = "estimator"
overrides = { include_zero_mode = false }

[[outputs]]
column = "C"
quantity = "commutator"
"#;

fn run(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CAUSAL_MODES_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("out");
    let o = run(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("small_E.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("dt,re,im,abs,modes_summed,error_estimate"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(first[0], 0.5);
    assert!((first[3] - 0.05).abs() < 1e-6);
    assert_eq!(csv.lines().count(), 17);
    assert!(out.join("small_C.csv").exists());
    assert!(out.join("small.resolved.json").exists());
}

#[test]
fn resolved_sidecar_reproduces_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let (first, second) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&["run", &cfg, "--out", first.to_str().unwrap()], &[]).status.success());
    let sidecar = first.join("small.resolved.json");
    let o = run(&["run", sidecar.to_str().unwrap(), "--out", second.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["small_E.csv", "small_C.csv", "small.resolved.json"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("env_out");
    let o = run(&["run", &cfg], &[("CAUSAL_MODES_OUT", &out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("small_E.csv").exists());
}

#[test]
fn thread_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (one, four) = (dir.path().join("1"), dir.path().join("4"));
    for (t, d) in [("1", &one), ("4", &four)] {
        let o = run(&["figure", "fig5a", "--threads", t, "--out", d.to_str().unwrap()], &[]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["fig5a_full.csv", "fig5a_osc.csv"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(four.join(f)).unwrap());
    }
}

#[test]
fn flags_override_scenario_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("o");
    let o = run(
        &["run", &cfg, "--out", out.to_str().unwrap(), "--include-zero-mode", "true", "--cutoff", "7", "--epsilon", "1e-4"],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("small.resolved.json")).unwrap()).unwrap();
    assert_eq!(json["options"]["cutoff"], serde_json::json!([7]));
    assert_eq!(json["options"]["epsilon"], serde_json::json!(1e-4));
    assert!(json["outputs"][0].get("overrides").is_none());
    // with the zero mode back on, the spacelike estimator is O(ε)
    let csv = fs::read_to_string(out.join("small_E.csv")).unwrap();
    let abs: f64 = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(abs < 1e-4, "{abs}");
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SCENARIO.replace("length = 10.0", ""), "axes[0].length"),
        (SCENARIO.replace("length = 10.0", "length = -1.0"), "axes[0].length"),
        (SCENARIO.replace("count = 16", "count = 0"), "sweep.grid"),
        (SCENARIO.replace("center = [5.0]", "center = [5.0, 1.0]"), "detectors.b"),
        (SCENARIO.replace("column = \"C\"", "column = \"E\""), "outputs[1].column"),
        (SCENARIO.replace("quantity = \"commutator\"", "quantity = \"signal_block_norm\""), "outputs[1].quantity"),
        (SCENARIO.replace("variable = \"dt\"", "variable = \"speed\""), "variable"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), text);
        let o = run(&["run", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "case {i}: {}", stderr(&o));
    }
    let o = run(&["figure", "fig9"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overlapping_detectors_exit_3_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let text = SCENARIO.replace("center = [5.0]", "center = [0.2]").replace("sigma", "");
    let text = text.replace("center = [0.0]\nt_on", "center = [0.0]\nsigma = 1.0\nt_on");
    let cfg = write(dir.path(), "ov.toml", &text);
    let out = dir.path().join("o");
    let o = run(&["run", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("\"E\""), "{}", stderr(&o));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn list_figures_and_selftest() {
    let o = run(&["list-figures"], &[]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.starts_with("fig1a"));
    let o = run(&["selftest"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.starts_with("PASS")));
}
