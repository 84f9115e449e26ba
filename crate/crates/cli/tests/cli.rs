use std::path::Path;
use std::process::Command;

fn bnsharp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bnsharp"))
        .args(args)
        .output()
        .expect("spawn bnsharp")
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn without_runtime(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == "runtime_ms");
    r.records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != idx)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn converge_sweep_approaches_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = bnsharp(&[
        "converge",
        "--body",
        "cube:1",
        "--m",
        "1",
        "--op",
        "id",
        "--p",
        "2",
        "--q",
        "inf",
        "--a",
        "1:100:25:geom",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 25);
    let last: f64 = rows[24][6].parse().unwrap();
    let limit = 1.0 / std::f64::consts::PI.sqrt();
    assert!((last - limit).abs() / limit < 0.02, "{last}");

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("conv.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["rows"], 25);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let reference = manifest["reference"]["value"].as_f64().unwrap();
    assert!((reference - limit).abs() < 1e-12);
}

#[test]
fn levitan_check_has_nonnegative_slack() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lev.csv");
    let o = bnsharp(&[
        "levitan-check",
        "--body",
        "cube:1",
        "--m",
        "1",
        "--p",
        "2",
        "--a",
        "2,4,8",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert!(!rows.is_empty());
    for r in &rows {
        let slack: f64 = r[4].parse().unwrap();
        assert!(slack >= 0.0, "{r:?}");
    }
}

#[test]
fn empty_sweep_is_usage_error() {
    let o = bnsharp(&["constant", "--a", ""]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("position 0"), "{err}");
}

#[test]
fn bad_operator_reports_position() {
    let o = bnsharp(&["constant", "--m", "2", "--op", "2,0:1,0 + 0,1:1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 10"));
}

#[test]
fn numeric_failure_is_json_record() {
    let o = bnsharp(&[
        "candidates",
        "--body",
        "ball:1",
        "--m",
        "4",
        "--op",
        "id",
        "--function",
        "cs",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["message"].as_str().unwrap().contains('4'), "{v}");
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bnsharp(&[
            "optimize",
            "--body",
            "cube:1",
            "--m",
            "1",
            "--op",
            "1:1,0",
            "--p",
            "1",
            "--q",
            "inf",
            "--a",
            "2,3",
            "--restarts",
            "3",
            "--iterations",
            "60",
            "--seed",
            "7",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (x, y) = (run("x.csv"), run("y.csv"));
    assert_eq!(without_runtime(&x), without_runtime(&y));
}

#[test]
fn config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = bnsharp(&[
        "constant",
        "--body",
        "ball:1",
        "--m",
        "2",
        "--op",
        "laplacian:2",
        "--p",
        "2",
        "--q",
        "2",
        "--a",
        "2,4",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("first.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    let text = manifest["config_text"].as_str().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, text).unwrap();

    let second = dir.path().join("second.csv");
    let o = bnsharp(&[
        "constant",
        "--config",
        cfg.to_str().unwrap(),
        "-o",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(without_runtime(&first), without_runtime(&second));
    let again: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("second.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    let mut expected = manifest["config"].clone();
    expected["output"] = serde_json::json!(second.to_str().unwrap());
    assert_eq!(again["config"], expected);
}

#[test]
fn stdout_without_output_path() {
    let o = bnsharp(&["constant", "--m", "1", "--a", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("p,q,operator,body,a,kind,value,tolerance,seed,runtime_ms"));
}
