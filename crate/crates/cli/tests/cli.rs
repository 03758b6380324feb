use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn wstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wstar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distance_modes() {
    let dir = tempfile::tempdir().unwrap();
    let origin = write(dir.path(), "o.json", r#"{"kind":"points","points":[[]]}"#);
    let e0 = write(
        dir.path(),
        "e0.json",
        r#"{"kind":"points","points":[[[0,"1/1"]]]}"#,
    );
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"kind":"polyhedron","points":[[],[[0,"1/1"]]]}"#,
    );

    let out = wstar(&["distance", s(&seg), s(&seg)]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["distance"], "0/1");

    let out = wstar(&["distance", s(&origin), s(&e0)]);
    assert_eq!(stdout_json(&out)["distance"], "1/4");
    assert_eq!(stdout_json(&out)["manifest"]["command"], "distance");

    let sigma5 = write(
        dir.path(),
        "s5.json",
        r#"{"kind":"points","points":[[[5,"32/1"]]]}"#,
    );
    let out = wstar(&["distance", s(&sigma5), s(&origin), "--direction", "e5"]);
    assert_eq!(stdout_json(&out)["distance"], "32/1");

    let out = wstar(&["--approx", "distance", s(&origin), s(&e0)]);
    assert_eq!(stdout_json(&out)["distance"]["exact"], "1/4");
    assert_eq!(stdout_json(&out)["distance"]["approx"], 0.25);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"kind":"points","points":[[[0,"x"]]]}"#,
    );
    let ok = write(dir.path(), "ok.json", r#"{"kind":"points","points":[[]]}"#);
    assert_eq!(wstar(&["distance", s(&bad), s(&ok)]).status.code(), Some(2));
    assert_eq!(
        wstar(&["distance", "/nonexistent.json", s(&ok)])
            .status
            .code(),
        Some(2)
    );
    let ray = write(
        dir.path(),
        "ray.json",
        r#"{"kind":"polyhedron","points":[[]],"rays":[[[1,"1/1"]]]}"#,
    );
    let out = wstar(&["distance", s(&ray), s(&ok)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bounded"));
    assert_eq!(
        wstar(&["poulsen", "--epsilon", "1/2"]).status.code(),
        Some(2)
    );
}

#[test]
fn poulsen_end_to_end_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let target = write(dir.path(), "u.json", r#"{"kind":"points","points":[[]]}"#);
    let out_dir = dir.path().join("run");
    let args = [
        "poulsen",
        "--target",
        s(&target),
        "--epsilon",
        "1/2",
        "--steps",
        "4",
        "--seed",
        "3",
        "--out",
        s(&out_dir),
    ];
    let first = wstar(&args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let v = stdout_json(&first);
    assert_eq!(v["passed"], true);
    for f in ["result.json", "trace.json", "report.json", "manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let trace: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["steps"][0]["lambda"], "1/8");
    assert_eq!(trace["steps"][1]["c"], "1/16");

    let result_text = fs::read_to_string(out_dir.join("result.json")).unwrap();
    let again = wstar(&args);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(
        fs::read_to_string(out_dir.join("result.json")).unwrap(),
        result_text
    );

    let verts = wstar(&["vertices", s(&out_dir.join("result.json"))]);
    assert_eq!(
        stdout_json(&verts)["vertices"]["points"]
            .as_array()
            .unwrap()
            .len(),
        5
    );

    let outside = write(
        dir.path(),
        "far.json",
        r#"{"kind":"points","points":[[[0,"2/1"]]]}"#,
    );
    let out = wstar(&[
        "poulsen",
        "--target",
        s(&outside),
        "--epsilon",
        "1/2",
        "--steps",
        "2",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hull_vertices_and_expose() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"kind":"points","points":[[],[[0,"1/1"]],[[1,"1/1"]],[[0,"1/1"],[1,"1/1"]],[[0,"1/2"],[1,"1/2"]]]}"#,
    );
    let out_dir = dir.path().join("h");
    let out = wstar(&["hull", s(&sq), "--out", s(&out_dir)]);
    assert!(out.status.success());
    let hull_file = out_dir.join("hull.json");
    let text = fs::read_to_string(&hull_file).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), 4);
    // re-hulling an emitted hull is a fixed point
    let again_dir = dir.path().join("h2");
    wstar(&["hull", s(&hull_file), "--out", s(&again_dir)]);
    assert_eq!(
        fs::read_to_string(again_dir.join("hull.json")).unwrap(),
        text
    );

    let out = wstar(&["expose", s(&sq)]);
    assert_eq!(
        stdout_json(&out)["certificates"].as_array().unwrap().len(),
        4
    );
    let out = wstar(&["expose", s(&sq), "--vertex", r#"[[0,"1/1"],[1,"1/1"]]"#]);
    let cert = &stdout_json(&out)["certificates"][0];
    assert_eq!(
        cert["functional"],
        serde_json::json!([[0, "1/1"], [1, "1/1"]])
    );
    assert_eq!(cert["margin"], "1/1");
    let out = wstar(&["expose", s(&sq), "--vertex", r#"[[0,"1/2"],[1,"1/2"]]"#]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decompose_writes_parts() {
    let dir = tempfile::tempdir().unwrap();
    let v = write(dir.path(), "v.json", r#"[[0,"3/1"],[1,"-2/1"]]"#);
    let out_dir = dir.path().join("d");
    let out = wstar(&["decompose", s(&v), "--out", s(&out_dir)]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(out_dir.join("positive.json"))
            .unwrap()
            .split_whitespace()
            .collect::<String>(),
        r#"[[0,"3/1"]]"#
    );
    assert_eq!(
        fs::read_to_string(out_dir.join("negative.json"))
            .unwrap()
            .split_whitespace()
            .collect::<String>(),
        r#"[[1,"2/1"]]"#
    );
}

#[test]
fn immeasurable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"kind":"polyhedron","points":[[],[[0,"1/1"]]]}"#,
    );
    let ray = write(
        dir.path(),
        "ray.json",
        r#"{"kind":"polyhedron","points":[[]],"rays":[[[1,"1/1"]]]}"#,
    );
    let out = wstar(&["immeasurable", s(&seg), s(&ray)]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["immeasurable"], true);
    assert_eq!(v["witness"], "e1");
    let out = wstar(&["immeasurable", s(&seg), s(&seg)]);
    assert_eq!(stdout_json(&out)["witness"], Value::Null);
}

#[test]
fn limits_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "f1.json",
        r#"{"kind":"polyhedron","points":[[],[[0,"1/2"]]]}"#,
    );
    write(
        dir.path(),
        "f2.json",
        r#"{"kind":"polyhedron","points":[[],[[0,"3/4"]]]}"#,
    );
    let m = write(dir.path(), "seq.json", r#"{"sets":["f1.json","f2.json"]}"#);
    let c = write(
        dir.path(),
        "c.json",
        r#"{"kind":"points","points":[[[0,"3/4"]]]}"#,
    );
    let out = wstar(&[
        "limits",
        s(&m),
        "--candidates",
        s(&c),
        "--stabilization",
        "1",
        "--monotone",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["diagnostic"]["rows"][0]["in_li"], true);
    assert_eq!(v["diagnostic"]["rows"][0]["distances"][0], "1/16");
    assert_eq!(
        v["monotone"]["distances"],
        serde_json::json!(["1/16", "0/1"])
    );

    let back = write(dir.path(), "rev.json", r#"{"sets":["f2.json","f1.json"]}"#);
    assert_eq!(
        wstar(&["limits", s(&back), "--monotone"]).status.code(),
        Some(3)
    );
}

#[test]
fn deviation_and_demo() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"kind":"polyhedron","points":[[],[[0,"1/1"]]]}"#,
    );
    let out = wstar(&["deviation", s(&seg), "--budget", "8", "--m", "8"]);
    let v = stdout_json(&out);
    assert_eq!(v["lower"], "1/8");
    assert_eq!(v["certifies_m"], true);

    let out = wstar(&["demo"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(
        v["counterexample"]["distances"][4],
        serde_json::json!([5, "1/66"])
    );
    assert_eq!(v["counterexample"]["max_l1_norm"], "32/1");
    assert_eq!(v["polygon_sweep"].as_array().unwrap().len(), 4);
}
