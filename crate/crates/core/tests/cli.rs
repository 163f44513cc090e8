//! The `quatsub` binary: exit codes, error messages and deterministic JSON.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn quatsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatsub"))
        .args(args)
        .env("QUATSUB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SIX: &str = r#"
structure = "canonical"
[total]
dim = 6
metric = "euclidean"
box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1]]
[base]
dim = 1
metric = "euclidean"
[map]
components = ["x1"]
"#;

const WARPED: &str = r#"
name = "warped"
[total]
dim = 2
metric = [["1", "0"], ["0", "x1^2"]]
box = [[0.5, 2.0], [-1.0, 1.0]]
[base]
dim = 1
metric = "euclidean"
[map]
components = ["x1"]
[samples]
count = 8
seed = 3
"#;

#[test]
fn list_names_the_catalogue() {
    let o = quatsub(&["list"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("example-3-1") && out.contains("heisenberg"));
    assert!(out.lines().count() >= 8);
}

#[test]
fn example_3_1_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = quatsub(&["report", "--all", "--fixture", "example-3-1", "--samples", "16", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["classification"]["overall"], "h-anti-invariant");
    assert_eq!(v["product_type"], "RiemannianProduct");
    let theorems = v["theorems"].as_array().unwrap();
    assert_eq!(theorems.len(), 12);
    assert!(theorems.iter().all(|t| t["verdict"] == "pass"));
    assert_eq!(v["source"]["kind"], "builtin");
}

#[test]
fn example_3_2_is_harmonic() {
    let o = quatsub(&["theorem", "harmonic", "--fixture", "example-3-2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8(o.stdout).unwrap().contains("harmonic: pass"));
}

#[test]
fn failed_verdict_exits_one() {
    let o = quatsub(&["theorem", "totally-geodesic", "--fixture", "gibbons-hawking-v1", "--samples", "8"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn inapplicable_does_not_fail() {
    let o = quatsub(&["theorem", "harmonic", "--fixture", "polar", "--samples", "8"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("inapplicable"));
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let six = write(dir.path(), "six.toml", SIX);
    let o = quatsub(&["check", "--manifest", six.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("dimension not divisible by 4"));

    let o = quatsub(&["theorem", "no-such-theorem", "--fixture", "polar"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown theorem id"));

    let o = quatsub(&["check", "--fixture", "no-such-fixture"]);
    assert_eq!(code(&o), 2);

    let broken = write(dir.path(), "broken.toml", "[total]\ndim = 2\nmetric = [[\"1\", \"0\"],\n");
    let o = quatsub(&["check", "--manifest", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let bad_expr = write(dir.path(), "expr.toml", &WARPED.replace("\"x1^2\"", "\"x1^\""));
    let o = quatsub(&["check", "--manifest", bad_expr.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("total.metric") && stderr(&o).contains("column"), "{}", stderr(&o));

    let o = quatsub(&["tensors", "--fixture", "polar"]);
    assert_eq!(code(&o), 2);
    let o = quatsub(&["tensors", "--fixture", "polar", "--point", "1,0,0"]);
    assert_eq!(code(&o), 2);
    let o = quatsub(&["check", "--fixture", "polar", "--point", "9,0"]);
    assert_eq!(code(&o), 2);
    let o = quatsub(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tensors_at_a_point() {
    let o = quatsub(&["tensors", "--fixture", "polar", "--point", "1,0", "--json", "-"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let h: Vec<f64> = serde_json::from_value(v["tensors"]["mean_curvature"].clone()).unwrap();
    assert!((h[0] + 1.0).abs() < 1e-12 && h[1].abs() < 1e-12);
}

#[test]
fn manifest_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "warped.toml", WARPED);
    let run = |out: &str| {
        let p = dir.path().join(out);
        let o = quatsub(&["report", "--all", "--manifest", m.to_str().unwrap(), "--seed", "11", "--json", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(p).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["product_type"], "Warped");
    assert_eq!(v["source"]["digest"].as_str().unwrap(), quatsub::report::sha256_hex(WARPED.as_bytes()));
    assert!(v.get("wall_time").is_none());
}

#[test]
fn golden_harmonic_report() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/theorem-harmonic-example-3-2.json");
    let o = quatsub(&["theorem", "harmonic", "--fixture", "example-3-2", "--samples", "4", "--json", "-"]);
    assert_eq!(code(&o), 0);
    if std::env::var_os("QUATSUB_BLESS").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &o.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("golden file; regenerate with QUATSUB_BLESS=1");
    let got = String::from_utf8(o.stdout).unwrap();
    let version = format!("\"version\": \"{}\"", env!("CARGO_PKG_VERSION"));
    assert!(got.contains(&version));
    assert_eq!(got, expected);
}
