use std::fs;
use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use amalgamkit::fields::{Field, Poly2};
use amalgamkit::group::GroupElement;
use amalgamkit::linalg::{element_order, DenseMatrix};
use amalgamkit::mtxio::{read_matrix, write_meataxe, MeatAxeObject};
use serde_json::Value;

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn co1_gens() -> [String; 2] {
    let d = data().join("co1");
    [d.join("Co1G1-f2r24B0.m1"), d.join("Co1G1-f2r24B0.m2")].map(|p| p.display().to_string())
}

fn a7_gens() -> [PathBuf; 2] {
    [data().join("a7/A7-f2r4-g1.m1"), data().join("a7/A7-f2r4-g2.m1")]
}

/// Runs the binary in `cwd` with a clean environment for the settings it reads.
fn amalgamkit(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgamkit"))
        .args(args)
        .current_dir(cwd)
        .env_remove("AMALGAMKIT_CACHE")
        .env_remove("AMALGAMKIT_DATA")
        .env_remove("AMALGAMKIT_BASE_URL")
        .env("HOME", cwd)
        .env_remove("XDG_CACHE_HOME")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_matrix(dir: &Path, name: &str, m: DenseMatrix) -> String {
    let path = dir.join(name);
    fs::write(&path, write_meataxe(&MeatAxeObject::Matrix(m)).unwrap()).unwrap();
    path.display().to_string()
}

/// A local listener standing in for the network; counts connection attempts.
struct Sentinel {
    url: String,
    hits: Arc<AtomicUsize>,
}

impl Sentinel {
    fn start() -> Sentinel {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        std::thread::spawn(move || {
            for mut stream in listener.incoming().flatten() {
                counter.fetch_add(1, Ordering::SeqCst);
                stream.set_read_timeout(Some(Duration::from_millis(200))).ok();
                let _ = stream.read(&mut [0u8; 1024]);
                let _ = stream.write_all(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
            }
        });
        Sentinel { url, hits }
    }

    fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

#[test]
fn eval_reports_order_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b] = co1_gens();
    let out = amalgamkit(dir.path(), &["eval", "-g", &a, "-g", &b, "-w", "ab", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    let ab = read_matrix(Path::new(&a)).unwrap().op(&read_matrix(Path::new(&b)).unwrap());
    assert_eq!(v["order"], element_order(&ab, 1 << 20).unwrap());
    assert_eq!(v["digest"], ab.digest());
    assert_eq!(v["size"], 24);

    let out = amalgamkit(dir.path(), &["order", "-g", &a, "-g", &b, "-w", "a a^-1"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
}

#[test]
fn eval_runs_the_shipped_script() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b] = co1_gens();
    let script = data().join("elements.script");
    let out = amalgamkit(dir.path(), &["eval", "-g", &a, "-g", &b, "--script", script.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let rows = json(&out);
    let e = rows.as_array().unwrap().iter().find(|r| r["name"] == "e").unwrap();
    assert_eq!((e["expected"].as_u64(), e["computed"].as_u64()), (Some(22), Some(22)));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let [a, _] = co1_gens();
    assert_eq!(amalgamkit(dir.path(), &["order", "-g", "/no/such/file.m1", "-w", "a"]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["order", "-g", &a, "-w", "a b"]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["order", "-g", &a, "-w", "a^"]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["split", "-g", &a, "-w", "a"]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["scenario", "S9"]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["fetch", "--group", "no-such-group", "--offline"]).status.code(), Some(2));
}

#[test]
fn minpoly_and_split_of_the_order_seven_element() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b] = co1_gens();
    let word = "((cdcdcd^2cd)^11 ((cdcdcd^2cd)^11)^(ab))^10";
    let expanded = word.replace('c', "(ababab^2)").replace('d', "(ab^2)");
    let out = amalgamkit(dir.path(), &["minpoly", "-g", &a, "-g", &b, "-w", &expanded, "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["minpoly"], "x^6+x^5+x^4+x^3+x^2+x+1");
    let out = amalgamkit(dir.path(), &["split", "-g", &a, "-g", &b, "-w", &expanded, "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["dims"], serde_json::json!([12, 12]));
    assert_eq!(v["invariant"], true);
}

#[test]
fn orbits_of_a7_on_gf8_points() {
    let dir = tempfile::tempdir().unwrap();
    let [g1, g2] = a7_gens();
    let out = amalgamkit(dir.path(), &["orbits", g1.to_str().unwrap(), g2.to_str().unwrap(), "--extend-to", "8", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    let sizes: Vec<u64> = v["orbits"].as_array().unwrap().iter().map(|o| o["size"].as_u64().unwrap()).collect();
    let stabs: Vec<u64> = v["orbits"].as_array().unwrap().iter().map(|o| o["stabiliser_order"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [15, 210, 360]);
    assert_eq!(stabs, [168, 12, 7]);
    assert_eq!(v["group_order"], 2520);
}

#[test]
fn orbits_of_trivial_and_cyclic_groups() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_matrix(dir.path(), "id.m1", DenseMatrix::identity(Field::gf2(), 4));
    let out = amalgamkit(dir.path(), &["orbits", &id, "--extend-to", "8", "--format", "json"]);
    let v = json(&out);
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 585);
    assert!(orbits.iter().all(|o| o["size"] == 1));

    let c = DenseMatrix::companion(&"x^4+x+1".parse::<Poly2>().unwrap());
    let c = write_matrix(dir.path(), "c.m1", c);
    let v = json(&amalgamkit(dir.path(), &["orbits", &c, "--extend-to", "8", "--format", "json"]));
    let total: u64 = v["orbits"].as_array().unwrap().iter().map(|o| o["size"].as_u64().unwrap()).sum();
    assert_eq!(total, 585);
    assert_eq!(v["group_order"], 15);
}

#[test]
fn orbits_reject_mismatched_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let four = write_matrix(dir.path(), "four.m1", DenseMatrix::identity(Field::gf2(), 4));
    let three = write_matrix(dir.path(), "three.m1", DenseMatrix::identity(Field::gf2(), 3));
    let gf3 = write_matrix(dir.path(), "gf3.m1", DenseMatrix::identity(Field::from_order(3).unwrap(), 4));
    assert_eq!(amalgamkit(dir.path(), &["orbits", &four, &three]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["orbits", &four, &gf3]).status.code(), Some(2));
    assert_eq!(amalgamkit(dir.path(), &["orbits", &gf3, "--extend-to", "8"]).status.code(), Some(2));
}

#[test]
fn scenario_s4_needs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let sentinel = Sentinel::start();
    let out = amalgamkit(dir.path(), &["scenario", "S4", "--base-url", &sentinel.url, "--data-root", "/nonexistent"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(sentinel.hits(), 0);
}

#[test]
fn offline_never_touches_the_network() {
    let dir = tempfile::tempdir().unwrap();
    let sentinel = Sentinel::start();
    let base = ["--base-url", sentinel.url.as_str(), "--data-root", "/nonexistent"];
    let fetch = amalgamkit(dir.path(), &[&["fetch", "--all", "--offline"][..], &base].concat());
    assert_eq!(fetch.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&fetch.stdout).contains("offline"));
    let scenario = amalgamkit(dir.path(), &[&["scenario", "--all", "--offline", "--format", "json"][..], &base].concat());
    assert_eq!(scenario.status.code(), Some(0));
    let report = json(&scenario);
    assert!(report["claims"].as_array().unwrap().iter().any(|c| c["status"] == "skipped-no-data"));
    assert_eq!(sentinel.hits(), 0);

    let online = amalgamkit(dir.path(), &[&["fetch", "--group", "co1-f2r24"][..], &base].concat());
    assert_eq!(online.status.code(), Some(2));
    assert!(sentinel.hits() > 0);
}

#[test]
fn scenario_all_with_vendored_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = amalgamkit(dir.path(), &["scenario", "--all", "--offline", "--format", "json"]);
    let report = json(&out);
    let failed: Vec<&str> = report["claims"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["S3.cover.conjugators.l32"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join(".cache/amalgamkit/co1-f2r24/Co1G1-f2r24B0.m1").exists());
}

#[test]
fn settings_precedence_is_flag_then_env_then_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("amalgamkit.toml"), "cache_dir = \"from-file\"\noffline = true\n").unwrap();
    let fetch = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_amalgamkit"));
        cmd.args(["fetch", "--group", "a7-f2r4", "--format", "json"]).args(extra).current_dir(dir.path());
        cmd.env_remove("AMALGAMKIT_CACHE").env_remove("AMALGAMKIT_DATA");
        if let Some(e) = env {
            cmd.env("AMALGAMKIT_CACHE", dir.path().join(e));
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out)[0]["files"][0].as_str().unwrap().to_string()
    };
    assert!(fetch(&[], None).contains("from-file"));
    assert!(fetch(&[], Some("from-env")).contains("from-env"));
    let flag = dir.path().join("from-flag");
    assert!(fetch(&["--cache-dir", flag.to_str().unwrap()], Some("from-env")).contains("from-flag"));

    fs::write(dir.path().join("amalgamkit.toml"), "cache_dir = 3\n").unwrap();
    let out = amalgamkit(dir.path(), &["fetch", "--all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_parses_for_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b] = co1_gens();
    let [g1, _] = a7_gens();
    let runs: Vec<Vec<&str>> = vec![
        vec!["fetch", "--all", "--offline", "--format", "json"],
        vec!["eval", "-g", &a, "-g", &b, "-w", "ab^2", "--format", "json"],
        vec!["order", "-g", &a, "-w", "a", "--format", "json"],
        vec!["minpoly", "-g", &a, "-w", "a", "--format", "json"],
        vec!["orbits", g1.to_str().unwrap(), "--format", "json"],
        vec!["scenario", "S1", "--offline", "--format", "json"],
    ];
    for args in runs {
        let out = amalgamkit(dir.path(), &args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        json(&out);
    }
}
