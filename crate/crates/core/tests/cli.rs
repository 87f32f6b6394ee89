use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gsip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsip")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut rows = csv_text.lines().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = rows.next().unwrap();
    let idx = header.iter().position(|h| h == name).unwrap();
    rows.map(|r| r[idx].clone()).collect()
}

#[test]
fn llp_only_trace_halves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = gsip(&[
        "run", "--problem", "cex1", "--variant", "llp-only", "--max-iter", "20", "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&path).unwrap();
    let xs = column(&text, "x");
    let ys = column(&text, "llp_y");
    let lb = column(&text, "f_Lk");
    assert_eq!(xs.len(), 20);
    for k in 1..=20 {
        let expect = 0.5f64.powi(k as i32 - 1);
        let x: f64 = xs[k - 1].parse().unwrap();
        let y: f64 = ys[k - 1].parse().unwrap();
        let f: f64 = lb[k - 1].parse().unwrap();
        assert!((x - expect).abs() <= 1e-6, "k={k} x={x}");
        assert!((y - expect).abs() <= 1e-6, "k={k} y={y}");
        assert!((f + expect).abs() <= 1e-6, "k={k} f={f}");
    }
    let summary = stdout(&o);
    assert!(summary.contains("cex1 llp-only: status iteration_cap"), "{summary}");
}

#[test]
fn aux_trace_on_cex2() {
    let o = gsip(&["run", "--problem", "cex2", "--variant", "aux", "--tie-break", "min"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let aux: f64 = column(&text, "aux_y")[0].parse().unwrap();
    assert!((aux - 0.45).abs() <= 1e-6);
    let xs = column(&text, "x");
    assert_eq!(xs[0], "1.0");
    assert!(xs[1..].iter().all(|x| x.parse::<f64>().unwrap().abs() <= 1e-6));
    assert!(stderr(&o).contains("status stalled"));
}

#[test]
fn sip_llp_summary() {
    for name in ["cex1", "cex2"] {
        let o = gsip(&["run", "--problem", name, "--variant", "sip-llp"]);
        assert_eq!(o.status.code(), Some(0));
        let err = stderr(&o);
        assert!(
            err.contains("status converged_feasible, final lower bound 0.5, 2 iterations"),
            "{err}"
        );
    }
}

#[test]
fn csv_is_reproducible() {
    let args = ["run", "--problem", "cex2", "--variant", "aux", "--max-iter", "10", "--no-stall-stop"];
    let a = gsip(&args);
    let b = gsip(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_trace() {
    let o = gsip(&["run", "--problem", "cex1", "--variant", "sip-llp", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["problem"], "cex1");
    assert_eq!(v["status"], "converged_feasible");
    assert_eq!(v["final_lower_bound"], 0.5);
    assert_eq!(v["trace"][0]["added_point"][0], -1.0);
    assert_eq!(v["trace"][1]["x_k"][0], -0.5);
    assert_eq!(v["trace"][1]["Yset_size_after"], 1);
}

#[test]
fn verify_and_exit_codes() {
    let o = gsip(&["verify", "--problem", "cex1", "--max-iter", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: ok"));

    let o = gsip(&["verify", "--problem", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown built-in problem"));

    let o = gsip(&["run", "--problem", "cex1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gsip(&["run", "--problem", "cex1", "--variant", "aux", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_and_fmt() {
    let o = gsip(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("cex1")));
    assert!(text.lines().any(|l| l.starts_with("cex2")));

    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/cex1.gsip");
    let o = gsip(&["fmt", src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/cex1.gsip");
    assert_eq!(stdout(&o), fs::read_to_string(golden).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("p.gsip");
    fs::copy(&src, &copy).unwrap();
    let o = gsip(&["fmt", copy.to_str().unwrap(), "--in-place"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&copy).unwrap(), stdout(&gsip(&["fmt", src.to_str().unwrap()])));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.gsip");
    fs::write(&path, "problem \"bad\"\nouter x in [0, 1]\ninner y in [0, 1]\nobjective: x +\n").unwrap();
    let o = gsip(&["run", "--file", path.to_str().unwrap(), "--variant", "sip-llp"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4, column"), "{}", stderr(&o));
}

#[test]
fn custom_file_runs() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/ridge.gsip");
    let o = gsip(&[
        "run", "--file", path.to_str().unwrap(), "--variant", "sip-llp", "--max-iter", "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
}
