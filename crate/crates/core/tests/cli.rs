use std::path::Path;
use std::process::{Command, Output};

use ldpc_streams::code::fixtures::h_10_5;
use ldpc_streams::{emit_alist, parse_alist};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldpc-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gencode_is_deterministic_and_parses() {
    let a = bench(&["gencode", "--gen", "576,288,6,11"]);
    let b = bench(&["gencode", "--gen", "576,288,6,11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let code = parse_alist(&stdout(&a)).unwrap();
    assert_eq!((code.n(), code.m(), code.max_col_degree()), (576, 288, 3));
}

#[test]
fn gencode_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.alist");
    let o = bench(&[
        "gencode",
        "--gen",
        "4,2,2,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let code = parse_alist(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((code.n(), code.m()), (4, 2));
}

#[test]
fn gencode_infeasible_fails() {
    let o = bench(&["gencode", "--gen", "10,2,3,1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn throughput_single_frame_table() {
    let o = bench(&[
        "throughput",
        "--gen",
        "96,48,6,1",
        "--streams",
        "1",
        "--batch",
        "1",
        "--frames",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("throughput_mbps"));
    let row: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(row[7], "1");
}

fn write_fixture(dir: &Path) -> String {
    let path = dir.join("h.alist");
    std::fs::write(&path, emit_alist(&h_10_5())).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn ber_csv_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let code = write_fixture(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bench(&[
            "ber",
            "--code",
            &code,
            "--ebno",
            "-2,4",
            "--frames",
            "300",
            "--seed",
            "9",
            "--streams",
            "2",
            "--batch",
            "16",
            "--csv",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("-2.00,300,"));
}

#[test]
fn compare_succeeds_on_generated_code() {
    let o = bench(&[
        "compare",
        "--gen",
        "256,128,6,3",
        "--frames",
        "100",
        "--ebno",
        "2",
        "--iters",
        "30",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("flooding") && text.contains("layered"));
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        vec!["throughput"],
        vec!["throughput", "--gen", "96,48,6,1", "--code", "x.alist"],
        vec!["ber", "--gen", "96,48,6,1"],
        vec!["ber", "--gen", "96,48,6,1", "--ebno", ""],
        vec!["throughput", "--gen", "96,48,6,1", "--schedule", "diagonal"],
        vec!["throughput", "--gen", "96,48,6,1", "--streams", "0"],
        vec!["ber", "--code", "/nonexistent.alist", "--ebno", "1"],
        vec!["frobnicate"],
    ] {
        let o = bench(&args);
        assert!(!o.status.success(), "{args:?} should fail");
    }
}

#[test]
fn malformed_alist_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.alist");
    std::fs::write(&path, "10 5\n2 4\n").unwrap();
    let o = bench(&["ber", "--code", path.to_str().unwrap(), "--ebno", "1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}
