use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gridrecov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridrecov")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_solve_recovers_noiseless_truth() {
    let dir = tempfile::tempdir().unwrap();
    let out = gridrecov(&["generate", "--rows", "4", "--cols", "6", "-p", "0", "-q", "0.2", "--truth", "random", "--out", path(dir.path())]);
    assert!(out.status.success());
    for algo in ["two-step", "map-full", "marginal", "oracle"] {
        let out = gridrecov(&[
            "solve",
            "--graph",
            path(&dir.path().join("graph.txt")),
            "--signals",
            path(&dir.path().join("signals.txt")),
            "--truth",
            path(&dir.path().join("truth.txt")),
            "--algo",
            algo,
            "-p",
            "0",
            "-q",
            "0.2",
        ]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 24);
    }
}

#[test]
fn solve_on_edge_list_uses_exhaustive_stage() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let signals = dir.path().join("s.txt");
    fs::write(&graph, "3 3\n0 1\n1 2\n0 2\n").unwrap();
    fs::write(&signals, "node 0 1\nnode 1 1\nnode 2 1\nedge 0 1 1\nedge 1 2 -1\nedge 0 2 -1\n").unwrap();
    let out = gridrecov(&["solve", "--graph", path(&graph), "--signals", path(&signals), "--algo", "two-step"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "+1\n+1\n-1\n");
    let out = gridrecov(&["solve", "--graph", path(&graph), "--signals", path(&signals), "--algo", "marginal"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    let out = gridrecov(&[
        "experiment", "--rows", "6", "--cols", "6", "-p", "0.02,0.1", "--trials", "10", "--algo", "two-step,edge-only",
        "--out", path(&csv), "--plot", path(&svg),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("algorithm,p,q,rows,cols,trials,mean_error,stderr,wall_ms\n"));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(gridrecov(&["experiment", "-p", "0.9"]).status.code(), Some(2));
    assert_eq!(gridrecov(&["experiment", "--rows", "20", "--algo", "marginal", "--trials", "1"]).status.code(), Some(3));
    assert_eq!(gridrecov(&["experiment", "--rows", "5", "--cols", "5", "--algo", "oracle", "--trials", "1"]).status.code(), Some(3));
    assert_eq!(gridrecov(&["experiment", "--algo", "fastest"]).status.code(), Some(2));
}

#[test]
fn bounds_and_regions_reports() {
    let out = gridrecov(&["bounds", "-p", "0.017", "--imax", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,p,N,value,flag\n"));
    assert!(text.contains("refined_explicit,0.017,400,"));
    assert!(text.contains("refined_remainder,0.017,400,"));

    let out = gridrecov(&["regions", "--census", "6"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "perimeter,area,count\n4,1,1\n6,2,2\n");
    let out = gridrecov(&["regions", "--rows", "4", "--cols", "4", "--max-boundary", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("boundary,type,count\n"));
    assert!(text.contains("4,type1,4\n"));
}

#[test]
fn verify_oracle_suite_passes() {
    let out = gridrecov(&["verify", "--trials", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().all(|l| l.contains("\"pass\":true")));
}
