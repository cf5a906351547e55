use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homcount-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &PathBuf, file: &str, text: &str) -> String {
    let p = dir.join(file);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homcount")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HADAMARD: &str = "matrix 2\n0 0 1\n0 1 1\n1 1 -1\n";
const VCOVER: &str = "matrix 2\n0 1 1\n1 1 1\n";
const K2: &str = "graph 2\n0 1 1\n";

#[test]
fn decide_prints_verdicts() {
    let d = workdir("decide");
    let h = write(&d, "h.mat", HADAMARD);
    let v = write(&d, "vc.mat", VCOVER);
    let o = run(&["decide", &h]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "TRACTABLE\n");
    let o = run(&["decide", &v]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P-HARD step1:bulatov-grohe\n");
}

#[test]
fn certificate_roundtrip_through_files() {
    let d = workdir("cert");
    let h = write(&d, "h.mat", HADAMARD);
    let v = write(&d, "vc.mat", VCOVER);
    let g = write(&d, "k2.graph", K2);
    let c = d.join("h.json").to_string_lossy().into_owned();
    assert!(run(&["decide", &h, "--certificate", &c]).status.success());
    assert_eq!(stdout(&run(&["validate", &h, &c])), "VALID\n");
    let o = run(&["validate", &v, &c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("INVALID"));
    let o = run(&["eval", &h, &g, "--certificate", &c]);
    assert_eq!(stdout(&o).lines().next(), Some("N=2; 2/1"));
}

#[test]
fn eval_modes_agree() {
    let d = workdir("eval");
    let h = write(&d, "h.mat", HADAMARD);
    let g = write(&d, "tri.graph", "graph 3\n0 1 1\n1 2 1\n0 2 1\n");
    let fast = stdout(&run(&["eval", &h, &g, "--mode", "fast"]));
    let brute = stdout(&run(&["eval", &h, &g, "--mode", "brute"]));
    let auto = stdout(&run(&["eval", &h, &g]));
    assert_eq!(fast, brute);
    assert_eq!(fast, auto);
    // 4 of the 8 vertex subsets of a triangle induce an odd number of edges
    assert!(fast.starts_with("N=2; 0/1\n~ 0.000000000000 + 0.000000000000i"));
}

#[test]
fn eval_auto_falls_back_to_brute() {
    let d = workdir("auto");
    let v = write(&d, "vc.mat", VCOVER);
    let g = write(&d, "k2.graph", K2);
    let o = run(&["eval", &v, &g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("N=1; 3/1"));
    assert_eq!(run(&["eval", &v, &g, "--mode", "fast"]).status.code(), Some(2));
}

#[test]
fn gauss_sum_is_positive_for_five() {
    let d = workdir("gauss");
    let f = write(&d, "f.poly", "poly q=5 n=1\nq 0 0 1\n");
    let o = run(&["gauss", &f]);
    let out = stdout(&o);
    let approx = out.lines().nth(1).unwrap();
    assert_eq!(approx, "~ 2.236067977500 + 0.000000000000i");
    let o = run(&["--digits", "4", "gauss", &f]);
    assert_eq!(stdout(&o).lines().nth(1), Some("~ 2.2361 + 0.0000i"));
}

#[test]
fn size_guard_exits_three() {
    let d = workdir("guard");
    let h = write(&d, "h.mat", HADAMARD);
    let g = write(&d, "p.graph", "graph 5\n0 1 1\n1 2 1\n2 3 1\n3 4 1\n");
    let o = run(&["--size-guard", "16", "brute", &h, &g]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["--size-guard", "16", "eval", &h, &g]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_and_usage_errors_exit_two() {
    let d = workdir("errors");
    let bad = write(&d, "bad.mat", "matrix 2\n1 0 1\n");
    assert_eq!(run(&["decide", &bad]).status.code(), Some(2));
    assert_eq!(run(&["decide", "/nonexistent/x.mat"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let d = workdir("threads");
    let m = write(&d, "f3.mat", "matrix 3\n0 0 1\n0 1 1\n0 2 1\n1 1 1*w(3,1)\n1 2 1*w(3,2)\n2 2 1*w(3,1)\n");
    let g = write(&d, "g.graph", "graph 5\n0 1 2\n1 2 1\n2 3 1\n3 4 3\n0 4 1\n1 3 1\n");
    let one = run(&["--threads", "1", "brute", &m, &g]);
    let four = run(&["--threads", "4", "brute", &m, &g]);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one), stdout(&run(&["eval", &m, &g, "--mode", "fast"])));
}

#[test]
fn corpus_table_lists_every_matrix() {
    let o = run(&["corpus"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("vertex-cover"));
    assert!(out.lines().any(|l| l.starts_with("broken-coset") && l.contains("P-HARD step3:coset")));
    assert_eq!(out.lines().count(), 18);
}
