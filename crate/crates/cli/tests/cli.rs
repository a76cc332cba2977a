use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::NamedTempFile;

fn burn(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_burn"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn burn");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of a `key value` report line.
fn field<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(' '))
}

fn path_edges(n: usize) -> String {
    let mut s = format!("n {n}\n");
    for i in 1..n {
        s += &format!("{} {}\n", i - 1, i);
    }
    s
}

#[test]
fn path_forest_is_solved_exactly() {
    let f = file("paths 9\n");
    let o = burn(&["solve", f.path().to_str().unwrap()], None);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "algorithm"), Some("path-dp"));
    assert_eq!(field(&out, "rounds"), Some("3"));
    assert_eq!(field(&out, "lower_bound"), Some("3"));
    assert!(field(&out, "micros").is_none());
}

#[test]
fn greedy_on_edge_list_stays_within_factor_three() {
    let f = file(&path_edges(9));
    let o = burn(&["solve", "--algo", "greedy3", f.path().to_str().unwrap()], None);
    assert!(o.status.success());
    let out = stdout(&o);
    let rounds: usize = field(&out, "rounds").unwrap().parse().unwrap();
    assert!((3..=9).contains(&rounds));
    assert_eq!(field(&out, "ratio_bound"), Some("3"));
}

#[test]
fn solved_schedule_verifies_to_the_same_rounds() {
    let g = file(&path_edges(12));
    let sched = NamedTempFile::new().unwrap();
    let o = burn(
        &["solve", "--algo", "tree2", "--out", sched.path().to_str().unwrap(), g.path().to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let rounds = field(&stdout(&o), "rounds").unwrap().to_string();
    let v = burn(
        &["verify", "--strict", "--schedule", sched.path().to_str().unwrap(), g.path().to_str().unwrap()],
        None,
    );
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    let out = stdout(&v);
    assert_eq!(field(&out, "complete"), Some("true"));
    assert_eq!(field(&out, "rounds"), Some(rounds.as_str()));
    assert_eq!(field(&out, "strict"), Some("true"));
}

#[test]
fn strict_violation_exits_two() {
    let g = file(&path_edges(3));
    let s = file("1 1\n2 1\n");
    let o = burn(&["verify", "--strict", "--schedule", s.path().to_str().unwrap(), g.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn incomplete_schedule_exits_two() {
    let g = file("n 3\n0 1\n");
    let s = file("1 0\n");
    let o = burn(&["verify", "--schedule", s.path().to_str().unwrap(), g.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("never"));
}

#[test]
fn out_of_range_activator_exits_one() {
    let g = file(&path_edges(3));
    let s = file("1 7\n");
    let o = burn(&["verify", "--schedule", s.path().to_str().unwrap(), g.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn schedule_ending_early_still_spreads() {
    let g = file(&path_edges(9));
    let s = file("1 0\n");
    let o = burn(&["verify", "--schedule", s.path().to_str().unwrap(), g.path().to_str().unwrap()], None);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "rounds"), Some("9"));
}

#[test]
fn help_exits_zero() {
    assert!(burn(&["--help"], None).status.success());
    assert_eq!(burn(&["solve", "--bogus"], None).status.code(), Some(1));
}

#[test]
fn tree_algorithm_rejects_cycles() {
    let g = file("n 3\n0 1\n1 2\n2 0\n");
    let o = burn(&["solve", "--algo", "tree2", g.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_input_exits_one() {
    let o = burn(&["solve", "-"], Some("garbage x\n"));
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn reads_graph_from_stdin() {
    let o = burn(&["solve", "--algo", "exact", "-"], Some(&path_edges(4)));
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "rounds"), Some("2"));
}

#[test]
fn isolated_vertices_are_certified() {
    let o = burn(&["bound", "-"], Some("n 3\n"));
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "lower_bound"), Some("3"));
}

#[test]
fn generation_is_deterministic() {
    let args = ["gen", "--type", "gnp", "--n", "30", "--p", "0.2", "--seed", "11"];
    let a = burn(&args, None);
    let b = burn(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = burn(&["gen", "--type", "gnp", "--n", "30", "--p", "0.2", "--seed", "12"], None);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gadget_has_expected_size() {
    let o = burn(&["gen", "--type", "gadget", "--k", "5"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("n 39"));
}

#[test]
fn generated_tree_round_trips_through_solve() {
    let g = burn(&["gen", "--type", "tree", "--n", "40", "--seed", "3"], None);
    let text = stdout(&g);
    let o = burn(&["solve", "-"], Some(&text));
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "algorithm"), Some("tree2"));
}

#[test]
fn bench_prints_one_row_per_size() {
    let o = burn(&["bench", "--algo", "greedy3", "--sizes", "200,400"], None);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "200");
    assert!(rows.iter().all(|r| r.len() == 6 && r.iter().all(|x| x.parse::<u64>().is_ok())));
}

#[test]
fn fptas_reports_its_constants() {
    let o = burn(&["solve", "--algo", "fptas", "-"], Some("paths 9 9 9 9\n"));
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "rounds"), Some("7"));
    assert!(field(&out, "canonical_constant").is_some());
    assert!(field(&out, "eps0").is_some());
}

#[test]
fn bad_epsilon_exits_one() {
    let o = burn(&["solve", "--algo", "ptas", "--eps", "zero", "-"], Some("paths 3 3\n"));
    assert_eq!(o.status.code(), Some(1));
}
