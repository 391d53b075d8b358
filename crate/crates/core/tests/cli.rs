use std::process::{Command, Output};

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");

fn regstrat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regstrat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(rel: &str) -> String {
    format!("{CORPUS}/{rel}")
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["parse", "cfa-dump", "exec", "testgen", "compare", "reduce", "mutate", "run", "experiment", "report"] {
        let o = regstrat(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(regstrat(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    let o = regstrat(&["parse", "/nonexistent/x.mc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn exec_prints_running_example_outcomes() {
    let o = regstrat(&["exec", &path("find_last/p0.mc"), "--suite", &path("fixtures/running_example.suite")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("t1") && text.contains("returned(-1)"), "{text}");
    assert!(text.contains("returned(0)"), "{text}");
}

#[test]
fn reduce_ilp_on_fixture() {
    let o = regstrat(&["reduce", "--matrix", &path("fixtures/small_matrix.csv"), "--strategy", "ilp"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "t1,t3");
}

#[test]
fn testgen_return_goal_stops_at_two() {
    let o = regstrat(&["testgen", &path("fixtures/two_paths.mc"), "--goal", "return", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("test ")).count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain-exhausted"));
}

#[test]
fn mutate_list_names_all_operators() {
    let o = regstrat(&["mutate", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| !l.trim().is_empty()).count(), 15);
}

#[test]
fn experiment_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let o = regstrat(&[
        "experiment",
        "--history",
        &path("find_last"),
        "--all-strategies",
        "--seed",
        "1",
        "--jobs",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 145);
    assert!(text.lines().next().unwrap().starts_with("strategy,"));
    let r = regstrat(&["report", csv.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("rows: 144"));
}
