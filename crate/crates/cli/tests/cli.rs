use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use onebit_core::rational::ratio;
use onebit_core::{measurement_budget, BudgetQuery, Goal, SignalClass};

fn onebit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn budget_prints_one_integer() {
    let o = onebit(&["budget", "--goal", "superset", "--class", "general", "--n", "10000", "--k", "4", "--eps", "1/4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expected = measurement_budget(&BudgetQuery::new(Goal::Superset, SignalClass::General, 10_000, 4, ratio(1, 4))).unwrap();
    assert_eq!(stdout(&o), format!("{expected}\n"));
}

#[test]
fn budget_reports_unsupported_queries() {
    let o = onebit(&["budget", "--goal", "exact", "--class", "general", "--n", "100", "--k", "4", "--eps", "1/4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: unsupported"));
}

#[test]
fn usage_error_prints_synopsis() {
    let o = onebit(&["measure", "--matrix", "a.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage: onebit measure"));
    let o = onebit(&[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_names_the_violating_pair() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.txt");
    // Three columns sharing one row: column 2 is covered by column 1.
    fs::write(
        &bad,
        "design m=1 n=3 d=1 property=list-disjunct k=1 l=1 alpha=- status=certified seed=-\n1\n1\n1\n",
    )
    .unwrap();
    let o = onebit(&["verify", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "violation of list-disjunct k=1 l=1: S={2} T={1}\n");

    let good = path(dir.path(), "good.txt");
    let o = onebit(&["construct", "design", "--property", "list-disjunct", "--n", "10", "--k", "2", "--seed", "4", "-o", &good]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = onebit(&["verify", &good]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "certified list-disjunct k=2 l=1\n");
    // A stronger claim than the design supports fails.
    let o = onebit(&["verify", &good, "--k", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("violation of list-disjunct k=6 l=1: S={"));
}

#[test]
fn union_free_design_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "uf.txt");
    let o = onebit(&[
        "construct", "design", "--property", "list-union-free", "--n", "12", "--k", "2", "--target-m", "300", "--seed", "7", "-o", &file,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = onebit(&["verify", &file]);
    assert_eq!(stdout(&o), "certified list-union-free k=2 l=1\n");
}

#[test]
fn construct_measure_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (a, x, y) = (path(dir.path(), "a.txt"), path(dir.path(), "x.txt"), path(dir.path(), "y.txt"));
    let o = onebit(&["construct", "matrix", "--regime", "thm3", "--n", "12", "--k", "2", "--eps", "1", "--seed", "5", "-o", &a]);
    assert!(o.status.success(), "{}", stderr(&o));
    fs::write(&x, "signal n=12\n3 -2\n9 1/2\n").unwrap();
    let o = onebit(&["measure", "--matrix", &a, "--signal", &x, "-o", &y]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = onebit(&["decode", "--matrix", &a, "--measurement", &y, "--k", "2", "--eps", "1", "--signal", &x]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let returned: Vec<usize> = out.lines().next().unwrap()["returned".len()..]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert!(returned.contains(&3) && returned.contains(&9));
    assert!(returned.len() <= 4);
    let row = out.lines().last().unwrap();
    assert!(row.starts_with("thm3,12,"));
    assert!(row.ends_with(",0,1"), "{row}");

    let o = onebit(&["decode", "--matrix", &a, "--measurement", &y, "--k", "2", "--eps", "1", "--approximate"]);
    assert!(o.status.success());
    assert!(stdout(&o).split_whitespace().count() <= 3);

    // Wrong k for the matrix is rejected.
    let o = onebit(&["decode", "--matrix", &a, "--measurement", &y, "--k", "3", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gaussian_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (a, x, y) = (path(dir.path(), "a.txt"), path(dir.path(), "x.txt"), path(dir.path(), "y.txt"));
    let o = onebit(&["construct", "matrix", "--regime", "gaussian", "--n", "6", "--k", "2", "--eps", "1/2", "--m", "40", "--seed", "1", "-o", &a]);
    assert!(o.status.success(), "{}", stderr(&o));
    fs::write(&x, "signal n=6\n2 1\n5 -3/2\n").unwrap();
    let o = onebit(&["measure", "--matrix", &a, "--signal", &x, "--mode", "strict", "-o", &y]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = onebit(&["decode", "--matrix", &a, "--measurement", &y, "--mode", "strict", "--k", "2", "--eps", "1/2", "--eta", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = onebit(&["decode", "--matrix", &a, "--measurement", &y, "--mode", "strict", "--k", "2", "--eps", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--eta"));
}

#[test]
fn adversary_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let weak = path(dir.path(), "weak.txt");
    fs::write(&weak, "matrix regime=thm1 n=4 m=1 params=1,1/1 seed=-\nB 1 2 3 4\n").unwrap();
    let o = onebit(&["adversary", "--matrix", &weak, "--k", "2", "--eps", "1/4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.matches("signal n=4").count(), 2);

    let id = path(dir.path(), "id.txt");
    fs::write(&id, "matrix regime=thm1 n=3 m=3 params=1,1/4 seed=-\nB 1\nB 2\nB 3\n").unwrap();
    let o = onebit(&["adversary", "--matrix", &id, "--k", "1", "--eps", "1/4"]);
    assert_eq!(stdout(&o), "none\n");
}

#[test]
fn experiment_writes_csv_with_summary_last() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    let out = path(dir.path(), "run.csv");
    fs::write(
        &cfg,
        "regime = thm1\nn = 12\nk = 2\neps = 1\nvalues = 1, -1, 2, -2, 1/2, -1/2\ntrials = exhaustive\ninclude_zero = true\nseed = 3\n",
    )
    .unwrap();
    let o = onebit(&["experiment", &cfg, "-o", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("# summary goal=approximate trials=2449 "), "{last}");
    assert!(last.ends_with("approximate_violations=0"));

    let o = onebit(&["experiment", &cfg]);
    assert_eq!(stdout(&o), csv);
}

#[test]
fn bad_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bad.cfg");
    fs::write(&cfg, "regime = thm1\nn = 12\n").unwrap();
    let o = onebit(&["experiment", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: parsing config"));
    let o = onebit(&["verify", &path(dir.path(), "missing.txt")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.txt"));
}
