use std::process::{Command, Output};

fn pellgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pellgraph"))
        .args(args)
        .env_remove("PELLGRAPH_BUILD_LIMIT")
        .env_remove("PELLGRAPH_THREADS")
        .env_remove("PELLGRAPH_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_irr_entry_for_pi2() {
    let o = pellgraph(&["verify", "--max-n", "3", "--checks", "irr"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "entry,irr,2,,,4,4,true"));
}

#[test]
fn verify_smallest_report_passes() {
    let o = pellgraph(&["verify", "--max-n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("0 failed"));
}

#[test]
fn verify_records_both_convolution_forms() {
    let o = pellgraph(&[
        "verify",
        "--max-n",
        "10",
        "--checks",
        "convolution",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let proof = lines
        .iter()
        .find(|v| v["kind"] == "entry" && v["n"] == 4)
        .unwrap();
    assert_eq!(
        (proof["expected"].as_u64(), proof["actual"].as_u64()),
        (Some(1), Some(1))
    );
    let shown = lines
        .iter()
        .find(|v| v["kind"] == "observation" && v["n"] == 4)
        .unwrap();
    assert_eq!(
        (shown["actual"].as_u64(), shown["expected"].as_u64()),
        (Some(29), Some(1))
    );
    assert_eq!(shown["matches"], false);
    assert_eq!(lines.last().unwrap()["kind"], "summary");
}

#[test]
fn expansion_check_reports_the_theorem_mismatches() {
    let o = pellgraph(&["verify", "--checks", "expansion", "--max-n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out
        .lines()
        .any(|l| l.starts_with("entry,expansion-theorem,") && l.ends_with(",false")));
    assert!(!out
        .lines()
        .any(|l| l.starts_with("entry,expansion-exact,") && l.ends_with(",false")));
}

#[test]
fn graph_examples() {
    let o = pellgraph(&["graph", "--n", "1", "--emit", "edges", "--labels"]);
    assert_eq!(stdout(&o), "0 1\n");
    let o = pellgraph(&["graph", "--n", "2", "--emit", "edges"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn classify_example() {
    let o = pellgraph(&["classify", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("u,v,kind,site,predicted,measured"));
    assert!(out.lines().any(|l| l == "11,22,swap,0,2,2"));
}

#[test]
fn table_examples() {
    let o = pellgraph(&["table", "--stat", "edges", "--max-n", "4"]);
    assert_eq!(stdout(&o).lines().last(), Some("4,58"));
    let o = pellgraph(&["table", "--stat", "irr", "--max-n", "4"]);
    assert_eq!(stdout(&o).lines().last(), Some("4,64"));
    let o = pellgraph(&["table", "--stat", "e", "--max-n", "4"]);
    assert!(stdout(&o).lines().any(|l| l == "4,2,11"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["verify", "--max-n", "7", "--format", "json"][..],
        &[
            "verify",
            "--max-n",
            "2",
            "--checks",
            "expansion",
            "--seed",
            "9",
        ][..],
        &["classify", "--n", "6", "--format", "json"][..],
        &["graph", "--n", "5", "--emit", "adjacency", "--labels"][..],
    ] {
        let a = pellgraph(args);
        let b = pellgraph(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let one = pellgraph(&["--threads", "1", "verify", "--max-n", "8"]);
    let four = pellgraph(&["--threads", "4", "verify", "--max-n", "8"]);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--checks", "nonsense"][..],
        &["verify", "--max-n", "0"][..],
        &["verify", "--max-n", "17"][..],
        &["table", "--stat", "bogus"][..],
        &["table", "--stat", "e", "--max-n", "61"][..],
        &["graph", "--n", "-1"][..],
        &["graph", "--n", "3", "--labels", "--indices"][..],
        &["--build-limit", "4", "classify", "--n", "5"][..],
        &[][..],
    ] {
        assert_eq!(pellgraph(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn env_overrides_apply() {
    let o = Command::new(env!("CARGO_BIN_EXE_pellgraph"))
        .args(["graph", "--n", "5"])
        .env("PELLGRAPH_BUILD_LIMIT", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
