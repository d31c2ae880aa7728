//! End-to-end tests of the qsearch binary: argument handling, exit codes,
//! CSV shape, and byte-level determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsearch"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout should be UTF-8")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qsearch-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn plan_prints_expected_schedule() {
    let output = qsearch(&["plan", "--n", "1024", "--eps", "0.01"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("sweep ceiling t0:        5"), "{text}");
    assert!(text.contains("part 2 runs:             10"), "{text}");
    // Machine-readable row carries the same numbers.
    assert!(
        text.lines()
            .any(|l| l.starts_with("1024,") && l.contains(",5,false,10,")),
        "{text}"
    );
}

#[test]
fn plan_switches_to_certainty_schedules_below_threshold() {
    let output = qsearch(&["plan", "--n", "16", "--eps", "0.001"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("certainty schedules"), "{text}");
    assert!(
        text.lines()
            .any(|l| l.starts_with("16,") && l.contains(",true,")),
        "{text}"
    );
}

#[test]
fn plan_with_huge_tolerance_keeps_one_hypothesis() {
    let output = qsearch(&["plan", "--n", "1024", "--eps", "0.999"]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("sweep ceiling t0:        1"));
}

#[test]
fn run_is_byte_identical_across_reruns() {
    let path_a = temp_path("rerun-a.csv");
    let path_b = temp_path("rerun-b.csv");
    let args = |path: &PathBuf| {
        vec![
            "run".to_string(),
            "--algo".into(),
            "improved".into(),
            "--n".into(),
            "256".into(),
            "--t".into(),
            "0,1,7,256".into(),
            "--eps".into(),
            "0.05".into(),
            "--trials".into(),
            "200".into(),
            "--seed".into(),
            "99".into(),
            "--out".into(),
            path.display().to_string(),
        ]
    };
    let run = |path: &PathBuf| {
        let arg_strings = args(path);
        let arg_refs: Vec<&str> = arg_strings.iter().map(String::as_str).collect();
        let output = qsearch(&arg_refs);
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    run(&path_a);
    run(&path_b);
    let a = fs::read(&path_a).unwrap();
    let b = fs::read(&path_b).unwrap();
    let _ = fs::remove_file(&path_a);
    let _ = fs::remove_file(&path_b);
    assert_eq!(a, b, "reruns with the same seed must be byte-identical");
}

#[test]
fn run_rows_are_sorted_and_well_formed() {
    let output = qsearch(&[
        "run", "--algo", "simple", "--n", "64", "--t", "64,0,3", "--eps", "0.1", "--trials", "100",
        "--seed", "5",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# qsearch run algo=simple"));
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,n,t,eps,trials,seed,failures,false_positives,failure_rate,\
         mean_queries,mean_iteration_queries,max_queries"
    );
    let ts: Vec<u64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ts, vec![0, 3, 64]);
    // A failure tolerance of 0.1 over 100 trials of an easy instance: the
    // t = 64 row must have found a marked element every time.
    let last = text.lines().last().unwrap();
    assert!(last.contains(",0,0,0.000"), "{last}");
}

#[test]
fn run_expands_worst_values() {
    let output = qsearch(&[
        "run", "--algo", "improved", "--n", "1024", "--t", "worst", "--eps", "0.05", "--trials",
        "50", "--seed", "3",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = stdout_of(&output);
    // t = 1 and at least two adversarial values from the scan.
    assert!(
        text.lines().filter(|l| l.starts_with("improved,")).count() >= 3,
        "{text}"
    );
}

#[test]
fn curves_success_vs_iterations_hits_known_values() {
    let output = qsearch(&[
        "curves",
        "success-vs-n",
        "--n",
        "4",
        "--t",
        "1",
        "--max-iters",
        "2",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut rows = text.lines().skip(2).map(|l| {
        let mut parts = l.split(',');
        let n: u64 = parts.next().unwrap().parse().unwrap();
        let p: f64 = parts.next().unwrap().parse().unwrap();
        (n, p)
    });
    let (n0, p0) = rows.next().unwrap();
    let (n1, p1) = rows.next().unwrap();
    assert_eq!((n0, n1), (0, 1));
    assert!((p0 - 0.25).abs() < 1e-12);
    assert!((p1 - 1.0).abs() < 1e-12);
}

#[test]
fn curves_p_vs_theta_spans_zero_to_one() {
    let output = qsearch(&["curves", "p-vs-theta", "--k", "7", "--samples", "200"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let ps: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ps.len(), 200);
    assert!(ps.first().unwrap() < &0.01);
    assert!(ps.last().unwrap() > &0.99);
}

#[test]
fn analyze_prints_limit_constants() {
    let output = qsearch(&["analyze"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("0.4358127"), "{text}");
    assert!(text.contains("0.3913831"), "{text}");
}

#[test]
fn argument_errors_exit_with_code_two() {
    for args in [
        vec!["plan", "--n", "64", "--eps", "1.5"],
        vec![
            "run", "--algo", "simple", "--n", "64", "--t", "65", "--eps", "0.1",
        ],
        vec![
            "run", "--algo", "simple", "--n", "64", "--t", "abc", "--eps", "0.1",
        ],
        vec!["curves", "no-such-kind"],
        vec!["analyze", "--n", "64", "--t0", "0"],
    ] {
        let output = qsearch(&args);
        assert_eq!(output.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn unwritable_output_path_is_a_runtime_error() {
    let output = qsearch(&[
        "run",
        "--algo",
        "classical",
        "--n",
        "4",
        "--t",
        "1",
        "--eps",
        "0.1",
        "--trials",
        "5",
        "--out",
        "/nonexistent-dir/report.csv",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("/nonexistent-dir/report.csv"), "{stderr}");
}

#[test]
fn help_documents_the_seeding_scheme() {
    let output = qsearch(&["--help"]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("splitmix64"));
}
