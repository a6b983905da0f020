//! End-to-end checks of the command-line interface: the exit-code contract,
//! output formats, the JSON envelope, byte determinism and the fixture
//! directory environment variable.

mod common;

use std::io::Write as _;
use std::process::Command;

use common::fixture_path;
use ontobpr::cli;

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<String> = std::iter::once("ontobpr".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let code = cli::run(&full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("stdout is UTF-8"),
        String::from_utf8(err).expect("stderr is UTF-8"),
    )
}

fn asis() -> String {
    fixture_path("barez-asis.demo").display().to_string()
}

fn tobe() -> String {
    fixture_path("barez-tobe.demo").display().to_string()
}

fn temp_model(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new().suffix(".demo").tempfile().unwrap();
    file.write_all(content.as_bytes()).unwrap();
    file.flush().unwrap();
    file
}

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

#[test]
fn exit_0_on_sound_fixture() {
    let (code, out, err) = run_cli(&["validate", &asis()]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.contains("0 errors, 1 warnings"), "{out}");
}

#[test]
fn exit_1_on_validation_errors() {
    // Parses fine, but the executor initiates its own transaction.
    let file = temp_model(
        "actor A01 \"One\" internal\nfact B-R01 \"f\"\n\
         transaction B-T01 \"T\" result B-R01 executor A01 initiators A01\n",
    );
    let path = file.path().display().to_string();
    let (code, out, _) = run_cli(&["validate", &path]);
    assert_eq!(code, 1);
    assert!(out.contains("SELF_INITIATION"), "{out}");

    // Downstream subcommands refuse the unsound model with the same code.
    let (code, out, err) = run_cli(&["trt", &path]);
    assert_eq!(code, 1);
    assert!(out.is_empty(), "artifact stream must stay clean: {out}");
    assert!(err.contains("SELF_INITIATION"), "{err}");
}

#[test]
fn exit_2_on_parse_failure() {
    let syntax = temp_model("actor A01 internal\n");
    let (code, out, err) = run_cli(&["validate", &syntax.path().display().to_string()]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("syntax error"), "{err}");

    let dangling = temp_model("use B-R99 at B-T01/ex\n");
    let (code, _, err) = run_cli(&["trt", &dangling.path().display().to_string()]);
    assert_eq!(code, 2);
    assert!(err.contains("reference error"), "{err}");
}

#[test]
fn exit_3_on_usage_errors() {
    let (code, _, err) = run_cli(&["validate", "/no/such/file.demo"]);
    assert_eq!(code, 3);
    assert!(err.contains("does not exist"), "{err}");

    let (code, _, _) = run_cli(&["frobnicate", &asis()]);
    assert_eq!(code, 3);

    let (code, _, err) = run_cli(&["select", &asis(), "--seed", "B-T05", "--policy", "nonsense"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown policy"), "{err}");

    let (code, _, err) = run_cli(&["trt", &asis(), "--format", "dot"]);
    assert_eq!(code, 3);
    assert!(err.contains("not supported"), "{err}");

    let (code, _, err) = run_cli(&["select", &asis(), "--seed", "B-T99"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown transaction"), "{err}");

    let (code, _, err) = run_cli(&[
        "simulate",
        &asis(),
        "--mode",
        "poisson",
        "--replications",
        "0",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("replications"), "{err}");
}

#[test]
fn help_is_success() {
    let (code, out, _) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

#[test]
fn compare_csv_reproduces_the_measured_sums() {
    let (code, out, _) = run_cli(&["compare", &asis(), &tobe(), "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "Function,AS-IS Cost,AS-IS Time,To-Be Cost,To-Be Time"
    );
    assert!(
        lines.contains(&"Sum,1049.941,4566.8,617.23,2654.4"),
        "{out}"
    );
    assert_eq!(
        *lines.last().unwrap(),
        "cost_reduction_pct=41.2 time_reduction_pct=41.9"
    );
}

#[test]
fn select_reports_the_accounting_transaction() {
    let (code, out, _) = run_cli(&["select", &asis(), "--seed", "B-T05,B-T08"]);
    assert_eq!(code, 0);
    assert!(out.contains("added: B-T02"), "{out}");
}

#[test]
fn graph_dot_counts_fixture_nodes() {
    let (code, out, _) = run_cli(&["graph", &asis(), "--kind", "ocd"]);
    assert_eq!(code, 0);
    // 6 actors + 7 transactions + 4 banks.
    let node_lines = out.lines().filter(|l| l.contains("[shape=")).count();
    assert_eq!(node_lines, 17, "{out}");
    assert!(out.contains("style=dashed"));
    assert!(out.contains("shape=circle"));

    // The interaction diagram drops banks and their edges.
    let (code, atd, _) = run_cli(&["graph", &asis(), "--kind", "atd"]);
    assert_eq!(code, 0);
    let atd_nodes = atd.lines().filter(|l| l.contains("[shape=")).count();
    assert_eq!(atd_nodes, 13);
    assert!(!atd.contains("access"));
}

#[test]
fn markdown_output_renders_a_pipe_table() {
    let (code, out, _) = run_cli(&["trt", &asis(), "--format", "markdown"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("| transaction | name | result | statement |"));
    assert!(out.contains("| B-T05 | Selling | B-R02 |"), "{out}");
    assert_eq!(out.lines().count(), 2 + 7, "header, separator, 7 rows");
}

#[test]
fn diff_shows_the_checking_the_customer_cost_delta() {
    let (code, out, _) = run_cli(&["diff", &asis(), &tobe()]);
    assert_eq!(code, 0);
    let delta_line = out
        .lines()
        .find(|l| l.contains("metrics B-T02/rq"))
        .unwrap_or_else(|| panic!("no delta for B-T02/rq in:\n{out}"));
    assert!(delta_line.contains("cost: 20 -> 10"), "{delta_line}");
    assert!(out.contains("transaction B-T09"), "{out}");
}

#[test]
fn simulate_analytic_table_has_sum_row() {
    let (code, out, _) = run_cli(&["simulate", &asis()]);
    assert_eq!(code, 0);
    let sum = out.lines().find(|l| l.starts_with("Sum")).unwrap();
    assert!(sum.contains("1049.941") && sum.contains("4566.8"), "{sum}");
}

#[test]
fn warnings_go_to_stderr_not_stdout() {
    let (code, out, err) = run_cli(&["simulate", &asis(), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
    assert!(!out.contains("warning"), "{out}");
}

// ---------------------------------------------------------------------------
// JSON envelope
// ---------------------------------------------------------------------------

#[test]
fn every_subcommand_speaks_json_with_the_envelope() {
    let a = asis();
    let b = tobe();
    let invocations: Vec<(Vec<&str>, &str)> = vec![
        (vec!["validate", &a], "validate"),
        (vec!["trt", &a], "trt"),
        (vec!["boundary", &a], "boundary"),
        (vec!["graph", &a], "graph"),
        (vec!["load", &a], "load"),
        (vec!["select", &a, "--seed", "B-T05,B-T08"], "select"),
        (vec!["simulate", &a], "simulate"),
        (vec!["compare", &a, &b], "compare"),
        (vec!["diff", &a, &b], "diff"),
    ];
    for (mut args, subcommand) in invocations {
        args.extend(["--format", "json"]);
        let (code, out, err) = run_cli(&args);
        assert_eq!(code, 0, "{subcommand}: {err}");
        let value: serde_json::Value =
            serde_json::from_str(&out).unwrap_or_else(|e| panic!("{subcommand}: {e}\n{out}"));
        assert_eq!(value["subcommand"], subcommand);
        assert_eq!(value["tool_version"], env!("CARGO_PKG_VERSION"));
        assert!(!value["data"].is_null(), "{subcommand} data missing");
    }
}

#[test]
fn compare_json_carries_exact_sums_and_rounded_reductions() {
    let (code, out, _) = run_cli(&["compare", &asis(), &tobe(), "--format", "json"]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    let sum = &value["data"]["sum"];
    assert_eq!(sum["asis_cost"], "1049.941");
    assert_eq!(sum["asis_time"], "4566.8");
    assert_eq!(sum["tobe_cost"], "617.23");
    assert_eq!(sum["tobe_time"], "2654.4");
    assert_eq!(value["data"]["cost_reduction_pct"], "41.2");
    assert_eq!(value["data"]["time_reduction_pct"], "41.9");
}

// ---------------------------------------------------------------------------
// Determinism
// ---------------------------------------------------------------------------

#[test]
fn output_is_byte_deterministic_across_runs() {
    for args in [
        vec!["compare", &asis(), &tobe(), "--format", "csv"],
        vec!["graph", &asis(), "--format", "json"],
        vec![
            "simulate",
            &asis(),
            "--mode",
            "poisson",
            "--months",
            "1",
            "--format",
            "json",
        ],
        vec!["select", &asis(), "--seed", "B-T05", "--format", "json"],
    ] {
        let first = run_cli(&args);
        let second = run_cli(&args);
        assert_eq!(first, second, "non-deterministic output for {args:?}");
    }
}

#[test]
fn poisson_seeds_change_results_but_stay_reproducible() {
    let input = asis();
    let base = vec![
        "simulate",
        input.as_str(),
        "--mode",
        "poisson",
        "--months",
        "1",
        "--format",
        "csv",
    ];
    let (code_a, out_a, _) = run_cli(&base);
    let mut seeded = base.clone();
    seeded.extend(["--seed", "99"]);
    let (code_b, out_b, _) = run_cli(&seeded);
    assert_eq!((code_a, code_b), (0, 0));
    assert_ne!(out_a, out_b, "different seeds should move the averages");
    let (_, out_b2, _) = run_cli(&seeded);
    assert_eq!(out_b, out_b2);
}

// ---------------------------------------------------------------------------
// Configuration file and environment variable
// ---------------------------------------------------------------------------

#[test]
fn config_file_is_read_and_flags_win() {
    let mut config = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    writeln!(
        config,
        "months = 1\nreplications = 2\nseed = 5\narrival_model = \"poisson\""
    )
    .unwrap();
    config.flush().unwrap();
    let config_path = config.path().display().to_string();

    let (code, out, _) = run_cli(&[
        "simulate",
        &asis(),
        "--mode",
        "poisson",
        "--config",
        &config_path,
        "--months",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    let echoed = &value["data"]["config"];
    assert_eq!(echoed["months"], 2, "flag overrides file");
    assert_eq!(echoed["replications"], 2, "file value survives");
    assert_eq!(echoed["seed"], 5);
    assert_eq!(echoed["arrival_model"], "poisson");
}

#[test]
fn fixture_directory_env_var_resolves_bare_names() {
    let fixtures_dir = fixture_path("").display().to_string();
    let scratch = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_ontobpr"))
        .args(["validate", "barez-asis.demo"])
        .env(cli::FIXTURE_DIR_ENV, &fixtures_dir)
        .current_dir(scratch.path())
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let missing = Command::new(env!("CARGO_BIN_EXE_ontobpr"))
        .args(["validate", "barez-asis.demo"])
        .env_remove(cli::FIXTURE_DIR_ENV)
        .current_dir(scratch.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));
}
