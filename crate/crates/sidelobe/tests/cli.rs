//! End-to-end tests of the `sidelobe` binary: output schemas, exit codes,
//! and experiment-record behaviour.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sidelobe"))
}

fn temp_record_file(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sidelobe-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join("records.jsonl")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn psl_of_barker_13() {
    let output = bin().args(["psl", "+++++--++-+-+"]).output().unwrap();
    assert!(output.status.success());
    assert_eq!(stdout(&output), "line,n,psl\n1,13,1\n");
}

#[test]
fn psl_reads_files_and_multiple_lines() {
    let dir = std::env::temp_dir().join(format!("sidelobe-psl-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seqs.txt");
    std::fs::write(&path, "++++\n+-+-\n").unwrap();
    let output = bin().args(["psl", "--file", path.to_str().unwrap()]).output().unwrap();
    assert!(output.status.success());
    assert_eq!(stdout(&output), "line,n,psl\n1,4,3\n2,4,3\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn psl_spectrum_csv() {
    let output = bin().args(["psl", "--spectrum", "+++"]).output().unwrap();
    assert!(output.status.success());
    assert_eq!(stdout(&output), "line,k,c_k\n1,0,3\n1,1,2\n1,2,1\n");
}

#[test]
fn psl_parse_error_names_line_and_column() {
    let output = bin().args(["psl", "+x+"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("line 1"), "{err}");
    assert!(err.contains("column 2"), "{err}");
}

#[test]
fn table_matches_rendered_values() {
    let output = bin()
        .args(["table", "--from", "1000", "--to", "3000", "--step", "1000"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(
        stdout(&output),
        "n,sqrt_2nlogn,cor4_bound\n1000,117.54,108.05\n2000,174.37,160.43\n3000,219.18,201.81\n"
    );
}

#[test]
fn table_usage_errors_exit_1() {
    for args in [
        vec!["table", "--from", "100", "--to", "50"],
        vec!["table", "--from", "1000", "--to", "2000", "--step", "0"],
        vec!["table", "--from", "2", "--to", "10"],
        vec!["table", "--unknown-flag"],
    ] {
        let output = bin().args(&args).output().unwrap();
        assert_eq!(output.status.code(), Some(1), "args {args:?}: {}", stderr(&output));
    }
}

#[test]
fn help_and_version_exit_0() {
    assert!(bin().arg("--help").output().unwrap().status.success());
    assert!(bin().arg("--version").output().unwrap().status.success());
    assert!(bin().args(["verify", "--help"]).output().unwrap().status.success());
}

#[test]
fn bounds_eval_schema() {
    let output = bin().args(["bounds", "eval", "--kind", "cor4", "--n", "2000"]).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    let object = value.as_object().unwrap();
    assert_eq!(object.len(), 4);
    assert_eq!(object["n"], 2000);
    let threshold = object["threshold"].as_f64().unwrap();
    assert!((threshold - 160.43).abs() < 0.005);
    assert!(object["psi"].as_f64().unwrap() > 0.0);
    assert!(object["proportion_bound"].as_f64().unwrap() < 1.0);
    // cor2 without epsilon is a usage error.
    let output = bin().args(["bounds", "eval", "--kind", "cor2", "--n", "100"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    // custom requires --psi.
    let output = bin().args(["bounds", "eval", "--kind", "custom", "--n", "100"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn mc_exceed_emits_json_and_appends_one_record() {
    let record = temp_record_file("mc-exceed");
    let run = || {
        bin()
            .args([
                "mc", "exceed", "--n", "32", "--trials", "2000", "--seed", "11", "--threshold",
                "10", "--workers", "2", "--record-file",
            ])
            .arg(&record)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert_eq!(value["config"]["n"], 32);
    assert_eq!(value["config"]["seed"], 11);
    assert!(value["ci99_low"].as_f64().unwrap() <= value["proportion"].as_f64().unwrap());
    assert!(value["proportion"].as_f64().unwrap() <= value["ci99_high"].as_f64().unwrap());
    // Replay: same command, byte-identical stdout, one more record line.
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    let content = std::fs::read_to_string(&record).unwrap();
    let lines: Vec<&str> = content.lines().collect();
    assert_eq!(lines.len(), 2);
    let first_record: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    let second_record: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(first_record["outputs"], second_record["outputs"]);
    assert_eq!(first_record["schema_version"], 1);
    assert!(first_record["command"].as_array().unwrap().len() >= 10);
}

#[test]
fn mc_exceed_generates_and_echoes_seed_when_missing() {
    let record = temp_record_file("mc-seed");
    let output = bin()
        .args(["mc", "exceed", "--n", "16", "--trials", "100", "--threshold", "5", "--record-file"])
        .arg(&record)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stderr(&output).contains("seed:"), "{}", stderr(&output));
}

#[test]
fn mc_hist_csv_and_interval_fractions() {
    let record = temp_record_file("mc-hist");
    let output = bin()
        .args([
            "mc", "hist", "--n", "64", "--trials", "1000", "--seed", "3", "--workers", "2",
            "--interval-epsilon", "0.3,0.6", "--record-file",
        ])
        .arg(&record)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mu,count"));
    let mut total = 0u64;
    for line in lines {
        let (mu, count) = line.split_once(',').unwrap();
        assert!(mu.parse::<u64>().unwrap() >= 1);
        total += count.parse::<u64>().unwrap();
    }
    assert_eq!(total, 1000);
    assert!(stderr(&output).contains("in-interval fraction"));
    let content = std::fs::read_to_string(&record).unwrap();
    let record_value: serde_json::Value = serde_json::from_str(content.lines().next().unwrap()).unwrap();
    assert!(record_value["outputs"]["interval_fractions"].is_object());
}

#[test]
fn exact_exceed_reports_rational_proportion() {
    let record = temp_record_file("exact-exceed");
    let output = bin()
        .args(["exact", "exceed", "--n", "4", "--threshold", "2.5", "--record-file"])
        .arg(&record)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    assert_eq!(value["count"], 4);
    assert_eq!(value["denominator"], 16);
    assert_eq!(value["rational"], "4/16");
    assert_eq!(value["proportion"], 0.25);
}

#[test]
fn exact_mumin_json_and_resource_guard() {
    let record = temp_record_file("exact-mumin");
    let output = bin()
        .args(["exact", "mumin", "--n", "13", "--prune", "--record-file"])
        .arg(&record)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    assert_eq!(value["mu_min"], 1);
    let witness = value["witness"].as_str().unwrap();
    assert_eq!(witness.len(), 13);
    assert!(witness.chars().all(|c| c == '+' || c == '-'));
    // Desk-scale guard: n = 22 plain needs --force.
    let output = bin().args(["exact", "mumin", "--n", "22"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("--force"));
    // Library cap cannot be forced away.
    let output = bin().args(["exact", "mumin", "--n", "29", "--prune", "--force"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn verify_suites_pass_and_record() {
    let record = temp_record_file("verify");
    for args in [
        vec!["verify", "fact", "--K", "0.862"],
        vec!["verify", "cor4-const"],
        vec!["verify", "independence", "--n-max", "8"],
        vec!["verify", "union-bound", "--n", "10"],
        vec!["verify", "chernoff", "--k-max", "12"],
        vec![
            "verify", "chernoff", "--k-max", "8", "--trials", "20000", "--k", "100", "--lambda",
            "30", "--seed", "5150",
        ],
        vec!["verify", "prop1-exact", "--n-min", "2", "--n-max", "10"],
        vec![
            "verify", "prop1-mc", "--n", "64", "--kind", "cor4", "--trials", "5000", "--seed",
            "42",
        ],
    ] {
        let output = bin().args(&args).arg("--record-file").arg(&record).output().unwrap();
        assert_eq!(output.status.code(), Some(0), "args {args:?}: {}", stderr(&output));
        let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
        assert_eq!(value["pass"], true, "args {args:?}");
        assert!(stderr(&output).contains("PASS"));
    }
    let content = std::fs::read_to_string(&record).unwrap();
    assert_eq!(content.lines().count(), 8);
}

#[test]
fn verify_fact_example_reports_minimum() {
    let record = temp_record_file("verify-fact");
    let output = bin()
        .args(["verify", "fact", "--K", "0.862", "--record-file"])
        .arg(&record)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    let minimum = value["near_minimizer"]["grid_min"].as_f64().unwrap();
    assert!((minimum - (-0.15536159624506228)).abs() < 1e-9);
}

#[test]
fn verify_cor4_const_prints_margin() {
    let output = bin().args(["verify", "cor4-const", "--record-file", "/dev/null"]).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    let margin = value["report"]["margin"].as_f64().unwrap();
    assert!(margin > 2.00001);
    assert!((margin - 2.0000123033956086).abs() < 1e-12);
}

#[test]
fn record_file_env_variable_is_honored() {
    let record = temp_record_file("env");
    let output = bin()
        .args(["exact", "exceed", "--n", "4", "--threshold", "0.5"])
        .env("SIDELOBE_RECORD_FILE", &record)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(record.exists());
}

#[test]
fn full_precision_flag_changes_table_rendering() {
    let output = bin()
        .args(["table", "--from", "1000", "--to", "1000", "--full-precision"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("1000,117.539400"), "{row}");
}
