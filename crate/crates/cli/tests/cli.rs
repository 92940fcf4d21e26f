//! CLI behavior: flags, formats, exit codes, config merging, audit files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hamvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamvol"))
        .args(args)
        .output()
        .expect("running hamvol")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hamvol_cli_{name}"))
}

#[test]
fn analytic_rel_vol_prints_the_expected_value() {
    let out = hamvol(&["analytic", "--rel-vol", "--N", "2", "--eps", "0.01"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = report["results"][0]["value"].as_f64().unwrap();
    assert!((value - 1.591_55e-3).abs() < 1e-7, "value = {value}");
    assert_eq!(report["command"], "analytic");
    assert!(report["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn analytic_fig1_csv_has_one_column_per_dimension() {
    let out = hamvol(&[
        "analytic",
        "--fig1",
        "--N",
        "20,40,60,80,100",
        "--eps",
        "1e-14..1e-4",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "epsilon,log10_rel_vol_N20,log10_rel_vol_N40,log10_rel_vol_N60,log10_rel_vol_N80,log10_rel_vol_N100"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25, "default range grid has 25 points");
    for row in rows {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn analytic_ti_bound_emits_a_log_value_row() {
    let out = hamvol(&[
        "analytic",
        "--ti-bound",
        "--d",
        "2",
        "--t",
        "2",
        "--n",
        "3",
        "--M",
        "2",
        "--k",
        "1",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &report["results"][0];
    assert_eq!(row["quantity"], "ti_bound");
    assert!(row["ln_abs"].as_f64().unwrap().is_finite());
}

#[test]
fn analytic_requires_exactly_one_mode() {
    let none = hamvol(&["analytic", "--N", "2"]);
    assert_eq!(none.status.code(), Some(2));
    let two = hamvol(&[
        "analytic",
        "--total-vol",
        "--rel-vol",
        "--N",
        "2",
        "--eps",
        "0.1",
    ]);
    assert_eq!(two.status.code(), Some(2));
    let stderr = String::from_utf8(two.stderr).unwrap();
    assert!(stderr.contains("exactly one"), "stderr: {stderr}");
}

#[test]
fn usage_errors_name_the_offending_field() {
    let out = hamvol(&["analytic", "--rel-vol", "--N", "1", "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("dim"), "stderr: {stderr}");

    let out = hamvol(&["mc", "--N", "3", "--eps", "0.5,0.2", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_csv_schema_is_stable() {
    let out = hamvol(&[
        "mc",
        "--N",
        "2",
        "--trials",
        "500",
        "--eps",
        "0.1,0.5",
        "--criterion",
        "overlap",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("epsilon,hits,trials,estimate,ci_low,ci_high\n"));
    assert_eq!(text.lines().count(), 3);

    let out = hamvol(&[
        "mc",
        "--N",
        "2",
        "--trials",
        "500",
        "--eps",
        "0.1,0.5",
        "--criterion",
        "overlap",
        "--seed",
        "3",
        "--compare",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("epsilon,mc_estimate,ci_low,ci_high,closed_form,haar_tail\n"));
}

#[test]
fn mc_dump_writes_a_readable_audit_file() {
    let dump = tmp("dump.bin");
    let out = hamvol(&[
        "mc",
        "--N",
        "3",
        "--trials",
        "200",
        "--eps",
        "0.2",
        "--seed",
        "8",
        "--dump",
        dump.to_str().unwrap(),
        "--dump-count",
        "64",
    ]);
    assert!(out.status.success());
    let file = std::fs::File::open(&dump).unwrap();
    let (dim, records) = hamvol_core::ensembles::audit::read_records(file).unwrap();
    assert_eq!(dim, 3);
    assert_eq!(records.len(), 64);
    let expected_hash =
        hamvol_core::EnsembleSpec::new(3, 1.0, hamvol_core::ScalarField::Complex, 8)
            .unwrap()
            .spec_hash();
    for (i, rec) in records.iter().enumerate() {
        assert_eq!(rec.spec_hash, expected_hash);
        assert_eq!(rec.stream_index, i as u64);
        assert!(rec.eigenvalues.windows(2).all(|w| w[0] < w[1]));
        assert!(rec.eigenvalues[0] > 0.0);
    }
}

#[test]
fn ising_multi_length_report_orders_fitted_alpha() {
    let out = hamvol(&[
        "ising", "--n", "4,6", "--trials", "3000", "--seed", "14",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let runs = report["results"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    let alpha4 = runs[0]["fit"]["alpha"].as_f64().unwrap();
    let alpha6 = runs[1]["fit"]["alpha"].as_f64().unwrap();
    assert!(
        alpha4 < alpha6,
        "fitted alpha should grow with the chain length: {alpha4} vs {alpha6}"
    );
}

#[test]
fn ising_uniform_interval_hits_everything() {
    let out = hamvol(&[
        "ising",
        "--n",
        "4",
        "--jmin",
        "1",
        "--jmax",
        "1",
        "--trials",
        "100",
        "--eps",
        "0.05,0.5,1.0",
        "--seed",
        "2",
        "--no-fit",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let hits = report["results"]["runs"][0]["curve"]["hits"]
        .as_array()
        .unwrap();
    assert!(hits.iter().all(|h| h.as_u64().unwrap() == 100));
}

#[test]
fn ising_coupling_log_aligns_with_the_curve() {
    let log_base = tmp("couplings.csv");
    let out = hamvol(&[
        "ising",
        "--n",
        "3",
        "--trials",
        "50",
        "--eps",
        "0.1,1.0",
        "--seed",
        "6",
        "--no-fit",
        "--log-couplings",
        log_base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let log_path = log_base.with_file_name("hamvol_cli_couplings.n3.csv");
    let text = std::fs::read_to_string(&log_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "trial,J1,J2,J3,fidelity,degenerate");
    assert_eq!(lines.count(), 50);
}

#[test]
fn fit_subcommand_reads_saved_reports() {
    let report_path = tmp("fit_input.json");
    let out = hamvol(&[
        "ising",
        "--n",
        "4",
        "--trials",
        "5000",
        "--seed",
        "12",
        "--no-fit",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = hamvol(&["fit", "--input", report_path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let alpha = report["results"]["alpha"].as_f64().unwrap();
    let beta = report["results"]["beta"].as_f64().unwrap();
    assert!(alpha > 0.0 && beta > 0.0);
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let cfg = tmp("config.txt");
    std::fs::write(
        &cfg,
        "N=2\ntrials=300\neps=0.1,0.5\ncriterion=overlap\nseed=5\n",
    )
    .unwrap();
    let from_file = hamvol(&["mc", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    let report: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(report["config"]["trials"].as_u64(), Some(300));
    assert_eq!(report["config"]["dim"].as_u64(), Some(2));

    let overridden = hamvol(&["mc", "--config", cfg.to_str().unwrap(), "--trials", "100"]);
    let report: serde_json::Value = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(report["config"]["trials"].as_u64(), Some(100));
}

#[test]
fn verify_quick_passes_and_sets_exit_codes() {
    let out = hamvol(&["verify", "--quick"]);
    assert!(
        out.status.success(),
        "verify --quick failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["all_passed"], true);
    let checks = report["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 8);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.matches("PASS").count(), 8, "stderr: {stderr}");
}

#[test]
fn bad_flags_exit_with_usage_code() {
    let out = hamvol(&["mc", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hamvol(&[
        "mc",
        "--N",
        "2",
        "--eps",
        "0.1",
        "--workers",
        "0",
        "--trials",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
